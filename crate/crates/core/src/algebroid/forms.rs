use std::collections::BTreeMap;

use super::FrameDerivation;
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;

/// All strictly increasing index tuples of length `p` drawn from `0..k`.
pub fn increasing_tuples(k: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, p, &mut Vec::new(), &mut out);
    out
}

/// Sorts `idx` in place and returns the permutation sign, or `None` when an
/// index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            } else if idx[j] == idx[j + 1] {
                return None;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// A degree-`p` form on an algebroid of rank `k` with `rows × cols` matrix
/// coefficients. Vector-valued forms use `cols = 1`; Hom-valued ones store
/// the map matrix directly.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValued {
    rank: usize,
    degree: usize,
    rows: usize,
    cols: usize,
    nvars: usize,
    comps: BTreeMap<Vec<usize>, PolyMatrix>,
}

impl FormValued {
    pub fn zero(rank: usize, degree: usize, rows: usize, cols: usize, nvars: usize) -> Self {
        Self::from_fn(rank, degree, rows, cols, nvars, |_| PolyMatrix::zeros(rows, cols, nvars))
    }

    pub fn from_fn(rank: usize, degree: usize, rows: usize, cols: usize, nvars: usize, mut f: impl FnMut(&[usize]) -> PolyMatrix) -> Self {
        let comps = increasing_tuples(rank, degree)
            .into_iter()
            .map(|t| {
                let m = f(&t);
                assert_eq!(m.shape(), (rows, cols), "form component has the wrong shape");
                (t, m)
            })
            .collect();
        FormValued {
            rank,
            degree,
            rows,
            cols,
            nvars,
            comps,
        }
    }

    /// A 1-form from its values on the frame.
    pub fn one_form(blocks: Vec<PolyMatrix>, rows: usize, cols: usize, nvars: usize) -> Result<Self> {
        for b in &blocks {
            if b.shape() != (rows, cols) {
                return Err(dim_err("one_form", format!("block is {}x{}, expected {}x{}", b.rows(), b.cols(), rows, cols)));
            }
        }
        let k = blocks.len();
        Ok(Self::from_fn(k, 1, rows, cols, nvars, |t| blocks[t[0]].clone()))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &PolyMatrix)> {
        self.comps.iter()
    }

    /// Component on a strictly increasing tuple.
    pub fn get(&self, tuple: &[usize]) -> &PolyMatrix {
        self.comps.get(tuple).expect("form component index must be strictly increasing and in range")
    }

    pub fn set(&mut self, tuple: &[usize], m: PolyMatrix) {
        assert_eq!(m.shape(), (self.rows, self.cols), "form component has the wrong shape");
        *self.comps.get_mut(tuple).expect("form component index must be strictly increasing") = m;
    }

    /// Value on an arbitrary frame tuple, using antisymmetry.
    pub fn eval(&self, indices: &[usize]) -> PolyMatrix {
        let mut idx = indices.to_vec();
        match sort_sign(&mut idx) {
            None => PolyMatrix::zeros(self.rows, self.cols, self.nvars),
            Some(1) => self.get(&idx).clone(),
            Some(_) => -self.get(&idx),
        }
    }

    /// Value on arbitrary sections, by multilinear expansion.
    pub fn eval_sections(&self, args: &[&[Poly]]) -> PolyMatrix {
        assert_eq!(args.len(), self.degree, "wrong number of form arguments");
        let mut out = PolyMatrix::zeros(self.rows, self.cols, self.nvars);
        let mut idx = vec![0usize; self.degree];
        self.expand(args, 0, &mut idx, &Poly::one(self.nvars), &mut out);
        out
    }

    fn expand(&self, args: &[&[Poly]], slot: usize, idx: &mut Vec<usize>, coeff: &Poly, out: &mut PolyMatrix) {
        if slot == args.len() {
            let v = self.eval(idx);
            if !v.is_zero() {
                *out = &*out + &v.scale_poly(coeff);
            }
            return;
        }
        for (i, a) in args[slot].iter().enumerate() {
            if a.is_zero() || idx[..slot].contains(&i) {
                continue;
            }
            idx[slot] = i;
            self.expand(args, slot + 1, idx, &(coeff * a), out);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(PolyMatrix::is_zero)
    }

    fn check_same(&self, other: &FormValued) -> Result<()> {
        if (self.rank, self.degree, self.rows, self.cols) != (other.rank, other.degree, other.rows, other.cols) {
            return Err(dim_err("form", "forms differ in rank, degree or coefficient shape"));
        }
        if self.nvars != other.nvars {
            return Err(Error::ChartMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FormValued) -> Result<FormValued> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &FormValued) -> Result<FormValued> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &FormValued, f: impl Fn(&PolyMatrix, &PolyMatrix) -> PolyMatrix) -> FormValued {
        let mut out = self.clone();
        for (t, m) in out.comps.iter_mut() {
            *m = f(m, other.get(t));
        }
        out
    }

    pub fn neg(&self) -> FormValued {
        self.map(self.rows, self.cols, |m| -m)
    }

    /// Applies `f` to every component; the result has shape `rows × cols`.
    pub fn map(&self, rows: usize, cols: usize, f: impl Fn(&PolyMatrix) -> PolyMatrix) -> FormValued {
        FormValued::from_fn(self.rank, self.degree, rows, cols, self.nvars, |t| f(self.get(t)))
    }

    /// `(T*ω)(a_1, ..) = ω(Ta_1, ..)` for `T` of shape `self.rank × new_rank`.
    pub fn pullback(&self, t: &PolyMatrix) -> Result<FormValued> {
        if t.rows() != self.rank {
            return Err(dim_err("form pullback", format!("base map has {} rows, expected {}", t.rows(), self.rank)));
        }
        let cols: Vec<Vec<Poly>> = (0..t.cols()).map(|j| t.column(j)).collect();
        Ok(FormValued::from_fn(t.cols(), self.degree, self.rows, self.cols, self.nvars, |tup| {
            let args: Vec<&[Poly]> = tup.iter().map(|&i| cols[i].as_slice()).collect();
            self.eval_sections(&args)
        }))
    }
}

/// Koszul differential of `ω` (degree ≤ 2) with respect to `nabla`:
/// `(dω)(e_0..e_p) = Σ_m (−1)^m ∇_{e_m} ω(..ê_m..) + Σ_{m<l} (−1)^{m+l} ω([e_m, e_l], ..ê_m..ê_l..)`.
pub fn koszul_d(nabla: &dyn FrameDerivation, w: &FormValued) -> Result<FormValued> {
    let alg = nabla.algebroid();
    if w.degree > 2 {
        return Err(Error::Precondition(format!("koszul_d supports degree ≤ 2, found {}", w.degree)));
    }
    if w.rank != alg.rank() || w.rows != nabla.coeff_rows() || nabla.coeff_cols().is_some_and(|c| c != w.cols) {
        return Err(dim_err("koszul_d", "form does not match the connection"));
    }
    let k = alg.rank();
    Ok(FormValued::from_fn(k, w.degree + 1, w.rows, w.cols, w.nvars, |t| {
        let mut acc = PolyMatrix::zeros(w.rows, w.cols, w.nvars);
        for m in 0..t.len() {
            let rest: Vec<usize> = t.iter().enumerate().filter(|&(q, _)| q != m).map(|(_, &i)| i).collect();
            let term = nabla.derive_frame(t[m], &w.eval(&rest));
            acc = if m % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        for m in 0..t.len() {
            for l in m + 1..t.len() {
                let c = alg.structure(t[m], t[l]);
                let rest: Vec<usize> = t.iter().enumerate().filter(|&(q, _)| q != m && q != l).map(|(_, &i)| i).collect();
                let mut term = PolyMatrix::zeros(w.rows, w.cols, w.nvars);
                for (q, cq) in c.iter().enumerate() {
                    if cq.is_zero() {
                        continue;
                    }
                    let mut idx = vec![q];
                    idx.extend(&rest);
                    let v = w.eval(&idx);
                    if !v.is_zero() {
                        term = &term + &v.scale_poly(cq);
                    }
                }
                acc = if (m + l) % 2 == 0 { &acc + &term } else { &acc - &term };
            }
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{BaseChart, Connection, LieAlgebroid};
    use std::sync::Arc;

    #[test]
    fn tuples_and_signs() {
        assert_eq!(increasing_tuples(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(increasing_tuples(2, 3).len(), 0);
        assert_eq!(increasing_tuples(4, 0), vec![Vec::<usize>::new()]);
        let mut v = vec![2, 0, 1];
        assert_eq!(sort_sign(&mut v), Some(1));
        let mut v = vec![1, 0];
        assert_eq!(sort_sign(&mut v), Some(-1));
        assert_eq!(sort_sign(&mut [1, 1]), None);
    }

    #[test]
    fn abelian_constant_forms_are_closed() {
        let a = Arc::new(LieAlgebroid::lie_algebra(3, &[]).unwrap());
        let nab = Connection::flat(a, 2);
        let w = FormValued::from_fn(3, 1, 2, 1, 0, |t| PolyMatrix::from_ints(0, &[&[t[0] as i64], &[1]]));
        assert!(koszul_d(&nab, &w).unwrap().is_zero());
    }

    #[test]
    fn flat_d_squares_to_zero() {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        let nab = Connection::flat(a, 1);
        let f = &Poly::var(2, 0).pow(3) * &Poly::var(2, 1);
        let w = FormValued::from_fn(2, 0, 1, 1, 2, |_| PolyMatrix::column_vector(std::slice::from_ref(&f), 2));
        let dd = koszul_d(&nab, &koszul_d(&nab, &w).unwrap()).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn rejects_degree_three() {
        let a = Arc::new(LieAlgebroid::so3());
        let nab = Connection::flat(a, 1);
        let w = FormValued::zero(3, 3, 1, 1, 0);
        assert!(koszul_d(&nab, &w).is_err());
    }
}
