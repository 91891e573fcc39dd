//! Lie algebroids on trivialized bundles over affine charts.
//!
//! A section is a vector of component polynomials in the global frame
//! `e_1..e_k`. Brackets of arbitrary sections are the Leibniz extension of
//! the frame brackets, so every tensorial identity is decided on frames.

mod connection;
mod forms;

use std::sync::Arc;

pub use connection::{Connection, FrameDerivation, HomConnection};
pub use forms::{increasing_tuples, koszul_d, FormValued};

use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{Poly, Rational};
use crate::polytext::default_names;
use crate::report::Report;

pub type Section = Vec<Poly>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BaseChart {
    names: Vec<String>,
}

impl BaseChart {
    pub fn new(names: Vec<String>) -> Result<Self> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate variable name '{n}'")));
            }
        }
        Ok(BaseChart { names })
    }

    /// `ℝⁿ` with coordinates `x1..xn`.
    pub fn standard(n: usize) -> Self {
        BaseChart { names: default_names(n) }
    }

    pub fn point() -> Self {
        Self::standard(0)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The chart with extra coordinates appended.
    pub fn extended(&self, extra: impl IntoIterator<Item = String>) -> Result<Self> {
        let mut names = self.names.clone();
        names.extend(extra);
        Self::new(names)
    }
}

/// Bracket of vector fields given by components in `∂/∂x_1..∂/∂x_n`.
pub fn vector_field_bracket(x: &[Poly], y: &[Poly]) -> Vec<Poly> {
    (0..x.len()).map(|j| &y[j].derive_along(x) - &x[j].derive_along(y)).collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlgebroid {
    chart: BaseChart,
    rank: usize,
    anchor: PolyMatrix,
    // [e_i, e_j] stored at i * rank + j
    brackets: Vec<Section>,
}

impl LieAlgebroid {
    /// Builds an algebroid from its anchor (n × k) and the brackets
    /// `[e_i, e_j]` for `i < j`; missing pairs are zero.
    pub fn new(chart: BaseChart, anchor: PolyMatrix, upper: Vec<((usize, usize), Section)>) -> Result<Self> {
        let n = chart.dim();
        let k = anchor.cols();
        if anchor.rows() != n {
            return Err(dim_err("anchor", format!("expected {} rows, found {}", n, anchor.rows())));
        }
        if anchor.nvars() != n {
            return Err(Error::ChartMismatch {
                expected: n,
                found: anchor.nvars(),
            });
        }
        let mut brackets = vec![vec![Poly::zero(n); k]; k * k];
        for ((i, j), s) in upper {
            if i >= k || j >= k {
                return Err(Error::IndexOutOfRange { index: i.max(j), limit: k });
            }
            if i == j {
                return Err(Error::Invalid(format!("bracket [e{0}, e{0}] must vanish", i + 1)));
            }
            if s.len() != k {
                return Err(dim_err(
                    "structure functions",
                    format!("[e{}, e{}] has {} components, expected {}", i + 1, j + 1, s.len(), k),
                ));
            }
            if let Some(p) = s.iter().find(|p| p.nvars() != n) {
                return Err(Error::ChartMismatch { expected: n, found: p.nvars() });
            }
            let neg: Section = s.iter().map(|p| -p).collect();
            let (s, neg) = if i < j { (s, neg) } else { (neg, s) };
            let (i, j) = (i.min(j), i.max(j));
            brackets[i * k + j] = s;
            brackets[j * k + i] = neg;
        }
        Ok(LieAlgebroid {
            chart,
            rank: k,
            anchor,
            brackets,
        })
    }

    /// The tangent algebroid of the chart with the coordinate frame.
    pub fn tangent(chart: BaseChart) -> Self {
        let n = chart.dim();
        Self::new(chart, PolyMatrix::identity(n, n), vec![]).expect("tangent algebroid is well formed")
    }

    /// A Lie algebra (algebroid over a point) from structure constants
    /// `[e_i, e_j] = Σ_l c[l] e_l`, given for `i < j`.
    pub fn lie_algebra(rank: usize, constants: &[((usize, usize), Vec<Rational>)]) -> Result<Self> {
        let upper = constants
            .iter()
            .map(|(ij, c)| (*ij, c.iter().map(|x| Poly::constant(0, x.clone())).collect()))
            .collect();
        Self::new(BaseChart::point(), PolyMatrix::zeros(0, rank, 0), upper)
    }

    pub fn so3() -> Self {
        let c = |v: [i64; 3]| v.iter().map(|&x| crate::poly::rat(x)).collect::<Vec<_>>();
        Self::lie_algebra(3, &[((0, 1), c([0, 0, 1])), ((1, 2), c([1, 0, 0])), ((0, 2), c([0, -1, 0]))]).unwrap()
    }

    /// sl(2) in the basis (h, e, f): [h,e] = 2e, [h,f] = −2f, [e,f] = h.
    pub fn sl2() -> Self {
        let c = |v: [i64; 3]| v.iter().map(|&x| crate::poly::rat(x)).collect::<Vec<_>>();
        Self::lie_algebra(3, &[((0, 1), c([0, 2, 0])), ((0, 2), c([0, 0, -2])), ((1, 2), c([1, 0, 0]))]).unwrap()
    }

    /// Heisenberg algebra: [e_1, e_2] = e_3.
    pub fn heisenberg() -> Self {
        let c = |v: [i64; 3]| v.iter().map(|&x| crate::poly::rat(x)).collect::<Vec<_>>();
        Self::lie_algebra(3, &[((0, 1), c([0, 0, 1]))]).unwrap()
    }

    /// Rank-1 algebroid over ℝ with anchor `e ↦ x d/dx`.
    pub fn action_line() -> Self {
        let chart = BaseChart::standard(1);
        let anchor = PolyMatrix::from_fn(1, 1, 1, |_, _| Poly::var(1, 0));
        Self::new(chart, anchor, vec![]).unwrap()
    }

    pub fn chart(&self) -> &BaseChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn anchor(&self) -> &PolyMatrix {
        &self.anchor
    }

    pub fn is_tangent(&self) -> bool {
        self.rank == self.dim() && self.anchor == PolyMatrix::identity(self.rank, self.dim()) && self.brackets.iter().all(|s| s.iter().all(Poly::is_zero))
    }

    /// Components of `[e_i, e_j]`.
    pub fn structure(&self, i: usize, j: usize) -> &[Poly] {
        &self.brackets[i * self.rank + j]
    }

    /// Upper-triangular bracket table, the inverse of [`LieAlgebroid::new`].
    pub fn upper_brackets(&self) -> Vec<((usize, usize), Section)> {
        let mut out = Vec::new();
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let s = self.structure(i, j);
                if s.iter().any(|p| !p.is_zero()) {
                    out.push(((i, j), s.to_vec()));
                }
            }
        }
        out
    }

    pub fn frame(&self, i: usize) -> Section {
        let n = self.dim();
        (0..self.rank).map(|l| if l == i { Poly::one(n) } else { Poly::zero(n) }).collect()
    }

    pub fn zero_section(&self) -> Section {
        vec![Poly::zero(self.dim()); self.rank]
    }

    fn check_section(&self, a: &[Poly]) -> Result<()> {
        if a.len() != self.rank {
            return Err(dim_err("section", format!("expected {} components, found {}", self.rank, a.len())));
        }
        if let Some(p) = a.iter().find(|p| p.nvars() != self.dim()) {
            return Err(Error::ChartMismatch {
                expected: self.dim(),
                found: p.nvars(),
            });
        }
        Ok(())
    }

    /// Components of the vector field `ρ(a)`.
    pub fn anchor_field(&self, a: &[Poly]) -> Vec<Poly> {
        self.anchor.mul_vec(a)
    }

    /// `ρ(e_i)·f`.
    pub fn anchor_frame(&self, i: usize, f: &Poly) -> Poly {
        f.derive_along(&self.anchor.column(i))
    }

    /// `ρ(a)·f`.
    pub fn anchor_apply(&self, a: &[Poly], f: &Poly) -> Result<Poly> {
        self.check_section(a)?;
        if f.nvars() != self.dim() {
            return Err(Error::ChartMismatch {
                expected: self.dim(),
                found: f.nvars(),
            });
        }
        Ok(f.derive_along(&self.anchor_field(a)))
    }

    pub fn bracket(&self, a: &[Poly], b: &[Poly]) -> Result<Section> {
        self.check_section(a)?;
        self.check_section(b)?;
        Ok(self.bracket_unchecked(a, b))
    }

    pub(crate) fn bracket_unchecked(&self, a: &[Poly], b: &[Poly]) -> Section {
        let k = self.rank;
        let n = self.dim();
        let mut out = vec![Poly::zero(n); k];
        for i in 0..k {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..k {
                if b[j].is_zero() || i == j {
                    continue;
                }
                let c = self.structure(i, j);
                if c.iter().all(Poly::is_zero) {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for l in 0..k {
                    if !c[l].is_zero() {
                        out[l] += &(&ab * &c[l]);
                    }
                }
            }
        }
        if n > 0 {
            let ra = self.anchor_field(a);
            let rb = self.anchor_field(b);
            for l in 0..k {
                out[l] += &b[l].derive_along(&ra);
                out[l] -= &a[l].derive_along(&rb);
            }
        }
        out
    }

    /// Checks the anchor-morphism property and the Jacobi identity on the
    /// frame. Both residuals are tensorial, so frames suffice.
    pub fn verify(&self) -> Report {
        let mut rep = Report::new("verify_lie_algebroid");
        let k = self.rank;
        let n = self.dim();
        for i in 0..k {
            for j in i + 1..k {
                let lhs = self.anchor_field(self.structure(i, j));
                let rhs = vector_field_bracket(&self.anchor.column(i), &self.anchor.column(j));
                let res: Vec<Poly> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                rep.push_vec("anchor", &[i, j], &res, n);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    let res = self.jacobiator(&self.frame(i), &self.frame(j), &self.frame(l));
                    rep.push_vec("jacobi", &[i, j, l], &res, n);
                }
            }
        }
        rep
    }

    pub fn jacobiator(&self, a: &[Poly], b: &[Poly], c: &[Poly]) -> Section {
        let t1 = self.bracket_unchecked(&self.bracket_unchecked(a, b), c);
        let t2 = self.bracket_unchecked(&self.bracket_unchecked(b, c), a);
        let t3 = self.bracket_unchecked(&self.bracket_unchecked(c, a), b);
        t1.iter().zip(&t2).zip(&t3).map(|((x, y), z)| &(x + y) + z).collect()
    }

    /// Replaces the bracket `[e_i, e_j]` (and its antisymmetric partner).
    pub fn with_bracket(&self, i: usize, j: usize, s: Section) -> Result<Self> {
        let mut upper: Vec<_> = self
            .upper_brackets()
            .into_iter()
            .filter(|((a, b), _)| (*a, *b) != (i.min(j), i.max(j)))
            .collect();
        upper.push(((i, j), s));
        Self::new(self.chart.clone(), self.anchor.clone(), upper)
    }

    /// Moves the algebroid to a larger chart (structure functions are
    /// re-read there) with a new anchor. Used for action algebroids.
    pub fn with_chart(&self, chart: BaseChart, anchor: PolyMatrix) -> Result<Self> {
        if chart.dim() < self.dim() {
            return Err(Error::Invalid("target chart is smaller".into()));
        }
        let n = chart.dim();
        let upper = self
            .upper_brackets()
            .into_iter()
            .map(|(ij, s)| (ij, s.iter().map(|p| p.extend_vars(n)).collect()))
            .collect();
        Self::new(chart, anchor, upper)
    }

    pub fn with_anchor(&self, anchor: PolyMatrix) -> Result<Self> {
        Self::new(self.chart.clone(), anchor, self.upper_brackets())
    }
}

/// Checks that `T` (rank A′ × rank A) is a Lie algebroid morphism over the
/// identity: `ρ′∘T = ρ` and `T[e_i, e_j] = [Te_i, Te_j]′`.
pub fn algebroid_morphism_check(t: &PolyMatrix, a: &LieAlgebroid, b: &LieAlgebroid) -> Result<Report> {
    if a.chart() != b.chart() {
        return Err(Error::ChartMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if t.shape() != (b.rank(), a.rank()) || t.nvars() != a.dim() {
        return Err(dim_err(
            "algebroid morphism",
            format!("expected {}x{}, found {}x{}", b.rank(), a.rank(), t.rows(), t.cols()),
        ));
    }
    let mut rep = Report::new("algebroid_morphism_check");
    let anchor_res = &(b.anchor() * t) - a.anchor();
    for i in 0..a.rank() {
        let col = anchor_res.column(i);
        rep.push_vec("anchor", &[i], &col, a.dim());
    }
    for i in 0..a.rank() {
        for j in i + 1..a.rank() {
            let lhs = t.mul_vec(a.structure(i, j));
            let rhs = b.bracket_unchecked(&t.column(i), &t.column(j));
            let res: Vec<Poly> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
            rep.push_vec("bracket", &[i, j], &res, a.dim());
        }
    }
    Ok(rep)
}

pub type SharedAlgebroid = Arc<LieAlgebroid>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn anchor_examples() {
        let t = LieAlgebroid::tangent(BaseChart::standard(2));
        let f = &x(2, 0) * &x(2, 1);
        assert_eq!(t.anchor_apply(&t.frame(0), &f).unwrap(), x(2, 1));

        let line = LieAlgebroid::action_line();
        assert_eq!(line.anchor_apply(&line.frame(0), &x(1, 0)).unwrap(), x(1, 0));

        let so3 = LieAlgebroid::so3();
        assert!(so3.anchor_apply(&so3.frame(1), &Poly::from_int(0, 4)).unwrap().is_zero());
    }

    #[test]
    fn bracket_examples() {
        let so3 = LieAlgebroid::so3();
        assert_eq!(so3.bracket(&so3.frame(0), &so3.frame(1)).unwrap(), so3.frame(2));
        let a = vec![Poly::from_int(0, 2), Poly::from_int(0, -1), Poly::one(0)];
        assert!(so3.bracket(&a, &a).unwrap().iter().all(Poly::is_zero));

        let line = LieAlgebroid::action_line();
        let xe = vec![x(1, 0)];
        assert_eq!(line.bracket(&xe, &line.frame(0)).unwrap(), vec![-x(1, 0)]);
        assert!(line.bracket(&xe, &[]).is_err());
    }

    #[test]
    fn standard_algebroids_verify() {
        for n in 0..=3 {
            assert!(LieAlgebroid::tangent(BaseChart::standard(n)).verify().passed());
        }
        for a in [
            LieAlgebroid::so3(),
            LieAlgebroid::sl2(),
            LieAlgebroid::heisenberg(),
            LieAlgebroid::action_line(),
        ] {
            assert!(a.verify().passed(), "{}", a.verify());
        }
    }

    #[test]
    fn mutated_table_reports_exact_jacobiator() {
        // [e1,e2] = e1, [e1,e3] = e2, [e2,e3] = 0.
        // [[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2] = [e1,e3] + 0 + [-e2,e2] = e2.
        let c = |v: [i64; 3]| v.iter().map(|&x| rat(x)).collect::<Vec<_>>();
        let a = LieAlgebroid::lie_algebra(3, &[((0, 1), c([1, 0, 0])), ((0, 2), c([0, 1, 0]))]).unwrap();
        let rep = a.verify();
        assert_eq!(rep.residuals.len(), 1);
        assert_eq!(rep.residuals[0].family, "jacobi");
        assert_eq!(rep.residuals[0].value.column(0), a.frame(1));
    }

    #[test]
    fn morphism_examples() {
        let so3 = LieAlgebroid::so3();
        assert!(algebroid_morphism_check(&PolyMatrix::identity(3, 0), &so3, &so3).unwrap().passed());
        let abelian = LieAlgebroid::lie_algebra(3, &[]).unwrap();
        assert!(algebroid_morphism_check(&PolyMatrix::zeros(3, 3, 0), &so3, &abelian).unwrap().passed());

        let t = PolyMatrix::from_ints(0, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        let rep = algebroid_morphism_check(&t, &so3, &so3).unwrap();
        let r = rep.residuals.iter().find(|r| r.indices == vec![0, 1]).unwrap();
        assert_eq!(r.value.column(0), vec![Poly::zero(0), Poly::zero(0), Poly::from_int(0, -1)]);
    }

    #[test]
    fn zero_map_fails_when_anchor_is_nonzero() {
        let t = LieAlgebroid::tangent(BaseChart::standard(1));
        let target = LieAlgebroid::new(BaseChart::standard(1), PolyMatrix::zeros(1, 1, 1), vec![]).unwrap();
        let rep = algebroid_morphism_check(&PolyMatrix::zeros(1, 1, 1), &t, &target).unwrap();
        assert!(rep.failing("anchor"));
    }
}
