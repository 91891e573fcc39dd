use std::sync::Arc;

use crate::algebroid::{koszul_d, Connection, FormValued, LieAlgebroid, Section};
use crate::error::{dim_err, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::rep2::{Rep2, RepMorphism};
use crate::report::{Comparison, Report};

/// `μ: A → T*M` as an `n × rank A` matrix (`μ[m][i]` is the `dx_m`
/// coefficient of `μ(e_i)`), and `ν(e_i)` as antisymmetric `n × n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct IM2Form {
    pub mu: PolyMatrix,
    pub nu: Vec<PolyMatrix>,
}

impl IM2Form {
    pub fn zero(alg: &LieAlgebroid) -> Self {
        let n = alg.dim();
        IM2Form {
            mu: PolyMatrix::zeros(n, alg.rank(), n),
            nu: vec![PolyMatrix::zeros(n, n, n); alg.rank()],
        }
    }

    fn check(&self, alg: &LieAlgebroid) -> Result<()> {
        let n = alg.dim();
        if self.mu.shape() != (n, alg.rank()) || self.nu.len() != alg.rank() || self.nu.iter().any(|m| m.shape() != (n, n)) {
            return Err(dim_err(
                "im2form",
                format!("μ must be {n}x{} and ν must hold {} blocks of {n}x{n}", alg.rank(), alg.rank()),
            ));
        }
        for m in &self.nu {
            if !(m + &m.transpose()).is_zero() {
                return Err(crate::error::Error::Invalid("ν must take values in antisymmetric matrices".into()));
            }
        }
        Ok(())
    }

    fn mu_of(&self, a: &[Poly]) -> Vec<Poly> {
        self.mu.mul_vec(a)
    }

    fn nu_of(&self, a: &[Poly]) -> PolyMatrix {
        let n = self.mu.nvars();
        let mut out = PolyMatrix::zeros(self.mu.rows(), self.mu.rows(), n);
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_zero() {
                out = &out + &self.nu[i].scale_poly(ai);
            }
        }
        out
    }
}

/// Differential forms of degree ≤ 3 on a coordinate chart; a 2-form is an
/// antisymmetric matrix and a 3-form a dense array indexed `[l][m][p]`.
mod ext {
    use crate::matrix::PolyMatrix;
    use crate::poly::Poly;

    pub fn d1(t: &[Poly]) -> PolyMatrix {
        let n = t.len();
        let nv = t.first().map_or(0, Poly::nvars);
        PolyMatrix::from_fn(n, n, nv, |l, m| &t[m].partial(l).unwrap() - &t[l].partial(m).unwrap())
    }

    pub fn d2(w: &PolyMatrix) -> Vec<Vec<Vec<Poly>>> {
        let n = w.rows();
        (0..n)
            .map(|l| {
                (0..n)
                    .map(|m| {
                        (0..n)
                            .map(|p| {
                                let a = w.get(m, p).partial(l).unwrap();
                                let b = w.get(l, p).partial(m).unwrap();
                                let c = w.get(l, m).partial(p).unwrap();
                                &(&a - &b) + &c
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn i1(x: &[Poly], t: &[Poly]) -> Poly {
        let mut acc = Poly::zero(x.first().map_or(0, Poly::nvars));
        for (a, b) in x.iter().zip(t) {
            acc += &(a * b);
        }
        acc
    }

    pub fn i2(x: &[Poly], w: &PolyMatrix) -> Vec<Poly> {
        let nv = w.nvars();
        (0..w.cols())
            .map(|m| {
                let mut acc = Poly::zero(nv);
                for (l, xl) in x.iter().enumerate() {
                    acc += &(xl * w.get(l, m));
                }
                acc
            })
            .collect()
    }

    pub fn i3(x: &[Poly], eta: &[Vec<Vec<Poly>>], nv: usize) -> PolyMatrix {
        let n = x.len();
        PolyMatrix::from_fn(n, n, nv, |m, p| {
            let mut acc = Poly::zero(nv);
            for (l, xl) in x.iter().enumerate() {
                acc += &(xl * &eta[l][m][p]);
            }
            acc
        })
    }

    pub fn d0(f: &Poly, n: usize) -> Vec<Poly> {
        (0..n).map(|l| f.partial(l).unwrap()).collect()
    }

    /// `L_X θ = i_X dθ + d i_X θ`.
    pub fn lie1(x: &[Poly], t: &[Poly]) -> Vec<Poly> {
        let a = i2(x, &d1(t));
        let b = d0(&i1(x, t), t.len());
        a.iter().zip(&b).map(|(p, q)| p + q).collect()
    }

    pub fn lie2(x: &[Poly], w: &PolyMatrix) -> PolyMatrix {
        let nv = w.nvars();
        &i3(x, &d2(w), nv) + &d1(&i2(x, w))
    }
}

/// Sections swept by the direct check: the frame and its `x_j` multiples.
pub(crate) fn frame_and_multiples(alg: &LieAlgebroid) -> Vec<Section> {
    let n = alg.dim();
    let mut out = Vec::new();
    for i in 0..alg.rank() {
        let e = alg.frame(i);
        for j in 0..n {
            out.push(e.iter().map(|p| p * &Poly::var(n, j)).collect());
        }
        out.push(e);
    }
    out
}

/// Conditions (1)-(3) of an IM-2-form, checked directly on pairs of
/// frame sections and coordinate multiples of them.
pub fn im2form_direct(alg: &LieAlgebroid, form: &IM2Form) -> Result<Report> {
    form.check(alg)?;
    let sections = frame_and_multiples(alg);
    let mut rep = Report::new("im2form_conditions");
    for (p, a) in sections.iter().enumerate() {
        for (q, b) in sections.iter().enumerate() {
            let (ra, rb) = (alg.anchor_field(a), alg.anchor_field(b));
            let (ma, mb) = (form.mu_of(a), form.mu_of(b));
            let (na, nb) = (form.nu_of(a), form.nu_of(b));
            let ab = alg.bracket(a, b)?;
            if p <= q {
                rep.push_poly("symmetry", &[p, q], &ext::i1(&ma, &rb) + &ext::i1(&mb, &ra));
            }
            // μ[a,b] − L_{ρa}μb + i_{ρb}(dμa + νa)
            let inner = ext::i2(&rb, &(&ext::d1(&ma) + &na));
            let lhs: Vec<Poly> = form
                .mu_of(&ab)
                .iter()
                .zip(ext::lie1(&ra, &mb))
                .zip(&inner)
                .map(|((x, y), z)| &(x - &y) + z)
                .collect();
            rep.push_vec("mu_bracket", &[p, q], &lhs, alg.dim());
            // ν[a,b] − L_{ρa}νb + i_{ρb}dνa
            let third = &(&form.nu_of(&ab) - &ext::lie2(&ra, &nb)) + &ext::i3(&rb, &ext::d2(&na), alg.dim());
            rep.push("nu_bracket", &[p, q], third);
        }
    }
    Ok(rep)
}

/// `Φ = ν + d_{∇*}μ*` with `Φ_{e_i}(∂_l) = i_{∂_l}(ν + ω)(e_i)`, where
/// `ω ∈ Ω²(TM; A*)` is read as an `A`-indexed family of 2-forms.
pub fn im2form_homotopy(nabla: &Connection, form: &IM2Form) -> Result<FormValued> {
    let n = form.mu.rows();
    let k = form.mu.cols();
    let mu_star = FormValued::from_fn(n, 1, k, 1, n, |t| PolyMatrix::column_vector(&form.mu.row(t[0]), n));
    let omega = koszul_d(&nabla.dual(), &mu_star)?;
    Ok(FormValued::from_fn(k, 1, n, n, n, |t| {
        let i = t[0];
        PolyMatrix::from_fn(n, n, n, |m, l| &form.nu[i].get(l, m).clone() + &omega.eval(&[l, m]).get(i, 0).clone())
    }))
}

/// `(μ, −μ*, ν + d_{∇*}μ*)` as a morphism from the adjoint representation
/// to its dual.
pub fn im2form_morphism(alg: Arc<LieAlgebroid>, nabla: &Connection, form: &IM2Form) -> Result<RepMorphism> {
    form.check(&alg)?;
    let ad = Rep2::adjoint(alg.clone(), nabla)?;
    let n = alg.dim();
    RepMorphism::new(
        ad.clone(),
        ad.dual(),
        PolyMatrix::identity(alg.rank(), n),
        form.mu.clone(),
        -form.mu.transpose(),
        im2form_homotopy(nabla, form)?,
    )
}

/// Direct conditions against the representation-morphism formulation.
pub fn im2form_check(alg: Arc<LieAlgebroid>, nabla: &Connection, form: &IM2Form) -> Result<Comparison> {
    let v1 = im2form_direct(&alg, form)?;
    let v2 = im2form_morphism(alg, nabla, form)?.verify()?;
    Ok(Comparison::new("im2form", v1, v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::BaseChart;
    use crate::random::Gen;
    use crate::rep2::tm_connection;

    fn plane() -> Arc<LieAlgebroid> {
        Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)))
    }

    /// `μ(X) = i_X ω` for the 2-form with matrix `w`.
    fn contraction(w: &PolyMatrix) -> IM2Form {
        let n = w.rows();
        IM2Form {
            mu: w.transpose(),
            nu: vec![PolyMatrix::zeros(n, n, n); n],
        }
    }

    #[test]
    fn symplectic_plane_passes() {
        let a = plane();
        let form = contraction(&PolyMatrix::from_ints(2, &[&[0, 1], &[-1, 0]]));
        let nab = tm_connection(a.chart(), 2, vec![PolyMatrix::zeros(2, 2, 2); 2]).unwrap();
        let c = im2form_check(a.clone(), &nab, &form).unwrap();
        assert!(c.v1.passed() && c.v2.passed(), "{c}");
        let c = im2form_check(a.clone(), &nab, &IM2Form::zero(&a)).unwrap();
        assert!(c.v1.passed() && c.v2.passed());
    }

    #[test]
    fn symmetric_mu_fails_condition_one() {
        let a = plane();
        let mut form = IM2Form::zero(&a);
        form.mu.set(0, 0, Poly::one(2));
        let nab = tm_connection(a.chart(), 2, vec![PolyMatrix::zeros(2, 2, 2); 2]).unwrap();
        let c = im2form_check(a, &nab, &form).unwrap();
        assert!(c.v1.failing("symmetry") && !c.v2.passed(), "{c}");
    }

    #[test]
    fn closed_forms_pass_with_curved_connections() {
        let mut g = Gen::new(21);
        let a = plane();
        for _ in 0..6 {
            // ω = d(θ) is closed for any polynomial θ
            let theta = vec![g.poly(2), g.poly(2)];
            let form = contraction(&ext::d1(&theta));
            let nab = g.tm_connection(a.chart(), 2);
            let c = im2form_check(a.clone(), &nab, &form).unwrap();
            assert!(c.v1.passed() && c.v2.passed(), "{c}");
        }
    }

    #[test]
    fn random_forms_agree() {
        let mut g = Gen::new(22);
        let mut fails = 0;
        for _ in 0..16 {
            let a = g.algebroid();
            let n = a.dim();
            let mut form = IM2Form::zero(&a);
            form.mu = g.matrix(n, a.rank(), n);
            for m in form.nu.iter_mut() {
                let upper = g.matrix(n, n, n);
                *m = PolyMatrix::from_fn(n, n, n, |l, p| match l.cmp(&p) {
                    std::cmp::Ordering::Less => upper.get(l, p).clone(),
                    std::cmp::Ordering::Greater => -upper.get(p, l).clone(),
                    _ => Poly::zero(n),
                });
            }
            let nab = g.tm_connection(a.chart(), a.rank());
            let c = im2form_check(a, &nab, &form).unwrap();
            assert!(c.agree(), "{c}");
            fails += (!c.v1.passed()) as usize;
        }
        assert!(fails > 0);
    }
}
