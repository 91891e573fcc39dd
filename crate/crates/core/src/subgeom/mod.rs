//! Double vector subbundles in decomposed form: subbundles are idempotent
//! projections, so membership and quotients become matrix identities.

mod ideals;
mod spencer;

pub use ideals::{ideal_system_check, im_prop_check, spencer_bracket_residuals, IdealSystemReport};
pub use spencer::{connection_to_spencer, involutivity_check, spencer_to_connection, LinearDistribution, SpencerOp};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{FormValued, Section};
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{ratio, Poly, Rational};
use crate::rep2::{GaugeTensor, Rep2};
use crate::report::Report;

/// A subbundle of a trivial bundle, given as the image of an idempotent
/// polynomial matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleProj {
    p: PolyMatrix,
}

impl SubbundleProj {
    pub fn new(p: PolyMatrix) -> Result<Self> {
        if p.rows() != p.cols() {
            return Err(dim_err("subbundle", format!("projection must be square, got {}x{}", p.rows(), p.cols())));
        }
        if &p * &p != p {
            return Err(Error::Invalid("projection is not idempotent".into()));
        }
        Ok(SubbundleProj { p })
    }

    pub fn full(rank: usize, nvars: usize) -> Self {
        SubbundleProj {
            p: PolyMatrix::identity(rank, nvars),
        }
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        SubbundleProj {
            p: PolyMatrix::zeros(rank, rank, nvars),
        }
    }

    /// Projection onto the span of the listed frame vectors.
    pub fn coordinate(rank: usize, nvars: usize, indices: &[usize]) -> Self {
        SubbundleProj {
            p: PolyMatrix::from_fn(rank, rank, nvars, |i, j| {
                if i == j && indices.contains(&i) {
                    Poly::one(nvars)
                } else {
                    Poly::zero(nvars)
                }
            }),
        }
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.p
    }

    /// `1 − p`, whose image models the quotient.
    pub fn complement(&self) -> PolyMatrix {
        &PolyMatrix::identity(self.ambient(), self.p.nvars()) - &self.p
    }

    pub fn complement_proj(&self) -> SubbundleProj {
        SubbundleProj { p: self.complement() }
    }

    pub fn ambient(&self) -> usize {
        self.p.rows()
    }

    /// The rank of an idempotent equals its trace, which is then a constant.
    pub fn rank(&self) -> Result<usize> {
        let mut tr = Poly::zero(self.p.nvars());
        for i in 0..self.ambient() {
            tr += self.p.get(i, i);
        }
        if !tr.is_constant() {
            return Err(Error::Invalid("trace of the projection is not constant".into()));
        }
        let c = tr.constant_term();
        if !c.is_integer() || c < Rational::from_integer(0.into()) {
            return Err(Error::Invalid(format!("trace {c} is not a rank")));
        }
        Ok(c.to_integer().try_into().unwrap_or(usize::MAX))
    }

    /// Evaluates at ten rational points and checks that `p(x)` is idempotent
    /// there with the same rank everywhere.
    pub fn spot_check(&self, seed: u64) -> Result<()> {
        let expected = self.rank()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.p.nvars();
        for _ in 0..10 {
            let point: Vec<Rational> = (0..n).map(|_| ratio(rng.random_range(-9..=9), rng.random_range(1..=5))).collect();
            let m: Vec<Vec<Rational>> = (0..self.ambient())
                .map(|i| (0..self.ambient()).map(|j| self.p.get(i, j).eval(&point)).collect::<Result<_>>())
                .collect::<Result<_>>()?;
            if rank_of(m) != expected {
                return Err(Error::Invalid(format!("projection rank drops at {point:?}")));
            }
        }
        Ok(())
    }

    /// Generators `p·f_β` of the subbundle.
    pub fn generators(&self) -> Vec<Section> {
        (0..self.ambient()).map(|j| self.p.column(j)).collect()
    }
}

fn rank_of(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != Rational::from_integer(0.into())) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..rows {
            if r != rank && m[r][c] != Rational::from_integer(0.into()) {
                let f = &m[r][c] / &m[rank][c];
                for k in c..cols {
                    let v = &m[rank][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `Φ_a(B) ⊂ C` for every `a` in the subbundle `A`:
/// `(1 − p_C)Φ_{p_A e_i}p_B = 0` for all `i`.
pub fn gauge_in_stabilizer(phi: &GaugeTensor, pa: &SubbundleProj, pb: &SubbundleProj, pc: &SubbundleProj) -> Result<bool> {
    Ok(stabilizer_residuals(phi, pa, pb, pc)?.passed())
}

pub fn stabilizer_residuals(phi: &GaugeTensor, pa: &SubbundleProj, pb: &SubbundleProj, pc: &SubbundleProj) -> Result<Report> {
    if phi.degree() != 1 || phi.rank() != pa.ambient() || phi.coeff_shape() != (pc.ambient(), pb.ambient()) {
        return Err(dim_err("stabilizer", "Φ does not match the projections"));
    }
    let q = pc.complement();
    let mut rep = Report::new("stabilizer");
    for (i, a) in pa.generators().iter().enumerate() {
        let phi_a = phi.eval_sections(&[a]);
        rep.push("escape", &[i], &(&q * &phi_a) * pb.matrix());
    }
    Ok(rep)
}

/// Two decompositions give the same double vector subbundle iff their
/// difference lies in the stabilizer.
pub fn same_subbundle(phi1: &GaugeTensor, phi2: &GaugeTensor, pa: &SubbundleProj, pb: &SubbundleProj, pc: &SubbundleProj) -> Result<bool> {
    gauge_in_stabilizer(&phi1.checked_sub(phi2)?, pa, pb, pc)
}

/// `∇_a(p)`: the derivative of the generators `p·f_β` along a section `a`.
pub(crate) fn derive_projection(nabla: &crate::algebroid::Connection, a: &[Poly], p: &PolyMatrix) -> PolyMatrix {
    let alg = nabla.algebroid_arc();
    let mut gamma = PolyMatrix::zeros(nabla.rank(), nabla.rank(), alg.dim());
    for (i, ai) in a.iter().enumerate() {
        if !ai.is_zero() {
            gamma = &gamma + &nabla.christoffel(i).scale_poly(ai);
        }
    }
    &p.derive_along(&alg.anchor_field(a)) + &(&gamma * p)
}

/// Subrepresentation conditions on the given sections of `A`:
/// `(1−p₁)∂p₀`, `(1−p)∇_a p` in both degrees, `(1−p₀)K(a, a′)p₁`.
pub fn subrep_check_on(rep: &Rep2, p0: &SubbundleProj, p1: &SubbundleProj, generators: &[Section]) -> Result<Report> {
    if p0.ambient() != rep.rank0() || p1.ambient() != rep.rank1() {
        return Err(dim_err("subrep", "projections do not match the ranks of the representation"));
    }
    let (q0, q1) = (p0.complement(), p1.complement());
    let mut out = Report::new("subrep");
    out.push("boundary", &[], &(&q1 * rep.boundary()) * p0.matrix());
    for (i, a) in generators.iter().enumerate() {
        out.push("connection0", &[i], &q0 * &derive_projection(rep.nabla0(), a, p0.matrix()));
        out.push("connection1", &[i], &q1 * &derive_projection(rep.nabla1(), a, p1.matrix()));
    }
    let k: &FormValued = rep.k();
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            let kij = k.eval_sections(&[&generators[i], &generators[j]]);
            out.push("curvature", &[i, j], &(&q0 * &kij) * p1.matrix());
        }
    }
    Ok(out)
}

/// Subrepresentation conditions on the frame of `A`.
pub fn subrep_check(rep: &Rep2, p0: &SubbundleProj, p1: &SubbundleProj) -> Result<Report> {
    let a = rep.algebroid();
    let frame: Vec<Section> = (0..a.rank()).map(|i| a.frame(i)).collect();
    subrep_check_on(rep, p0, p1, &frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{BaseChart, Connection, LieAlgebroid};
    use crate::random::Gen;
    use std::sync::Arc;

    fn plane() -> Arc<LieAlgebroid> {
        Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)))
    }

    #[test]
    fn projections() {
        assert!(SubbundleProj::new(PolyMatrix::from_ints(0, &[&[1, 1], &[0, 0]])).is_ok());
        assert!(SubbundleProj::new(PolyMatrix::from_ints(0, &[&[1, 1], &[0, 1]])).is_err());
        // graph of x ↦ x·e2 over the line: p = [[1, 0], [x, 0]]
        let x = Poly::var(1, 0);
        let p = SubbundleProj::new(PolyMatrix::from_fn(2, 2, 1, |i, j| match (i, j) {
            (0, 0) => Poly::one(1),
            (1, 0) => x.clone(),
            _ => Poly::zero(1),
        }))
        .unwrap();
        assert_eq!(p.rank().unwrap(), 1);
        p.spot_check(1).unwrap();
        assert_eq!(SubbundleProj::full(3, 0).rank().unwrap(), 3);
    }

    #[test]
    fn stabilizer_examples() {
        let (full, zero) = (SubbundleProj::full(2, 2), SubbundleProj::zero(2, 2));
        let mut g = Gen::new(41);
        let phi = g.nonzero_form(2, 1, 2, 2, 2);
        assert!(gauge_in_stabilizer(&FormValued::zero(2, 1, 2, 2, 2), &full, &full, &zero).unwrap());
        assert!(gauge_in_stabilizer(&phi, &full, &full, &full).unwrap());
        let pc = SubbundleProj::coordinate(2, 2, &[1]);
        let mut escaping = FormValued::zero(2, 1, 2, 2, 2);
        escaping.set(&[0], PolyMatrix::from_ints(2, &[&[1, 0], &[0, 0]]));
        assert!(!gauge_in_stabilizer(&escaping, &full, &full, &pc).unwrap());
        assert!(!same_subbundle(&FormValued::zero(2, 1, 2, 2, 2), &escaping, &full, &full, &pc).unwrap());
        assert!(same_subbundle(&phi, &phi, &full, &full, &pc).unwrap());
    }

    #[test]
    fn stabilizer_is_a_group_and_orbits_are_classes() {
        let mut g = Gen::new(42);
        let pa = SubbundleProj::coordinate(2, 2, &[0]);
        let pb = SubbundleProj::full(2, 2);
        let pc = SubbundleProj::coordinate(2, 2, &[1]);
        // elements of the stabilizer: rows outside C vanish on e1
        let mut stab = || {
            let mut f = g.form(2, 1, 2, 2, 2);
            let mut b = f.get(&[0]).clone();
            b.set(0, 0, Poly::zero(2));
            b.set(0, 1, Poly::zero(2));
            f.set(&[0], b);
            f
        };
        let (s1, s2) = (stab(), stab());
        assert!(gauge_in_stabilizer(&s1, &pa, &pb, &pc).unwrap());
        assert!(gauge_in_stabilizer(&s1.checked_add(&s2).unwrap(), &pa, &pb, &pc).unwrap());
        assert!(gauge_in_stabilizer(&s1.neg(), &pa, &pb, &pc).unwrap());
        let mut g2 = Gen::new(43);
        let phi = g2.form(2, 1, 2, 2, 2);
        let psi = phi.checked_add(&s1).unwrap();
        let chi = psi.checked_add(&s2).unwrap();
        assert!(same_subbundle(&phi, &psi, &pa, &pb, &pc).unwrap());
        assert!(same_subbundle(&psi, &phi, &pa, &pb, &pc).unwrap());
        assert!(same_subbundle(&phi, &chi, &pa, &pb, &pc).unwrap());
    }

    #[test]
    fn subrep_examples() {
        let a = plane();
        let flat = Rep2::double(&Connection::flat(a.clone(), 2)).unwrap();
        let full = SubbundleProj::full(2, 2);
        assert!(subrep_check(&flat, &full, &full).unwrap().passed());
        let c = SubbundleProj::coordinate(2, 2, &[1]);
        assert!(subrep_check(&flat, &c, &full).unwrap().passed());

        // ∇_{∂1} f1 = x2 f2
        let mut g = PolyMatrix::zeros(2, 2, 2);
        g.set(1, 0, Poly::var(2, 1));
        let curved = Rep2::double(&Connection::new(a, 2, vec![g, PolyMatrix::zeros(2, 2, 2)]).unwrap()).unwrap();
        let r = subrep_check(&curved, &SubbundleProj::coordinate(2, 2, &[0]), &full).unwrap();
        assert!(r.failing("connection0"), "{r}");
    }
}
