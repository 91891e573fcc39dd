//! 2-term representations up to homotopy `(∂, ∇⁰, ∇¹, K)` of a Lie
//! algebroid on `C_[0] ⊕ B_[1]`, together with their standard constructions.

mod morphism;

use std::sync::Arc;

pub use morphism::{compose, gauge_iso, RepMorphism};

use crate::algebroid::{koszul_d, BaseChart, Connection, FormValued, FrameDerivation, HomConnection, LieAlgebroid, Section};
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::report::Report;

/// Sign with which `K` enters the curvature identities
/// `R_{∇⁰} + s·K∘∂ = 0` and `R_{∇¹} + s·∂∘K = 0`. With `+1` the double
/// representation `K = −R_∇` is a representation, and the Jacobi identity
/// of the total algebroid agrees with these residuals.
pub const K_SIGN: i64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Rep2 {
    alg: Arc<LieAlgebroid>,
    boundary: PolyMatrix,
    nabla0: Connection,
    nabla1: Connection,
    k: FormValued,
}

/// A gauge tensor `Φ ∈ Ω¹(A; Hom(V₁, V₀))`, stored as a 1-form with
/// `rank V₀ × rank V₁` blocks.
pub type GaugeTensor = FormValued;

impl Rep2 {
    /// `boundary` is `∂: V₀ → V₁` (rank V₁ × rank V₀) and `k` is a 2-form
    /// with `rank V₀ × rank V₁` coefficients.
    pub fn new(alg: Arc<LieAlgebroid>, boundary: PolyMatrix, nabla0: Connection, nabla1: Connection, k: FormValued) -> Result<Self> {
        let (r0, r1) = (nabla0.rank(), nabla1.rank());
        if boundary.shape() != (r1, r0) {
            return Err(dim_err("rep2", format!("∂ is {}x{}, expected {}x{}", boundary.rows(), boundary.cols(), r1, r0)));
        }
        if boundary.nvars() != alg.dim() {
            return Err(Error::ChartMismatch {
                expected: alg.dim(),
                found: boundary.nvars(),
            });
        }
        if **nabla0.algebroid_arc() != *alg || **nabla1.algebroid_arc() != *alg {
            return Err(Error::Invalid("connections are not along the representation's algebroid".into()));
        }
        if k.rank() != alg.rank() || k.degree() != 2 || k.coeff_shape() != (r0, r1) {
            return Err(dim_err("rep2", format!("K must be a 2-form with {}x{} coefficients", r0, r1)));
        }
        Ok(Rep2 {
            alg,
            boundary,
            nabla0,
            nabla1,
            k,
        })
    }

    pub fn algebroid(&self) -> &Arc<LieAlgebroid> {
        &self.alg
    }

    pub fn rank0(&self) -> usize {
        self.nabla0.rank()
    }

    pub fn rank1(&self) -> usize {
        self.nabla1.rank()
    }

    pub fn boundary(&self) -> &PolyMatrix {
        &self.boundary
    }

    pub fn nabla0(&self) -> &Connection {
        &self.nabla0
    }

    pub fn nabla1(&self) -> &Connection {
        &self.nabla1
    }

    pub fn k(&self) -> &FormValued {
        &self.k
    }

    fn nvars(&self) -> usize {
        self.alg.dim()
    }

    pub fn with_boundary(&self, boundary: PolyMatrix) -> Result<Self> {
        Self::new(self.alg.clone(), boundary, self.nabla0.clone(), self.nabla1.clone(), self.k.clone())
    }

    pub fn with_connections(&self, nabla0: Connection, nabla1: Connection) -> Result<Self> {
        Self::new(self.alg.clone(), self.boundary.clone(), nabla0, nabla1, self.k.clone())
    }

    pub fn with_k(&self, k: FormValued) -> Result<Self> {
        Self::new(self.alg.clone(), self.boundary.clone(), self.nabla0.clone(), self.nabla1.clone(), k)
    }

    /// Connection on `Hom(V₁, V₀)` used for `d K` and for gauge tensors.
    pub fn hom10(&self) -> HomConnection<'_> {
        HomConnection::new(&self.nabla1, &self.nabla0)
    }

    /// The four structure identities, evaluated on frames:
    /// `chain` ∂∇⁰ − ∇¹∂, `curvature0` R⁰ + K∂, `curvature1` R¹ + ∂K and
    /// `bianchi` d_{∇Hom}K.
    pub fn verify(&self) -> Report {
        let mut rep = Report::new("verify_rep2");
        let k = self.alg.rank();
        let hom01 = HomConnection::new(&self.nabla0, &self.nabla1);
        for i in 0..k {
            rep.push("chain", &[i], -hom01.derive_frame(i, &self.boundary));
        }
        let sign = crate::poly::rat(K_SIGN);
        for i in 0..k {
            for j in i + 1..k {
                let kij = self.k.get(&[i, j]).scale(&sign);
                rep.push("curvature0", &[i, j], &self.nabla0.curvature_frame(i, j) + &(&kij * &self.boundary));
                rep.push("curvature1", &[i, j], &self.nabla1.curvature_frame(i, j) + &(&self.boundary * &kij));
            }
        }
        let dk = koszul_d(&self.hom10(), &self.k).expect("K has the Hom(V1, V0) shape");
        for (t, m) in dk.components() {
            rep.push("bianchi", t, m.clone());
        }
        rep
    }

    /// Double representation of the tangent algebroid on `B`:
    /// `∂ = id`, `∇⁰ = ∇¹ = ∇`, `K = −R_∇`.
    pub fn double(nabla: &Connection) -> Result<Self> {
        let alg = nabla.algebroid_arc().clone();
        if !alg.is_tangent() {
            return Err(Error::Precondition(
                "the double representation needs a connection along the tangent algebroid".into(),
            ));
        }
        let r = nabla.rank();
        let k = nabla.curvature().neg();
        Self::new(alg.clone(), PolyMatrix::identity(r, alg.dim()), nabla.clone(), nabla.clone(), k)
    }

    /// Adjoint representation on `A_[0] ⊕ TM_[1]` from a TM-connection on
    /// the bundle of `A`, via the basic connections and basic curvature.
    pub fn adjoint(alg: Arc<LieAlgebroid>, nabla: &Connection) -> Result<Self> {
        let tm = nabla.algebroid_arc();
        if !tm.is_tangent() || tm.chart() != alg.chart() {
            return Err(Error::Precondition("the adjoint representation needs a TM-connection on the chart of A".into()));
        }
        if nabla.rank() != alg.rank() {
            return Err(dim_err(
                "adjoint",
                format!("connection has rank {}, algebroid has rank {}", nabla.rank(), alg.rank()),
            ));
        }
        let (n, k) = (alg.dim(), alg.rank());
        let rho = alg.anchor();

        // Γ⁰[i]_{lm} = c_im^l + Σ_j ρ_jm Γ[j]_{li}
        let gamma0 = (0..k)
            .map(|i| {
                PolyMatrix::from_fn(k, k, n, |l, m| {
                    let mut v = alg.structure(i, m)[l].clone();
                    for j in 0..n {
                        v += &(rho.get(j, m) * nabla.christoffel(j).get(l, i));
                    }
                    v
                })
            })
            .collect();
        // Γ¹[i]_{jm} = −∂_m ρ_ji + Σ_l ρ_jl Γ[m]_{li}
        let gamma1 = (0..k)
            .map(|i| {
                PolyMatrix::from_fn(n, n, n, |j, m| {
                    let mut v = -rho.get(j, i).partial(m).expect("index in chart");
                    for l in 0..k {
                        v += &(rho.get(j, l) * nabla.christoffel(m).get(l, i));
                    }
                    v
                })
            })
            .collect();
        let nabla0 = Connection::new(alg.clone(), k, gamma0)?;
        let nabla1 = Connection::new(alg.clone(), n, gamma1)?;

        let basic = |a: &[Poly], x: &[Poly]| -> Vec<Poly> {
            let ra = alg.anchor_field(a);
            let mut v = crate::algebroid::vector_field_bracket(&ra, x);
            let nab_x_a = nabla.apply(x, a).expect("shapes checked");
            for (vj, w) in v.iter_mut().zip(alg.anchor_field(&nab_x_a)) {
                *vj += &w;
            }
            v
        };
        let tm_frame = |m: usize| -> Section { tm.frame(m) };
        let kform = FormValued::from_fn(k, 2, k, n, n, |t| {
            let (a, b) = (alg.frame(t[0]), alg.frame(t[1]));
            let ab = alg.bracket_unchecked(&a, &b);
            let mut cols = Vec::with_capacity(n);
            for m in 0..n {
                let x = tm_frame(m);
                let nxa = nabla.apply(&x, &a).unwrap();
                let nxb = nabla.apply(&x, &b).unwrap();
                let mut v = nabla.apply(&x, &ab).unwrap();
                let t2 = alg.bracket_unchecked(&nxa, &b);
                let t3 = alg.bracket_unchecked(&a, &nxb);
                let t4 = nabla.apply(&basic(&a, &x), &b).unwrap();
                let t5 = nabla.apply(&basic(&b, &x), &a).unwrap();
                for l in 0..k {
                    v[l] = &(&(&(&v[l] - &t2[l]) - &t3[l]) + &t4[l]) - &t5[l];
                }
                cols.push(v);
            }
            PolyMatrix::from_fn(k, n, n, |l, m| cols[m][l].clone())
        });
        Self::new(alg.clone(), rho.clone(), nabla0, nabla1, kform)
    }

    /// The dual representation on `V₁* ⊕ V₀*`: `∂ᵀ`, dual connections
    /// (degrees swapped) and `−Kᵀ`.
    pub fn dual(&self) -> Rep2 {
        let k = self.k.map(self.rank1(), self.rank0(), |m| -m.transpose());
        Rep2 {
            alg: self.alg.clone(),
            boundary: self.boundary.transpose(),
            nabla0: self.nabla1.dual(),
            nabla1: self.nabla0.dual(),
            k,
        }
    }

    /// Pullback along an algebroid morphism `T: A → A′` (this rep lives on A′).
    pub fn pullback(&self, t: &PolyMatrix, a: Arc<LieAlgebroid>) -> Result<Rep2> {
        let check = crate::algebroid::algebroid_morphism_check(t, &a, &self.alg)?;
        if !check.passed() {
            return Err(Error::Precondition(format!("base map is not an algebroid morphism: {check}")));
        }
        self.pullback_unchecked(t, a)
    }

    /// Pullback without the morphism check, for oracles that must report
    /// residuals even when the base map is bad.
    pub(crate) fn pullback_unchecked(&self, t: &PolyMatrix, a: Arc<LieAlgebroid>) -> Result<Rep2> {
        let nabla0 = self.nabla0.pullback(t, a.clone())?;
        let nabla1 = self.nabla1.pullback(t, a.clone())?;
        let k = self.k.pullback(t)?;
        Rep2::new(a, self.boundary.clone(), nabla0, nabla1, k)
    }

    /// Change of decomposition by `Φ`:
    /// `∇̃⁰ = ∇⁰ − Φ∂`, `∇̃¹ = ∇¹ − ∂Φ`,
    /// `K̃(a,b) = K(a,b) + d_{∇Hom}Φ(a,b) + Φ_b∂Φ_a − Φ_a∂Φ_b`.
    pub fn gauge(&self, phi: &GaugeTensor) -> Result<Rep2> {
        self.check_gauge(phi)?;
        let k = self.alg.rank();
        let theta0: Vec<PolyMatrix> = (0..k).map(|i| -(phi.get(&[i]) * &self.boundary)).collect();
        let theta1: Vec<PolyMatrix> = (0..k).map(|i| -(&self.boundary * phi.get(&[i]))).collect();
        let dphi = koszul_d(&self.hom10(), phi)?;
        let kt = FormValued::from_fn(k, 2, self.rank0(), self.rank1(), self.nvars(), |t| {
            let (pa, pb) = (phi.get(&[t[0]]), phi.get(&[t[1]]));
            let quad = &(&(pb * &self.boundary) * pa) - &(&(pa * &self.boundary) * pb);
            &(self.k.get(t) + dphi.get(t)) + &quad
        });
        Rep2::new(
            self.alg.clone(),
            self.boundary.clone(),
            self.nabla0.shifted(&theta0),
            self.nabla1.shifted(&theta1),
            kt,
        )
    }

    pub fn check_gauge(&self, phi: &GaugeTensor) -> Result<()> {
        if phi.rank() != self.alg.rank() || phi.degree() != 1 || phi.coeff_shape() != (self.rank0(), self.rank1()) || phi.nvars() != self.nvars() {
            return Err(dim_err(
                "gauge tensor",
                format!("expected a 1-form with {}x{} coefficients", self.rank0(), self.rank1()),
            ));
        }
        Ok(())
    }

    pub fn zero_gauge(&self) -> GaugeTensor {
        FormValued::zero(self.alg.rank(), 1, self.rank0(), self.rank1(), self.nvars())
    }
}

/// The TM-connection of a given rank with the supplied Christoffel blocks
/// on the chart.
pub fn tm_connection(chart: &BaseChart, rank: usize, gamma: Vec<PolyMatrix>) -> Result<Connection> {
    Connection::new(Arc::new(LieAlgebroid::tangent(chart.clone())), rank, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn plane() -> Arc<LieAlgebroid> {
        Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)))
    }

    fn skew() -> Connection {
        let mut g1 = PolyMatrix::zeros(2, 2, 2);
        g1.set(1, 0, Poly::var(2, 1));
        Connection::new(plane(), 2, vec![g1, PolyMatrix::zeros(2, 2, 2)]).unwrap()
    }

    #[test]
    fn flat_double_passes() {
        let r = Rep2::double(&Connection::flat(plane(), 2)).unwrap();
        assert!(r.k().is_zero());
        assert_eq!(r.boundary(), &PolyMatrix::identity(2, 2));
        assert!(r.verify().passed());
    }

    #[test]
    fn curved_double_has_k_minus_r() {
        let r = Rep2::double(&skew()).unwrap();
        // K(∂1,∂2) f1 = +f2
        assert_eq!(r.k().get(&[0, 1]), &PolyMatrix::from_ints(2, &[&[0, 0], &[1, 0]]));
        assert!(r.verify().passed(), "{}", r.verify());
    }

    #[test]
    fn double_needs_tangent_algebroid() {
        let nab = Connection::flat(Arc::new(LieAlgebroid::so3()), 1);
        assert!(Rep2::double(&nab).is_err());
    }

    #[test]
    fn so3_adjoint_is_ad() {
        let so3 = Arc::new(LieAlgebroid::so3());
        let nab = tm_connection(so3.chart(), 3, vec![]).unwrap();
        let ad = Rep2::adjoint(so3.clone(), &nab).unwrap();
        assert_eq!(ad.rank1(), 0);
        assert!(ad.k().is_zero());
        // ∇⁰_{e1} e2 = [e1, e2] = e3
        assert_eq!(ad.nabla0().apply_frame(0, &so3.frame(1)), so3.frame(2));
        assert!(ad.verify().passed());
    }

    #[test]
    fn tangent_adjoint_is_trivial() {
        let a = plane();
        let nab = Connection::flat(a.clone(), 2);
        let ad = Rep2::adjoint(a, &nab).unwrap();
        assert_eq!(ad.boundary(), &PolyMatrix::identity(2, 2));
        assert!(ad.nabla0().christoffels().iter().all(PolyMatrix::is_zero));
        assert!(ad.nabla1().christoffels().iter().all(PolyMatrix::is_zero));
        assert!(ad.k().is_zero());
    }

    #[test]
    fn adjoint_with_curved_connection_passes() {
        let line = Arc::new(LieAlgebroid::action_line());
        let g = PolyMatrix::from_fn(1, 1, 1, |_, _| &Poly::var(1, 0).pow(2) + &Poly::one(1));
        let nab = tm_connection(line.chart(), 1, vec![g]).unwrap();
        let ad = Rep2::adjoint(line, &nab).unwrap();
        assert!(ad.verify().passed(), "{}", ad.verify());

        let a = plane();
        let ad = Rep2::adjoint(a.clone(), &skew()).unwrap();
        assert!(ad.verify().passed(), "{}", ad.verify());
    }

    #[test]
    fn mutated_k_fails() {
        let r = Rep2::double(&Connection::flat(plane(), 2)).unwrap();
        let mut k = r.k().clone();
        k.set(&[0, 1], PolyMatrix::from_ints(2, &[&[1, 0], &[0, 0]]));
        let bad = r.with_k(k).unwrap().verify();
        assert!(bad.failing("curvature0") || bad.failing("bianchi"));
    }

    #[test]
    fn dual_examples() {
        let r = Rep2::double(&skew()).unwrap();
        assert_eq!(r.dual().dual(), r);
        assert!(r.dual().verify().passed());
        let a = plane();
        let co = Rep2::adjoint(a.clone(), &Connection::flat(a, 2)).unwrap().dual();
        assert_eq!(co.boundary(), &PolyMatrix::identity(2, 2));
        assert!(co.k().is_zero());
    }

    #[test]
    fn gauge_examples() {
        let r = Rep2::double(&Connection::flat(plane(), 2)).unwrap();
        assert_eq!(r.gauge(&r.zero_gauge()).unwrap(), r);
        let mut phi = r.zero_gauge();
        phi.set(&[0], PolyMatrix::from_ints(2, &[&[1, 0], &[0, 0]]));
        let g = r.gauge(&phi).unwrap();
        assert!(g.verify().passed(), "{}", g.verify());
        // K̃(∂1,∂2) = −∇_{∂2}Φ_1 + Φ_2∂Φ_1 − Φ_1∂Φ_2 = 0 for constant Φ_1, Φ_2 = 0
        assert!(g.k().is_zero());
        let mut psi = r.zero_gauge();
        psi.set(
            &[1],
            PolyMatrix::from_fn(2, 2, 2, |i, j| if i == 0 && j == 1 { Poly::var(2, 0) } else { Poly::zero(2) }),
        );
        let two = g.gauge(&psi).unwrap();
        assert_eq!(two, r.gauge(&phi.checked_add(&psi).unwrap()).unwrap());
        assert!(!r.gauge(&psi).unwrap().k().is_zero());
        let _ = rat(0);
    }

    #[test]
    fn pullback_along_identity_and_inclusion() {
        let a = plane();
        let r = Rep2::double(&skew()).unwrap();
        assert_eq!(r.pullback(&PolyMatrix::identity(2, 2), a.clone()).unwrap(), r);

        // restriction of so(3)'s adjoint to the abelian subalgebra span(e3)
        let so3 = Arc::new(LieAlgebroid::so3());
        let ad = Rep2::adjoint(so3.clone(), &tm_connection(so3.chart(), 3, vec![]).unwrap()).unwrap();
        let sub = Arc::new(LieAlgebroid::lie_algebra(1, &[]).unwrap());
        let t = PolyMatrix::from_ints(0, &[&[0], &[0], &[1]]);
        let p = ad.pullback(&t, sub).unwrap();
        assert_eq!(p.nabla0().christoffel(0), ad.nabla0().christoffel(2));
        assert!(p.verify().passed());

        let bad = PolyMatrix::from_ints(0, &[&[1, 0], &[0, 1], &[0, 0]]);
        let ab2 = Arc::new(LieAlgebroid::lie_algebra(2, &[]).unwrap());
        assert!(ad.pullback(&bad, ab2).is_err());
    }
}
