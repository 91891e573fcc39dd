use std::sync::Arc;

use super::{GaugeTensor, Rep2};
use crate::algebroid::{algebroid_morphism_check, koszul_d, FormValued, FrameDerivation, HomConnection};
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::report::Report;

/// A morphism `(φ₀, φ₁, Φ)` from a representation of `A` to one of `A′`,
/// covering the algebroid morphism `T: A → A′`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepMorphism {
    pub source: Rep2,
    pub target: Rep2,
    pub base: PolyMatrix,
    pub phi0: PolyMatrix,
    pub phi1: PolyMatrix,
    /// 1-form over the source algebroid with `rank W₀ × rank V₁` blocks.
    pub homotopy: FormValued,
}

impl RepMorphism {
    pub fn new(source: Rep2, target: Rep2, base: PolyMatrix, phi0: PolyMatrix, phi1: PolyMatrix, homotopy: FormValued) -> Result<Self> {
        let a = source.algebroid();
        let b = target.algebroid();
        if base.shape() != (b.rank(), a.rank()) {
            return Err(dim_err(
                "morphism",
                format!("base map is {}x{}, expected {}x{}", base.rows(), base.cols(), b.rank(), a.rank()),
            ));
        }
        if phi0.shape() != (target.rank0(), source.rank0()) || phi1.shape() != (target.rank1(), source.rank1()) {
            return Err(dim_err("morphism", "φ₀ or φ₁ has the wrong shape"));
        }
        if homotopy.rank() != a.rank() || homotopy.degree() != 1 || homotopy.coeff_shape() != (target.rank0(), source.rank1()) {
            return Err(dim_err(
                "morphism",
                format!("Φ must be a 1-form with {}x{} coefficients", target.rank0(), source.rank1()),
            ));
        }
        Ok(RepMorphism {
            source,
            target,
            base,
            phi0,
            phi1,
            homotopy,
        })
    }

    /// The identity morphism of `rep`.
    pub fn identity(rep: &Rep2) -> Self {
        let n = rep.algebroid().dim();
        let k = rep.algebroid().rank();
        RepMorphism {
            source: rep.clone(),
            target: rep.clone(),
            base: PolyMatrix::identity(k, n),
            phi0: PolyMatrix::identity(rep.rank0(), n),
            phi1: PolyMatrix::identity(rep.rank1(), n),
            homotopy: rep.zero_gauge(),
        }
    }

    /// Checks the chain-map, connection and homotopy identities with the
    /// target pulled back along the base map. Fails with an error when the
    /// base map is not an algebroid morphism.
    pub fn verify(&self) -> Result<Report> {
        let a = self.source.algebroid();
        let base_check = algebroid_morphism_check(&self.base, a, self.target.algebroid())?;
        if !base_check.passed() {
            return Err(Error::Precondition(format!("base map is not an algebroid morphism: {base_check}")));
        }
        let w = self.target.pullback(&self.base, Arc::clone(a))?;
        Ok(self.residuals(&w))
    }

    /// Residuals of the representation identities, computed even when the
    /// base map is not an algebroid morphism.
    pub(crate) fn residuals_unchecked(&self) -> Result<Report> {
        let w = self.target.pullback_unchecked(&self.base, Arc::clone(self.source.algebroid()))?;
        Ok(self.residuals(&w))
    }

    fn residuals(&self, w: &Rep2) -> Report {
        let v = &self.source;
        let mut rep = Report::new("verify_morphism");
        rep.push("chain_map", &[], &(&self.phi1 * v.boundary()) - &(w.boundary() * &self.phi0));

        let hom0 = HomConnection::new(v.nabla0(), w.nabla0());
        let hom1 = HomConnection::new(v.nabla1(), w.nabla1());
        for i in 0..v.algebroid().rank() {
            let phi_i = self.homotopy.get(&[i]);
            rep.push("connection0", &[i], &hom0.derive_frame(i, &self.phi0) - &(phi_i * v.boundary()));
            rep.push("connection1", &[i], &hom1.derive_frame(i, &self.phi1) - &(w.boundary() * phi_i));
        }

        let hom10 = HomConnection::new(v.nabla1(), w.nabla0());
        let d = koszul_d(&hom10, &self.homotopy).expect("Φ has the Hom(V1, W0) shape");
        for (t, m) in d.components() {
            let rhs = &(&self.phi0 * v.k().get(t)) - &(w.k().get(t) * &self.phi1);
            rep.push("homotopy", t, m - &rhs);
        }
        rep
    }
}

/// `(id, id, Φ)` as a morphism from `rep.gauge(Φ)` to `rep`.
///
/// With the transformation rules of [`Rep2::gauge`], the identity maps
/// together with `Φ` intertwine the gauged operators with the original ones
/// in this direction.
pub fn gauge_iso(rep: &Rep2, phi: &GaugeTensor) -> Result<RepMorphism> {
    let gauged = rep.gauge(phi)?;
    let n = rep.algebroid().dim();
    RepMorphism::new(
        gauged,
        rep.clone(),
        PolyMatrix::identity(rep.algebroid().rank(), n),
        PolyMatrix::identity(rep.rank0(), n),
        PolyMatrix::identity(rep.rank1(), n),
        phi.clone(),
    )
}

/// Composite `second ∘ first` as Ω(A)-linear maps:
/// `φ″ = φ′φ`, `Φ″_a = φ′₀Φ_a + Φ′_{Ta}φ₁`, `T″ = T′T`.
pub fn compose(first: &RepMorphism, second: &RepMorphism) -> Result<RepMorphism> {
    if first.target != second.source {
        return Err(Error::Invalid("morphisms are not composable".into()));
    }
    let pulled = second.homotopy.pullback(&first.base)?;
    let (r0, r1) = (second.target.rank0(), first.source.rank1());
    let n = first.source.algebroid().dim();
    let homotopy = FormValued::from_fn(first.source.algebroid().rank(), 1, r0, r1, n, |t| {
        &(&second.phi0 * first.homotopy.get(t)) + &(pulled.get(t) * &first.phi1)
    });
    RepMorphism::new(
        first.source.clone(),
        second.target.clone(),
        &second.base * &first.base,
        &second.phi0 * &first.phi0,
        &second.phi1 * &first.phi1,
        homotopy,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{BaseChart, Connection, LieAlgebroid};
    use crate::poly::Poly;

    fn double_flat() -> Rep2 {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        Rep2::double(&Connection::flat(a, 2)).unwrap()
    }

    #[test]
    fn identity_passes() {
        let r = double_flat();
        assert!(RepMorphism::identity(&r).verify().unwrap().passed());
    }

    #[test]
    fn gauge_iso_passes() {
        let r = double_flat();
        assert_eq!(gauge_iso(&r, &r.zero_gauge()).unwrap(), RepMorphism::identity(&r));
        let mut phi = r.zero_gauge();
        phi.set(
            &[0],
            PolyMatrix::from_fn(2, 2, 2, |i, j| if (i, j) == (0, 1) { Poly::var(2, 1) } else { Poly::zero(2) }),
        );
        phi.set(&[1], PolyMatrix::from_ints(2, &[&[0, 0], &[3, 0]]));
        let m = gauge_iso(&r, &phi).unwrap();
        assert!(m.verify().unwrap().passed(), "{}", m.verify().unwrap());
    }

    #[test]
    fn identity_to_mutated_k_fails_homotopy() {
        let r = double_flat();
        let mut k = r.k().clone();
        k.set(&[0, 1], PolyMatrix::from_ints(2, &[&[0, 1], &[0, 0]]));
        let mutated = r.with_k(k).unwrap();
        let mut m = RepMorphism::identity(&r);
        m.target = mutated;
        let rep = m.verify().unwrap();
        assert!(rep.failing("homotopy"));
        assert!(!rep.failing("chain_map"));
    }

    #[test]
    fn composition_of_gauge_isos() {
        let r = double_flat();
        let mut phi = r.zero_gauge();
        phi.set(&[0], PolyMatrix::from_ints(2, &[&[1, 2], &[0, 0]]));
        let mut psi = r.zero_gauge();
        psi.set(
            &[1],
            PolyMatrix::from_fn(2, 2, 2, |i, j| if (i, j) == (1, 0) { Poly::var(2, 0) } else { Poly::zero(2) }),
        );
        let rp = r.gauge(&phi).unwrap();
        let first = gauge_iso(&rp, &psi).unwrap();
        let second = gauge_iso(&r, &phi).unwrap();
        let c = compose(&first, &second).unwrap();
        assert!(c.verify().unwrap().passed(), "{}", c.verify().unwrap());
    }
}
