use std::sync::Arc;

use super::{FormValued, LieAlgebroid, Section};
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;

/// Anything that differentiates matrix-valued sections along frame
/// elements of an algebroid. Koszul differentials are built on this.
pub trait FrameDerivation {
    fn algebroid(&self) -> &LieAlgebroid;
    /// Row count of the coefficient matrices this derivation acts on.
    fn coeff_rows(&self) -> usize;
    /// Column count, when it is fixed (Hom bundles); plain connections act
    /// column by column on any width.
    fn coeff_cols(&self) -> Option<usize> {
        None
    }
    fn derive_frame(&self, i: usize, m: &PolyMatrix) -> PolyMatrix;
}

/// An A-connection on a trivial bundle of rank `r`, stored by Christoffel
/// blocks: `∇_{e_i} f_α = Σ_β Γ[i]_{βα} f_β`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    alg: Arc<LieAlgebroid>,
    rank: usize,
    gamma: Vec<PolyMatrix>,
}

impl Connection {
    pub fn new(alg: Arc<LieAlgebroid>, rank: usize, gamma: Vec<PolyMatrix>) -> Result<Self> {
        if gamma.len() != alg.rank() {
            return Err(dim_err(
                "connection",
                format!("expected {} Christoffel blocks, found {}", alg.rank(), gamma.len()),
            ));
        }
        for (i, g) in gamma.iter().enumerate() {
            if g.shape() != (rank, rank) {
                return Err(dim_err(
                    "connection",
                    format!("block {} is {}x{}, expected {}x{}", i + 1, g.rows(), g.cols(), rank, rank),
                ));
            }
            if g.nvars() != alg.dim() {
                return Err(Error::ChartMismatch {
                    expected: alg.dim(),
                    found: g.nvars(),
                });
            }
        }
        Ok(Connection { alg, rank, gamma })
    }

    pub fn flat(alg: Arc<LieAlgebroid>, rank: usize) -> Self {
        let n = alg.dim();
        let gamma = vec![PolyMatrix::zeros(rank, rank, n); alg.rank()];
        Connection { alg, rank, gamma }
    }

    pub fn algebroid_arc(&self) -> &Arc<LieAlgebroid> {
        &self.alg
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn christoffel(&self, i: usize) -> &PolyMatrix {
        &self.gamma[i]
    }

    pub fn christoffels(&self) -> &[PolyMatrix] {
        &self.gamma
    }

    fn nvars(&self) -> usize {
        self.alg.dim()
    }

    /// `∇_{e_i} s` for a section `s`.
    pub fn apply_frame(&self, i: usize, s: &[Poly]) -> Section {
        let col = PolyMatrix::column_vector(s, self.nvars());
        self.derive_frame(i, &col).column(0)
    }

    /// `∇_a s`, the Leibniz extension of the Christoffel data.
    pub fn apply(&self, a: &[Poly], s: &[Poly]) -> Result<Section> {
        if a.len() != self.alg.rank() || s.len() != self.rank {
            return Err(dim_err(
                "connection_apply",
                format!(
                    "section lengths {} and {} do not match ranks {} and {}",
                    a.len(),
                    s.len(),
                    self.alg.rank(),
                    self.rank
                ),
            ));
        }
        if let Some(p) = a.iter().chain(s).find(|p| p.nvars() != self.nvars()) {
            return Err(Error::ChartMismatch {
                expected: self.nvars(),
                found: p.nvars(),
            });
        }
        let mut out = vec![Poly::zero(self.nvars()); self.rank];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.apply_frame(i, s)) {
                *o += &(ai * &v);
            }
        }
        Ok(out)
    }

    /// `R(e_i, e_j) = ρ_i(Γ_j) − ρ_j(Γ_i) + Γ_iΓ_j − Γ_jΓ_i − Σ_q c_ij^q Γ_q`.
    pub fn curvature_frame(&self, i: usize, j: usize) -> PolyMatrix {
        let alg = &self.alg;
        let gi = &self.gamma[i];
        let gj = &self.gamma[j];
        let mut r = &gj.derive_along(&alg.anchor().column(i)) - &gi.derive_along(&alg.anchor().column(j));
        r = &r + &(&(gi * gj) - &(gj * gi));
        for (q, c) in alg.structure(i, j).iter().enumerate() {
            if !c.is_zero() {
                r = &r - &self.gamma[q].scale_poly(c);
            }
        }
        r
    }

    pub fn curvature(&self) -> FormValued {
        FormValued::from_fn(self.alg.rank(), 2, self.rank, self.rank, self.nvars(), |t| self.curvature_frame(t[0], t[1]))
    }

    /// The dual connection on `E*`: `Γ*[i] = −Γ[i]ᵀ`.
    pub fn dual(&self) -> Connection {
        Connection {
            alg: self.alg.clone(),
            rank: self.rank,
            gamma: self.gamma.iter().map(|g| -g.transpose()).collect(),
        }
    }

    /// Pullback along an algebroid morphism `T: A → A′` (this connection
    /// lives on `A′`): `∇^T_a = ∇_{Ta}`.
    pub fn pullback(&self, t: &PolyMatrix, a: Arc<LieAlgebroid>) -> Result<Connection> {
        if t.shape() != (self.alg.rank(), a.rank()) {
            return Err(dim_err(
                "pullback",
                format!("base map is {}x{}, expected {}x{}", t.rows(), t.cols(), self.alg.rank(), a.rank()),
            ));
        }
        let n = self.nvars();
        let gamma = (0..a.rank())
            .map(|i| {
                let mut g = PolyMatrix::zeros(self.rank, self.rank, n);
                for q in 0..self.alg.rank() {
                    let tq = t.get(q, i);
                    if !tq.is_zero() {
                        g = &g + &self.gamma[q].scale_poly(tq);
                    }
                }
                g
            })
            .collect();
        Connection::new(a, self.rank, gamma)
    }

    /// `∇ + θ` for an End-valued 1-form given by its frame blocks.
    pub fn shifted(&self, theta: &[PolyMatrix]) -> Connection {
        Connection {
            alg: self.alg.clone(),
            rank: self.rank,
            gamma: self.gamma.iter().zip(theta).map(|(g, t)| g + t).collect(),
        }
    }
}

impl FrameDerivation for Connection {
    fn algebroid(&self) -> &LieAlgebroid {
        &self.alg
    }

    fn coeff_rows(&self) -> usize {
        self.rank
    }

    fn derive_frame(&self, i: usize, m: &PolyMatrix) -> PolyMatrix {
        let d = m.derive_along(&self.alg.anchor().column(i));
        &d + &(&self.gamma[i] * m)
    }
}

/// The connection on `Hom(V, W)` induced by connections on `V` and `W`:
/// `(∇φ)(v) = ∇^W(φv) − φ(∇^V v)`.
#[derive(Clone, Debug)]
pub struct HomConnection<'a> {
    pub source: &'a Connection,
    pub target: &'a Connection,
}

impl<'a> HomConnection<'a> {
    pub fn new(source: &'a Connection, target: &'a Connection) -> Self {
        debug_assert_eq!(source.alg.rank(), target.alg.rank());
        HomConnection { source, target }
    }
}

impl FrameDerivation for HomConnection<'_> {
    fn algebroid(&self) -> &LieAlgebroid {
        &self.source.alg
    }

    fn coeff_rows(&self) -> usize {
        self.target.rank
    }

    fn coeff_cols(&self) -> Option<usize> {
        Some(self.source.rank)
    }

    fn derive_frame(&self, i: usize, m: &PolyMatrix) -> PolyMatrix {
        let d = m.derive_along(&self.source.alg.anchor().column(i));
        &(&d + &(&self.target.gamma[i] * m)) - &(m * &self.source.gamma[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{koszul_d, BaseChart};

    fn plane() -> Arc<LieAlgebroid> {
        Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)))
    }

    /// Rank-2 connection over ℝ² with ∇_{∂1} f1 = x2 f2, all else zero.
    pub(crate) fn skew_example() -> Connection {
        let a = plane();
        let mut g1 = PolyMatrix::zeros(2, 2, 2);
        g1.set(1, 0, Poly::var(2, 1));
        Connection::new(a, 2, vec![g1, PolyMatrix::zeros(2, 2, 2)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let flat = Connection::flat(plane(), 2);
        let dx1 = vec![Poly::one(2), Poly::zero(2)];
        let s = vec![Poly::var(2, 0), Poly::zero(2)];
        assert_eq!(flat.apply(&dx1, &s).unwrap(), vec![Poly::one(2), Poly::zero(2)]);

        let nab = skew_example();
        let f1 = vec![Poly::one(2), Poly::zero(2)];
        assert_eq!(nab.apply(&dx1, &f1).unwrap(), vec![Poly::zero(2), Poly::var(2, 1)]);
        let x1dx1 = vec![Poly::var(2, 0), Poly::zero(2)];
        assert_eq!(nab.apply(&x1dx1, &f1).unwrap(), vec![Poly::zero(2), &Poly::var(2, 0) * &Poly::var(2, 1)]);
        assert!(nab.apply(&dx1, &[Poly::one(2)]).is_err());
    }

    #[test]
    fn curvature_examples() {
        assert!(Connection::flat(plane(), 2).curvature().is_zero());
        let r = skew_example().curvature_frame(0, 1);
        assert_eq!(r, PolyMatrix::from_ints(2, &[&[0, 0], &[-1, 0]]));

        let so3 = Arc::new(LieAlgebroid::so3());
        let ad = Connection::new(
            so3.clone(),
            3,
            (0..3).map(|i| PolyMatrix::from_fn(3, 3, 0, |l, m| so3.structure(i, m)[l].clone())).collect(),
        )
        .unwrap();
        assert!(ad.curvature().is_zero());
    }

    #[test]
    fn dual_examples() {
        let nab = skew_example();
        let d = nab.dual();
        // ∇*_{∂1} f²* = −x2 f¹*
        assert_eq!(d.apply_frame(0, &[Poly::zero(2), Poly::one(2)]), vec![-Poly::var(2, 1), Poly::zero(2)]);
        assert_eq!(d.dual(), nab);
        assert_eq!(Connection::flat(plane(), 3).dual(), Connection::flat(plane(), 3));
    }

    #[test]
    fn koszul_of_a_section_is_the_connection() {
        let nab = skew_example();
        let f1 = PolyMatrix::from_ints(2, &[&[1], &[0]]);
        let w = FormValued::from_fn(2, 0, 2, 1, 2, |_| f1.clone());
        let dw = koszul_d(&nab, &w).unwrap();
        assert_eq!(dw.get(&[0]).column(0), vec![Poly::zero(2), Poly::var(2, 1)]);
        assert!(dw.get(&[1]).is_zero());
    }
}
