use super::{subrep_check_on, SubbundleProj};
use crate::algebroid::{vector_field_bracket, BaseChart, Connection, Section};
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::rep2::{tm_connection, Rep2};
use crate::report::{Comparison, Report};

/// Spencer operator `𝔻: Γ(B) → Γ(Δ_M* ⊗ B/C)` of a linear distribution,
/// stored by its values on the frame of `B` along the generators
/// `x_j = p_Δ ∂_j`. The quotient `B/C` is modelled by `im(1 − p_C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpencerOp {
    pub chart: BaseChart,
    pub delta: SubbundleProj,
    pub core: SubbundleProj,
    comps: Vec<PolyMatrix>,
}

impl SpencerOp {
    /// Checks that the components take values in `B/C` and are
    /// `C∞`-linear in `x`, i.e. vanish on relations among the generators.
    pub fn new(chart: BaseChart, delta: SubbundleProj, core: SubbundleProj, comps: Vec<PolyMatrix>) -> Result<Self> {
        let (n, r) = (chart.dim(), core.ambient());
        if delta.ambient() != n || comps.len() != n || comps.iter().any(|m| m.shape() != (r, r)) {
            return Err(dim_err("spencer", format!("expected {n} components of shape {r}x{r}")));
        }
        for (j, d) in comps.iter().enumerate() {
            if !(core.matrix() * d).is_zero() {
                return Err(Error::Invalid(format!("component {} leaves the quotient", j + 1)));
            }
        }
        let q = delta.complement();
        for m in 0..n {
            let mut acc = PolyMatrix::zeros(r, r, n);
            for (j, d) in comps.iter().enumerate() {
                if !q.get(j, m).is_zero() {
                    acc = &acc + &d.scale_poly(q.get(j, m));
                }
            }
            if !acc.is_zero() {
                return Err(Error::Invalid("components are not C∞-linear along Δ_M".into()));
            }
        }
        Ok(SpencerOp { chart, delta, core, comps })
    }

    pub fn components(&self) -> &[PolyMatrix] {
        &self.comps
    }

    /// Generator `x_j = p_Δ ∂_j`.
    pub fn generator(&self, j: usize) -> Vec<Poly> {
        self.delta.matrix().column(j)
    }

    /// `𝔻_y(s) = Σ_m y′_m D_m s + (1 − p_C)(y′·s)` with `y′ = p_Δ y`.
    pub fn apply(&self, y: &[Poly], s: &[Poly]) -> Section {
        let n = self.chart.dim();
        let yp = self.delta.matrix().mul_vec(y);
        let mut d = PolyMatrix::zeros(self.core.ambient(), self.core.ambient(), n);
        for (m, ym) in yp.iter().enumerate() {
            if !ym.is_zero() {
                d = &d + &self.comps[m].scale_poly(ym);
            }
        }
        let deriv: Vec<Poly> = s.iter().map(|p| p.derive_along(&yp)).collect();
        let a = d.mul_vec(s);
        let b = self.core.complement().mul_vec(&deriv);
        a.iter().zip(&b).map(|(p, q)| p + q).collect()
    }

    /// `𝔻_y` applied to every column of `m`.
    pub fn apply_columns(&self, y: &[Poly], m: &PolyMatrix) -> PolyMatrix {
        let cols: Vec<Section> = (0..m.cols()).map(|j| self.apply(y, &m.column(j))).collect();
        PolyMatrix::from_fn(m.rows(), m.cols(), m.nvars(), |i, j| cols[j][i].clone())
    }
}

/// `𝔻_{x_j} = (1 − p_C)∇_{x_j}` on the frame of `B`.
pub fn connection_to_spencer(nabla: &Connection, delta: &SubbundleProj, core: &SubbundleProj) -> Result<SpencerOp> {
    let alg = nabla.algebroid_arc();
    if !alg.is_tangent() || delta.ambient() != alg.dim() || core.ambient() != nabla.rank() {
        return Err(dim_err("spencer", "expected a TM-connection matching the projections"));
    }
    let n = alg.dim();
    let q = core.complement();
    let comps = (0..n)
        .map(|j| {
            let mut acc = PolyMatrix::zeros(nabla.rank(), nabla.rank(), n);
            for m in 0..n {
                let c = delta.matrix().get(m, j);
                if !c.is_zero() {
                    acc = &acc + &nabla.christoffel(m).scale_poly(c);
                }
            }
            &q * &acc
        })
        .collect();
    SpencerOp::new(alg.chart().clone(), delta.clone(), core.clone(), comps)
}

/// A connection whose Spencer operator is `op`: `Γ[m] = s(1 − p_C)D_m`.
/// `s` must split the quotient, `(1 − p_C)s(1 − p_C) = 1 − p_C`.
pub fn spencer_to_connection(op: &SpencerOp, s: &PolyMatrix) -> Result<Connection> {
    let q = op.core.complement();
    if s.shape() != q.shape() || &(&q * s) * &q != q {
        return Err(Error::Invalid("s does not split the quotient projection".into()));
    }
    let lift = s * &q;
    let gamma = op.comps.iter().map(|d| &lift * d).collect();
    tm_connection(&op.chart, op.core.ambient(), gamma)
}

/// A linear distribution on `B`, given by `Δ_M`, its core `C` and an
/// adapted `TM`-connection on `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDistribution {
    pub delta: SubbundleProj,
    pub core: SubbundleProj,
    pub nabla: Connection,
}

impl LinearDistribution {
    pub fn new(delta: SubbundleProj, core: SubbundleProj, nabla: Connection) -> Result<Self> {
        connection_to_spencer(&nabla, &delta, &core)?;
        Ok(LinearDistribution { delta, core, nabla })
    }

    pub fn spencer(&self) -> SpencerOp {
        connection_to_spencer(&self.nabla, &self.delta, &self.core).expect("validated at construction")
    }

    pub fn chart(&self) -> &BaseChart {
        self.nabla.algebroid_arc().chart()
    }

    pub fn generators(&self) -> Vec<Section> {
        self.delta.generators()
    }
}

/// `(1 − p_Δ)[x_i, x_j]` on generator pairs.
pub(crate) fn frobenius(delta: &SubbundleProj) -> Report {
    let gens = delta.generators();
    let q = delta.complement();
    let n = delta.ambient();
    let mut rep = Report::new("frobenius");
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            rep.push_vec("frobenius", &[i, j], &q.mul_vec(&vector_field_bracket(&gens[i], &gens[j])), n);
        }
    }
    rep
}

/// Curvature of the quotient connection along generator pairs, applied to
/// the frame of `B`.
pub(crate) fn quotient_curvature(op: &SpencerOp) -> Report {
    let n = op.chart.dim();
    let r = op.core.ambient();
    let id = PolyMatrix::identity(r, n);
    let mut rep = Report::new("quotient_curvature");
    for i in 0..n {
        for j in i + 1..n {
            let (xi, xj) = (op.generator(i), op.generator(j));
            let a = op.apply_columns(&xi, &op.apply_columns(&xj, &id));
            let b = op.apply_columns(&xj, &op.apply_columns(&xi, &id));
            let c = op.apply_columns(&vector_field_bracket(&xi, &xj), &id);
            rep.push("quotient_curvature", &[i, j], &(&a - &b) - &c);
        }
    }
    rep
}

/// V1: Frobenius for `Δ_M`, `𝔻|_C = 0` and flatness of the quotient
/// connection. V2: Frobenius and the subrepresentation `C[0] ⊕ B[1]` of the
/// double representation restricted to `Δ_M`.
pub fn involutivity_check(d: &LinearDistribution) -> Result<Comparison> {
    let op = d.spencer();
    let n = op.chart.dim();
    let mut v1 = Report::new("involutivity");
    v1.absorb("", frobenius(&d.delta));
    for j in 0..n {
        v1.push("spencer_core", &[j], op.apply_columns(&op.generator(j), d.core.matrix()));
    }
    v1.absorb("", quotient_curvature(&op));

    let double = Rep2::double(&d.nabla)?;
    let mut v2 = Report::new("double_subrep");
    v2.absorb("", frobenius(&d.delta));
    v2.absorb(
        "",
        subrep_check_on(&double, &d.core, &SubbundleProj::full(d.core.ambient(), n), &d.generators())?,
    );
    Ok(Comparison::new("involutivity", v1, v2))
}
