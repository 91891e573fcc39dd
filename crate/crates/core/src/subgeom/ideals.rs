use std::sync::Arc;

use super::spencer::{frobenius, quotient_curvature};
use super::{subrep_check, subrep_check_on, LinearDistribution, SpencerOp, SubbundleProj};
use crate::algebroid::{vector_field_bracket, Connection, LieAlgebroid, Section};
use crate::error::{dim_err, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::rep2::Rep2;
use crate::report::{Comparison, Report};

fn check_on(alg: &LieAlgebroid, d: &LinearDistribution) -> Result<()> {
    if d.chart() != alg.chart() || d.nabla.rank() != alg.rank() || d.delta.ambient() != alg.dim() {
        return Err(dim_err("linear distribution", "the distribution must live on the bundle of A"));
    }
    Ok(())
}

fn add(a: &[Poly], b: &[Poly]) -> Section {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

fn sub(a: &[Poly], b: &[Poly]) -> Section {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

struct Ops<'a> {
    alg: &'a LieAlgebroid,
    nabla: &'a Connection,
    pi: PolyMatrix,
}

impl Ops<'_> {
    fn nab(&self, x: &[Poly], a: &[Poly]) -> Section {
        self.nabla.apply(x, a).expect("shapes checked")
    }

    fn proj(&self, s: &[Poly]) -> Section {
        self.pi.mul_vec(s)
    }

    /// `𝔻_x(a) = π∇_x a`.
    fn spencer(&self, x: &[Poly], a: &[Poly]) -> Section {
        self.proj(&self.nab(x, a))
    }

    fn bracket(&self, a: &[Poly], b: &[Poly]) -> Section {
        self.alg.bracket(a, b).expect("shapes checked")
    }

    /// `∇̂^bas_a π(s) = π([a, s] + ∇_{ρ(s)}a)`.
    fn basic_hat(&self, a: &[Poly], s: &[Poly]) -> Section {
        self.proj(&add(&self.bracket(a, s), &self.nab(&self.alg.anchor_field(s), a)))
    }
}

/// The identity `𝔻_x[a, b] = ∇̂^bas_a 𝔻_x b − ∇̂^bas_b 𝔻_x a + π(∇_{[ρb, x]}a − ∇_{[ρa, x]}b)`
/// on frame pairs of `A` and generators of `Δ_M`.
pub fn spencer_bracket_residuals(alg: &LieAlgebroid, d: &LinearDistribution) -> Result<Report> {
    check_on(alg, d)?;
    let o = Ops {
        alg,
        nabla: &d.nabla,
        pi: d.core.complement(),
    };
    let gens = d.generators();
    let mut rep = Report::new("spencer_bracket");
    for i in 0..alg.rank() {
        for l in i + 1..alg.rank() {
            let (a, b) = (alg.frame(i), alg.frame(l));
            let (ra, rb) = (alg.anchor_field(&a), alg.anchor_field(&b));
            for (j, x) in gens.iter().enumerate() {
                let lhs = o.spencer(x, &o.bracket(&a, &b));
                let t1 = o.basic_hat(&a, &o.spencer(x, &b));
                let t2 = o.basic_hat(&b, &o.spencer(x, &a));
                let t3 = o.proj(&sub(&o.nab(&vector_field_bracket(&rb, x), &a), &o.nab(&vector_field_bracket(&ra, x), &b)));
                let res = sub(&sub(&add(&lhs, &t2), &t1), &t3);
                rep.push_vec("spencer_bracket", &[i, l, j], &res, alg.dim());
            }
        }
    }
    Ok(rep)
}

/// V1: `ρ(C) ⊂ Δ_M`, both invariance identities and the bracket identity
/// for the Spencer operator. V2: `C[0] ⊕ Δ_M[1]` is a subrepresentation of
/// the adjoint representation.
pub fn im_prop_check(alg: Arc<LieAlgebroid>, d: &LinearDistribution) -> Result<Comparison> {
    check_on(&alg, d)?;
    let n = alg.dim();
    let o = Ops {
        alg: &alg,
        nabla: &d.nabla,
        pi: d.core.complement(),
    };
    let qd = d.delta.complement();
    let mut v1 = Report::new("im_prop");
    v1.push("anchor_core", &[], &(&qd * alg.anchor()) * d.core.matrix());
    let cores = d.core.generators();
    let gens = d.generators();
    for i in 0..alg.rank() {
        let a = alg.frame(i);
        for (beta, c) in cores.iter().enumerate() {
            let rc = d.delta.matrix().mul_vec(&alg.anchor_field(c));
            let res = add(&o.spencer(&rc, &a), &o.proj(&o.bracket(&a, c)));
            v1.push_vec("invariance_core", &[i, beta], &res, n);
        }
        for (j, x) in gens.iter().enumerate() {
            let lifted = alg.anchor_field(&o.spencer(x, &a));
            let res = qd.mul_vec(&add(&lifted, &vector_field_bracket(&alg.anchor_field(&a), x)));
            v1.push_vec("invariance_side", &[i, j], &res, n);
        }
    }
    v1.absorb("", spencer_bracket_residuals(&alg, d)?);

    let ad = Rep2::adjoint(alg, &d.nabla)?;
    let v2 = subrep_check(&ad, &d.core, &d.delta)?;
    Ok(Comparison::new("im_prop", v1, v2))
}

/// The quotient connection `∇̂_x π(a) = π(∇_x a)` along `Δ_M`, as a Spencer
/// operator, with its curvature on generator pairs.
#[derive(Clone, Debug)]
pub struct QuotientConnection {
    pub spencer: SpencerOp,
    pub flatness: Report,
}

#[derive(Clone, Debug)]
pub struct IdealSystemReport {
    pub integrable: Report,
    pub adjoint_subrep: Report,
    pub double_subrep: Report,
    /// Present only when the three conditions pass.
    pub quotient: Option<QuotientConnection>,
}

impl IdealSystemReport {
    pub fn conditions_pass(&self) -> bool {
        self.integrable.passed() && self.adjoint_subrep.passed() && self.double_subrep.passed()
    }

    pub fn passed(&self) -> bool {
        self.conditions_pass() && self.quotient.as_ref().is_some_and(|q| q.flatness.passed())
    }

    pub fn as_report(&self) -> Report {
        let mut r = Report::new("ideal_system");
        r.absorb("integrable", self.integrable.clone());
        r.absorb("adjoint", self.adjoint_subrep.clone());
        r.absorb("double", self.double_subrep.clone());
        if let Some(q) = &self.quotient {
            r.absorb("quotient", q.flatness.clone());
        }
        r
    }
}

/// Integrability of `Δ_M`, `C[0] ⊕ Δ_M[1] ⊂ ad_∇(A)` and
/// `C[0] ⊕ A[1] ⊂ D_∇(A)` restricted to `Δ_M`, all with one connection.
pub fn ideal_system_check(alg: Arc<LieAlgebroid>, nabla: &Connection, delta: &SubbundleProj, core: &SubbundleProj) -> Result<IdealSystemReport> {
    let d = LinearDistribution::new(delta.clone(), core.clone(), nabla.clone())?;
    check_on(&alg, &d)?;
    let integrable = frobenius(delta);
    let adjoint_subrep = subrep_check(&Rep2::adjoint(alg.clone(), nabla)?, core, delta)?;
    let double = Rep2::double(nabla)?;
    let double_subrep = subrep_check_on(&double, core, &SubbundleProj::full(alg.rank(), alg.dim()), &d.generators())?;
    let mut out = IdealSystemReport {
        integrable,
        adjoint_subrep,
        double_subrep,
        quotient: None,
    };
    if out.conditions_pass() {
        let spencer = d.spencer();
        let flatness = quotient_curvature(&spencer);
        out.quotient = Some(QuotientConnection { spencer, flatness });
    }
    Ok(out)
}
