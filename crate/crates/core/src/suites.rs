//! Seeded randomized suites. Each instance runs two independent
//! computations of the same statement; a suite passes when they never
//! disagree and every instance with a known answer gets it.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebroid::{BaseChart, Connection, FormValued, LieAlgebroid};
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{rat, Poly};
use crate::random::Gen;
use crate::rep2::{gauge_iso, tm_connection, Rep2};
use crate::report::Comparison;
use crate::subgeom::{
    connection_to_spencer, gauge_in_stabilizer, ideal_system_check, im_prop_check, involutivity_check, same_subbundle, spencer_to_connection,
    LinearDistribution, SubbundleProj,
};
use crate::vbalg::{
    bialgebroid_check, frame_lemma_inputs, im2form_check, jacobi_oracle, lemma_check, poisson_dual_extract, theorem_main_check, BialgebroidData, IM2Form,
    VBMorphismData,
};

pub const SUITES: &[&str] = &[
    "rep_oracle",
    "adjoint",
    "theorem_main",
    "lemmas",
    "dual_poisson",
    "gauge",
    "spencer",
    "involutivity",
    "im_prop",
    "im2form",
    "bialgebroid",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteOutcome {
    pub suite: String,
    pub instances: usize,
    /// Instances on which both computations report a pass.
    pub passes: usize,
    pub violations: Vec<String>,
}

impl SuiteOutcome {
    fn new(suite: &str) -> Self {
        SuiteOutcome {
            suite: suite.to_string(),
            ..Default::default()
        }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails(&self) -> usize {
        self.instances - self.passes
    }

    fn record(&mut self, passed: bool) {
        self.instances += 1;
        self.passes += passed as usize;
    }

    fn compare(&mut self, c: &Comparison) {
        if !c.agree() {
            self.violations.push(format!("instance {}: {}", self.instances + 1, c));
        }
        self.record(c.v1.passed() && c.v2.passed());
    }

    fn require(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            let msg = what();
            self.violations.push(format!("instance {}: {}", self.instances + 1, msg));
        }
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, {} pass, {} fail, {} violations",
            self.suite,
            self.instances,
            self.passes,
            self.fails(),
            self.violations.len()
        )?;
        for v in self.violations.iter().take(3) {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

pub fn run_suite(name: &str, seed: u64, count: usize) -> Result<SuiteOutcome> {
    let mut g = Gen::new(seed);
    let mut out = SuiteOutcome::new(name);
    match name {
        "rep_oracle" => rep_oracle(&mut g, count, &mut out)?,
        "adjoint" => adjoint(&mut g, count, &mut out)?,
        "theorem_main" => theorem_main(&mut g, count, &mut out)?,
        "lemmas" => lemmas(&mut g, count, &mut out)?,
        "dual_poisson" => dual_poisson(&mut g, count, &mut out)?,
        "gauge" => gauge(&mut g, count, &mut out)?,
        "spencer" => spencer(&mut g, count, &mut out)?,
        "involutivity" => involutivity(&mut g, count, &mut out)?,
        "im_prop" => im_prop(&mut g, count, &mut out)?,
        "im2form" => im2form(&mut g, count, &mut out)?,
        "bialgebroid" => bialgebroid(&mut g, count, &mut out)?,
        _ => return Err(Error::Invalid(format!("unknown suite '{name}' (known: {})", SUITES.join(", ")))),
    }
    Ok(out)
}

fn rep_oracle(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
        let r = g.rep_shaped();
        out.compare(&jacobi_oracle(&r)?);
    }
    Ok(())
}

/// The structure operators of a representation.
pub const OPERATORS: [&str; 4] = ["boundary", "nabla0", "nabla1", "k"];

/// Adds a nonzero perturbation to one structure operator.
pub fn mutate_operator(g: &mut Gen, rep: &Rep2, op: &str) -> Result<Rep2> {
    let a = rep.algebroid().clone();
    let n = a.dim();
    let bump = |g: &mut Gen, c: &Connection| -> Result<Connection> {
        let mut gamma = c.christoffels().to_vec();
        let i = g.below(gamma.len().max(1));
        gamma[i] = &gamma[i] + &g.nonzero_matrix(c.rank(), c.rank(), n);
        Connection::new(a.clone(), c.rank(), gamma)
    };
    match op {
        "boundary" => rep.with_boundary(rep.boundary() + &g.nonzero_matrix(rep.rank1(), rep.rank0(), n)),
        "nabla0" => rep.with_connections(bump(g, rep.nabla0())?, rep.nabla1().clone()),
        "nabla1" => rep.with_connections(rep.nabla0().clone(), bump(g, rep.nabla1())?),
        "k" => rep.with_k(rep.k().checked_add(&g.nonzero_form(a.rank(), 2, rep.rank0(), rep.rank1(), n))?),
        _ => Err(Error::Invalid(format!("unknown operator '{op}'"))),
    }
}

/// One mutation per structure operator, applied to a passing
/// representation and to its dual. Returns `(label, comparison)` pairs.
pub fn rep_mutations(seed: u64) -> Result<Vec<(String, Comparison)>> {
    let mut g = Gen::new(seed);
    // a curved double over the plane: ∂ = id and K = −R ≠ 0
    let base = loop {
        let r = Rep2::double(&g.tm_connection(&BaseChart::standard(2), 2))?;
        if !r.k().is_zero() {
            break r;
        }
    };
    let mut out = Vec::new();
    for (dir, rep) in [("rep", base.clone()), ("dual", base.dual())] {
        for op in OPERATORS {
            let m = mutate_operator(&mut g, &rep, op)?;
            out.push((format!("{dir}.{op}"), jacobi_oracle(&m)?));
        }
    }
    Ok(out)
}

fn adjoint(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
        let a = g.algebroid();
        let nab = g.tm_connection(a.chart(), a.rank());
        let ad = Rep2::adjoint(a, &nab)?;
        let rep = ad.verify();
        out.require(rep.passed(), || format!("adjoint representation fails: {rep}"));
        out.compare(&jacobi_oracle(&ad)?);
    }
    Ok(())
}

/// Family of the differential oracle matching each family of the
/// algebroid-plus-representation-morphism check.
pub fn oracle_family(v1_family: &str) -> Option<&'static str> {
    Some(match v1_family {
        "base.anchor" => "anchor",
        "base.bracket" => "bracket",
        "rep.chain_map" => "chain_map",
        "rep.connection0" => "core_connection",
        "rep.connection1" => "hor_connection",
        "rep.homotopy" => "homotopy",
        _ => return None,
    })
}

/// Whether the failing families of V1 map exactly onto those of V2.
pub fn classification_matches(c: &Comparison) -> bool {
    let mapped: Option<BTreeSet<&str>> = c.v1.families().iter().map(|f| oracle_family(f)).collect();
    let v2 = c.v2.families();
    mapped.is_some_and(|m| m.len() == v2.len() && m.iter().all(|f| v2.contains(*f)))
}

/// A gauge morphism `rep.gauge(Φ) → rep` as VB-morphism data.
pub fn gauge_morphism(g: &mut Gen) -> Result<(VBMorphismData, Rep2, Rep2)> {
    let r = g.passing_rep();
    let phi = g.gauge(&r);
    let mut f = VBMorphismData::identity(&r);
    f.phi = phi.clone();
    Ok((f, r.gauge(&phi)?, r))
}

/// Perturbs a single field of `f` until the result is no longer a
/// morphism. Returns the field name, or `None` if every attempt kept it one.
pub fn perturb_field(g: &mut Gen, f: &VBMorphismData, v: &Rep2, w: &Rep2) -> Result<Option<(&'static str, VBMorphismData)>> {
    let n = v.algebroid().dim();
    for _ in 0..12 {
        let mut h = f.clone();
        let field = match g.below(4) {
            0 if h.fver.rows() * h.fver.cols() > 0 => {
                h.fver = &h.fver + &g.nonzero_matrix(h.fver.rows(), h.fver.cols(), 0).extend_vars(n);
                "fver"
            }
            1 if h.fhor.rows() * h.fhor.cols() > 0 => {
                h.fhor = &h.fhor + &g.nonzero_matrix(h.fhor.rows(), h.fhor.cols(), n);
                "fhor"
            }
            2 if h.fc.rows() * h.fc.cols() > 0 => {
                h.fc = &h.fc + &g.nonzero_matrix(h.fc.rows(), h.fc.cols(), n);
                "fc"
            }
            _ => {
                let (r0, r1) = h.phi.coeff_shape();
                if h.phi.rank() == 0 || r0 * r1 == 0 {
                    continue;
                }
                h.phi = h.phi.checked_add(&g.nonzero_form(h.phi.rank(), 1, r0, r1, n))?;
                "phi"
            }
        };
        if !theorem_main_check(&h, v, w)?.v1.passed() {
            return Ok(Some((field, h)));
        }
    }
    Ok(None)
}

fn theorem_main(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for i in 0..count {
        match i % 3 {
            0 => {
                let (f, v, w) = gauge_morphism(g)?;
                let c = theorem_main_check(&f, &v, &w)?;
                out.require(c.v1.passed() && c.v2.passed(), || format!("gauge morphism fails: {c}"));
                out.compare(&c);
            }
            1 => {
                let (f, v, w) = gauge_morphism(g)?;
                let Some((field, h)) = perturb_field(g, &f, &v, &w)? else {
                    out.record(true);
                    continue;
                };
                let c = theorem_main_check(&h, &v, &w)?;
                out.require(classification_matches(&c), || format!("perturbing {field} classified differently: {c}"));
                out.compare(&c);
            }
            _ => {
                let r = g.passing_rep();
                let a = r.algebroid().clone();
                let n = a.dim();
                let mut f = VBMorphismData::identity(&r);
                match g.below(4) {
                    0 => f.phi = g.gauge(&r),
                    1 if a.rank() > 0 => f.fver = g.constant_matrix(a.rank(), a.rank()).extend_vars(n),
                    1 | 2 => f.fhor = g.matrix(r.rank1(), r.rank1(), n),
                    _ => f.fc = g.constant_matrix(r.rank0(), r.rank0()).extend_vars(n),
                }
                let target = if g.coin(0.5) { r.gauge(&f.phi)? } else { r.clone() };
                out.compare(&theorem_main_check(&f, &r, &target)?);
            }
        }
    }
    Ok(())
}

fn lemmas(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
        let r = if g.coin(0.5) { g.passing_rep() } else { g.rep_shaped() };
        let rep = lemma_check(&r, &frame_lemma_inputs(&r))?;
        out.require(rep.passed(), || format!("closed forms disagree: {rep}"));
        out.record(rep.passed());
    }
    Ok(())
}

fn dual_poisson(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
        let r = g.passing_rep();
        let same = poisson_dual_extract(&r)? == r.dual();
        out.require(same, || "extracted dual differs from the dual representation".into());
        out.record(same);
    }
    Ok(())
}

fn gauge(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
        let r = if g.coin(0.5) { g.passing_rep() } else { g.rep_shaped() };
        let (phi, psi) = (g.gauge(&r), g.gauge(&r));
        let once = r.gauge(&phi)?;
        let before = r.verify().passed();
        out.require(before == once.verify().passed(), || "gauge transformation changed the verdict".into());
        out.require(once.gauge(&psi)? == r.gauge(&phi.checked_add(&psi)?)?, || "gauge action is not additive".into());
        let iso = gauge_iso(&r, &phi)?.verify()?;
        out.require(iso.passed(), || format!("gauge isomorphism fails: {iso}"));
        out.record(before);
    }
    Ok(())
}

/// `Φ_m = p_C φ_m + Σ_l (1 − p_Δ)_{lm} θ_l`, an element of the stabilizer
/// of `(Δ_M, B, C)`.
pub fn stabilizer_element(g: &mut Gen, delta: &SubbundleProj, core: &SubbundleProj) -> FormValued {
    let (n, k) = (delta.ambient(), core.ambient());
    let phi = g.form(n, 1, k, k, n);
    let theta = g.form(n, 1, k, k, n);
    let qd = delta.complement();
    let blocks = (0..n)
        .map(|m| {
            let off = (0..n).fold(PolyMatrix::zeros(k, k, n), |acc, l| &acc + &theta.get(&[l]).scale_poly(qd.get(l, m)));
            &(core.matrix() * phi.get(&[m])) + &off
        })
        .collect();
    FormValued::one_form(blocks, k, k, n).expect("block shapes")
}

/// `Δ_M = span(∂1 + x1∂2)` in the plane.
pub fn tilted_line() -> SubbundleProj {
    SubbundleProj::new(PolyMatrix::from_fn(2, 2, 2, |i, j| match (i, j) {
        (0, 0) => Poly::one(2),
        (1, 0) => Poly::var(2, 0),
        _ => Poly::zero(2),
    }))
    .expect("idempotent")
}

fn plane_pairs() -> Vec<(SubbundleProj, SubbundleProj)> {
    vec![
        (SubbundleProj::full(2, 2), SubbundleProj::zero(2, 2)),
        (SubbundleProj::full(2, 2), SubbundleProj::coordinate(2, 2, &[1])),
        (tilted_line(), SubbundleProj::coordinate(2, 2, &[1])),
        (SubbundleProj::coordinate(2, 2, &[1]), SubbundleProj::coordinate(2, 2, &[0])),
        (SubbundleProj::zero(2, 2), SubbundleProj::full(2, 2)),
    ]
}

fn spencer(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    let chart = BaseChart::standard(2);
    let pairs = plane_pairs();
    let full = SubbundleProj::full(2, 2);
    for _ in 0..count {
        let (delta, core) = pairs[g.below(pairs.len())].clone();
        let nab = g.tm_connection(&chart, 2);
        let op = connection_to_spencer(&nab, &delta, &core)?;
        // a splitting of the quotient: 1 − p_C plus anything landing in C
        let s = &core.complement() + &(core.matrix() * &g.matrix(2, 2, 2));
        let back = spencer_to_connection(&op, &s)?;
        let op2 = connection_to_spencer(&back, &delta, &core)?;
        out.require(op2 == op, || "connection_to_spencer ∘ spencer_to_connection is not the identity".into());
        let diff = FormValued::one_form((0..2).map(|m| nab.christoffel(m) - back.christoffel(m)).collect(), 2, 2, 2)?;
        out.require(gauge_in_stabilizer(&diff, &delta, &full, &core)?, || {
            "adapted connections differ outside the stabilizer".into()
        });

        // same_subbundle is an equivalence relation
        let p1 = g.form(2, 1, 2, 2, 2);
        let p2 = p1.checked_add(&stabilizer_element(g, &delta, &core))?;
        let p3 = p2.checked_add(&stabilizer_element(g, &delta, &core))?;
        let q = g.form(2, 1, 2, 2, 2);
        let same = |a: &FormValued, b: &FormValued| same_subbundle(a, b, &delta, &full, &core);
        out.require(same(&p1, &p1)?, || "same_subbundle is not reflexive".into());
        out.require(same(&p1, &p2)? && same(&p2, &p1)? && same(&p2, &p3)? && same(&p1, &p3)?, || {
            "same_subbundle is not transitive".into()
        });
        out.require(same(&p1, &q)? == same(&q, &p1)?, || "same_subbundle is not symmetric".into());
        out.record(op2 == op);
    }
    Ok(())
}

fn involutivity(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    let chart = BaseChart::standard(2);
    let pairs = plane_pairs();
    let density = g.density;
    for _ in 0..count {
        let (delta, core) = pairs[g.below(pairs.len())].clone();
        g.density = 0.2;
        let nab = g.tm_connection(&chart, 2);
        g.density = density;
        out.compare(&involutivity_check(&LinearDistribution::new(delta, core, nab)?)?);
    }
    Ok(())
}

fn im_prop(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    let density = g.density;
    for _ in 0..count {
        let a = g.algebroid();
        let (n, k) = (a.dim(), a.rank());
        let delta = if n == 0 || g.coin(0.5) {
            SubbundleProj::full(n, n)
        } else {
            SubbundleProj::coordinate(n, n, &[g.below(n)])
        };
        let core = match g.below(3) {
            0 => SubbundleProj::zero(k, n),
            1 => SubbundleProj::full(k, n),
            _ => SubbundleProj::coordinate(k, n, &[g.below(k)]),
        };
        g.density = 0.25;
        let nab = g.tm_connection(a.chart(), k);
        g.density = density;
        let d = LinearDistribution::new(delta.clone(), core.clone(), nab.clone())?;
        let c = im_prop_check(a.clone(), &d)?;

        let shift = stabilizer_element(g, &delta, &core);
        let nab2 = nab.shifted(&(0..n).map(|m| shift.get(&[m]).clone()).collect::<Vec<_>>());
        let d2 = LinearDistribution::new(delta.clone(), core.clone(), nab2.clone())?;
        let c2 = im_prop_check(a.clone(), &d2)?;
        out.require(c.v1.passed() == c2.v1.passed(), || "verdict depends on the adapted connection".into());
        let r1 = ideal_system_check(a.clone(), &nab, &delta, &core)?;
        let r2 = ideal_system_check(a.clone(), &nab2, &delta, &core)?;
        out.require(r1.passed() == r2.passed(), || "ideal-system verdict depends on the adapted connection".into());
        out.require(!r1.conditions_pass() || r1.passed(), || {
            "quotient connection of an ideal system is not flat".into()
        });
        out.compare(&c);
    }
    Ok(())
}

fn im2form(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
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
        out.compare(&im2form_check(a, &nab, &form)?);
    }
    Ok(())
}

/// Structure constants in the frame `f_i = Σ g_pi e_p` for unit upper
/// triangular `g`, scaled by `scale`.
pub fn change_basis(alg: &LieAlgebroid, g: &PolyMatrix, scale: i64) -> Result<LieAlgebroid> {
    let k = alg.rank();
    let nil = &PolyMatrix::identity(k, 0) - g;
    let mut inv = PolyMatrix::identity(k, 0);
    let mut pow = PolyMatrix::identity(k, 0);
    for _ in 1..k {
        pow = &pow * &nil;
        inv = &inv + &pow;
    }
    let mut upper = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let br = alg.bracket(&g.column(i), &g.column(j))?;
            upper.push(((i, j), inv.mul_vec(&br).into_iter().map(|p| p.scale_int(scale)).collect()));
        }
    }
    LieAlgebroid::new(alg.chart().clone(), PolyMatrix::zeros(0, k, 0), upper)
}

/// Constant-structure Lie algebra pairs over a point, in random frames.
pub fn random_lie_algebra(g: &mut Gen) -> Result<LieAlgebroid> {
    let pool = [
        LieAlgebroid::so3(),
        LieAlgebroid::sl2(),
        LieAlgebroid::heisenberg(),
        LieAlgebroid::lie_algebra(3, &[])?,
        LieAlgebroid::lie_algebra(3, &[((0, 1), vec![rat(0), rat(1), rat(0)]), ((0, 2), vec![rat(0), rat(0), rat(1)])])?,
    ];
    let base = &pool[g.below(pool.len())];
    let frame = PolyMatrix::from_fn(3, 3, 0, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Poly::one(0),
        std::cmp::Ordering::Less if g.coin(0.5) => Poly::from_int(0, g.below(3) as i64 - 1),
        _ => Poly::zero(0),
    });
    let scale = g.below(2) as i64 + 1;
    change_basis(base, &frame, scale)
}

pub fn over_point(a: LieAlgebroid, b: LieAlgebroid) -> Result<BialgebroidData> {
    let a = Arc::new(a);
    let nab = tm_connection(a.chart(), a.rank(), vec![])?;
    BialgebroidData::new(a, Arc::new(b), nab)
}

fn bialgebroid(g: &mut Gen, count: usize, out: &mut SuiteOutcome) -> Result<()> {
    for _ in 0..count {
        let a = random_lie_algebra(g)?;
        let b = random_lie_algebra(g)?;
        out.compare(&bialgebroid_check(&over_point(a, b)?)?);
    }
    Ok(())
}
