use std::sync::Arc;

use crate::algebroid::{koszul_d, BaseChart, Connection, FormValued, LieAlgebroid, Section};
use crate::error::Result;
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::rep2::Rep2;
use crate::report::{Comparison, Report};

/// The Lie algebroid `D = A ⊕ B ⊕ C → B` of a representation, on the chart
/// `(x_1..x_n, b_1..b_r)` with frame `h(e_1)..h(e_k), ĉ_1..ĉ_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalAlgebroid {
    pub alg: Arc<LieAlgebroid>,
    /// Base dimension, rank of A, rank of B, rank of C.
    pub n: usize,
    pub k: usize,
    pub rb: usize,
    pub rc: usize,
}

/// Coordinate names for the fibre of `B`, avoiding clashes with the base.
pub(crate) fn fibre_names(base: &BaseChart, prefix: &str, count: usize) -> Vec<String> {
    let mut p = prefix.to_string();
    loop {
        let names: Vec<String> = (1..=count).map(|i| format!("{p}{i}")).collect();
        if names.iter().all(|n| !base.names().contains(n)) {
            return names;
        }
        p.push('_');
    }
}

impl TotalAlgebroid {
    pub fn nvars(&self) -> usize {
        self.n + self.rb
    }

    pub fn rank(&self) -> usize {
        self.k + self.rc
    }

    /// Index of `h(e_i)` in the frame.
    pub fn h(&self, i: usize) -> usize {
        i
    }

    /// Index of `ĉ_α` in the frame.
    pub fn c(&self, alpha: usize) -> usize {
        self.k + alpha
    }

    /// The fibre coordinate `b_β` as a polynomial.
    pub fn b(&self, beta: usize) -> Poly {
        Poly::var(self.nvars(), self.n + beta)
    }

    /// Re-reads a base function on the total chart.
    pub fn lift(&self, p: &Poly) -> Poly {
        p.extend_vars(self.nvars())
    }

    pub fn lift_matrix(&self, m: &PolyMatrix) -> PolyMatrix {
        m.extend_vars(self.nvars())
    }

    /// `Σ_β m[·][β] b_β` for a matrix with `rank B` columns.
    pub fn contract_b(&self, m: &PolyMatrix) -> Vec<Poly> {
        let b: Vec<Poly> = (0..self.rb).map(|beta| self.b(beta)).collect();
        self.lift_matrix(m).mul_vec(&b)
    }

    /// Names of all chart variables.
    pub fn names(&self) -> &[String] {
        self.alg.chart().names()
    }

    /// Which frame block an index belongs to.
    pub fn kind(&self, idx: usize) -> char {
        if idx < self.k {
            'h'
        } else {
            'c'
        }
    }

    /// Flat rank-one connection: its Koszul differential is the algebroid
    /// differential of `D`.
    pub fn trivial_connection(&self) -> Connection {
        Connection::flat(self.alg.clone(), 1)
    }
}

/// Builds `D` from the structure operators:
/// `ρ_D(h(a)) = X_{∇¹_a}` (horizontal `ρ(a)` plus the vertical field
/// `−Σ Γ¹ b ∂_b`), `ρ_D(ĉ) = ∂(c)↑`, `[h(a), ĉ] = ∇⁰_a c`,
/// `[h(a₁), h(a₂)] = h([a₁, a₂]) + K̂(a₁, a₂)` with `K̂(a₁,a₂)(b) = K(a₁,a₂)b`.
pub fn build_total_algebroid(rep: &Rep2) -> Result<TotalAlgebroid> {
    let a = rep.algebroid();
    let (n, k, rb, rc) = (a.dim(), a.rank(), rep.rank1(), rep.rank0());
    let chart = a.chart().extended(fibre_names(a.chart(), "b", rb))?;
    let nv = n + rb;
    let shell = TotalAlgebroid {
        alg: Arc::new(LieAlgebroid::tangent(BaseChart::point())),
        n,
        k,
        rb,
        rc,
    };

    let mut anchor = PolyMatrix::zeros(nv, k + rc, nv);
    for i in 0..k {
        for j in 0..n {
            anchor.set(j, i, a.anchor().get(j, i).extend_vars(nv));
        }
        let vert = shell.contract_b(rep.nabla1().christoffel(i));
        for (gamma, v) in vert.into_iter().enumerate() {
            anchor.set(n + gamma, i, -v);
        }
    }
    for alpha in 0..rc {
        for beta in 0..rb {
            anchor.set(n + beta, k + alpha, rep.boundary().get(beta, alpha).extend_vars(nv));
        }
    }

    let mut upper: Vec<((usize, usize), Section)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut s = vec![Poly::zero(nv); k + rc];
            for (q, c) in a.structure(i, j).iter().enumerate() {
                s[q] = c.extend_vars(nv);
            }
            for (alpha, v) in shell.contract_b(rep.k().get(&[i, j])).into_iter().enumerate() {
                s[k + alpha] = v;
            }
            upper.push(((i, j), s));
        }
        for alpha in 0..rc {
            let g = rep.nabla0().christoffel(i);
            let mut s = vec![Poly::zero(nv); k + rc];
            for gamma in 0..rc {
                s[k + gamma] = g.get(gamma, alpha).extend_vars(nv);
            }
            upper.push(((i, k + alpha), s));
        }
    }
    let alg = LieAlgebroid::new(chart, anchor, upper)?;
    Ok(TotalAlgebroid { alg: Arc::new(alg), ..shell })
}

/// Verifies the total algebroid and the representation independently.
/// The verdicts agree exactly when representations up to homotopy and
/// VB-algebroid structures correspond.
pub fn jacobi_oracle(rep: &Rep2) -> Result<Comparison> {
    let total = build_total_algebroid(rep)?;
    let raw = total.alg.verify();
    let mut v2 = Report::new("total_algebroid");
    for mut r in raw.residuals {
        let kinds: String = r.indices.iter().map(|&i| total.kind(i)).collect();
        r.family = format!("{}[{}]", r.family, kinds);
        v2.residuals.push(r);
    }
    Ok(Comparison::new("jacobi_oracle", rep.verify(), v2))
}

/// The algebroid differential of `D` on scalar forms of degree ≤ 1.
pub fn total_differential(t: &TotalAlgebroid, w: &FormValued) -> Result<FormValued> {
    if w.degree() > 1 {
        return Err(crate::error::Error::Precondition("total_differential takes forms of degree ≤ 1".into()));
    }
    koszul_d(&t.trivial_connection(), w)
}

/// Scalar 1-form on `D` from its values on the frame.
pub fn scalar_one_form(t: &TotalAlgebroid, values: Vec<Poly>) -> FormValued {
    let nv = t.nvars();
    FormValued::from_fn(t.rank(), 1, 1, 1, nv, |tup| PolyMatrix::from_fn(1, 1, nv, |_, _| values[tup[0]].clone()))
}

pub fn scalar_function(t: &TotalAlgebroid, f: Poly) -> FormValued {
    let nv = t.nvars();
    FormValued::from_fn(t.rank(), 0, 1, 1, nv, |_| PolyMatrix::from_fn(1, 1, nv, |_, _| f.clone()))
}

/// Generators for the differential identities of `D`.
#[derive(Clone, Debug)]
pub enum LemmaInput {
    /// `f ∘ q_B` for a base function.
    BaseFunction(Poly),
    /// The linear function `ℓ_ψ` of `ψ ∈ Γ(B*)`.
    Linear(Vec<Poly>),
    /// The core section `ψ̂` of `ψ ∈ Γ(A*)`.
    Core(Vec<Poly>),
    /// The linear 1-form `(Q, 0)` of `Q ∈ Γ(A* ⊗ B*)`, as a `rank A × rank B` matrix.
    LinearForm(PolyMatrix),
    /// The 1-form `(0, γ)` of `γ ∈ Γ(C*)`.
    CoreDual(Vec<Poly>),
}

impl LemmaInput {
    pub fn name(&self) -> &'static str {
        match self {
            LemmaInput::BaseFunction(_) => "base_function",
            LemmaInput::Linear(_) => "linear_function",
            LemmaInput::Core(_) => "core_section",
            LemmaInput::LinearForm(_) => "linear_form",
            LemmaInput::CoreDual(_) => "core_form",
        }
    }
}

/// The form on `D` represented by a generator.
pub fn lemma_form(t: &TotalAlgebroid, input: &LemmaInput) -> FormValued {
    let nv = t.nvars();
    match input {
        LemmaInput::BaseFunction(f) => scalar_function(t, t.lift(f)),
        LemmaInput::Linear(psi) => {
            let mut l = Poly::zero(nv);
            for (beta, p) in psi.iter().enumerate() {
                l += &(&t.lift(p) * &t.b(beta));
            }
            scalar_function(t, l)
        }
        LemmaInput::Core(psi) => {
            let mut v: Vec<Poly> = psi.iter().map(|p| t.lift(p)).collect();
            v.resize(t.rank(), Poly::zero(nv));
            scalar_one_form(t, v)
        }
        LemmaInput::LinearForm(q) => {
            let mut v = t.contract_b(q);
            v.resize(t.rank(), Poly::zero(nv));
            scalar_one_form(t, v)
        }
        LemmaInput::CoreDual(gamma) => {
            let mut v = vec![Poly::zero(nv); t.k];
            v.extend(gamma.iter().map(|p| t.lift(p)));
            scalar_one_form(t, v)
        }
    }
}

/// The closed form of `d_D` on a generator, written with the structure
/// operators only (no bracket or anchor of `D` is used).
pub fn lemma_closed_form(rep: &Rep2, t: &TotalAlgebroid, input: &LemmaInput) -> Result<FormValued> {
    let a = rep.algebroid();
    let nv = t.nvars();
    let (k, rc) = (t.k, t.rc);
    let dual1 = rep.nabla1().dual();
    let dual0 = rep.nabla0().dual();
    let b: Vec<Poly> = (0..t.rb).map(|beta| t.b(beta)).collect();
    let pair_b = |v: &[Poly]| -> Poly {
        let mut acc = Poly::zero(nv);
        for (x, y) in v.iter().zip(&b) {
            acc += &(&t.lift(x) * y);
        }
        acc
    };
    let one = |p: Poly| PolyMatrix::from_fn(1, 1, nv, |_, _| p.clone());
    Ok(match input {
        LemmaInput::BaseFunction(f) => {
            let mut v: Vec<Poly> = (0..k).map(|i| t.lift(&a.anchor_frame(i, f))).collect();
            v.resize(t.rank(), Poly::zero(nv));
            scalar_one_form(t, v)
        }
        LemmaInput::Linear(psi) => {
            let mut v: Vec<Poly> = (0..k).map(|i| pair_b(&dual1.apply_frame(i, psi))).collect();
            let dt = rep.boundary().transpose().mul_vec(psi);
            v.extend(dt.iter().map(|p| t.lift(p)));
            scalar_one_form(t, v)
        }
        LemmaInput::Core(psi) => {
            let w = FormValued::from_fn(k, 1, 1, 1, a.dim(), |tup| PolyMatrix::from_fn(1, 1, a.dim(), |_, _| psi[tup[0]].clone()));
            let dpsi = koszul_d(&Connection::flat(a.clone(), 1), &w)?;
            FormValued::from_fn(t.rank(), 2, 1, 1, nv, |tup| {
                if tup[1] < k {
                    dpsi.get(tup).extend_vars(nv)
                } else {
                    PolyMatrix::zeros(1, 1, nv)
                }
            })
        }
        LemmaInput::LinearForm(q) => {
            // Q as a B*-valued 1-form on A: column i is Q(e_i).
            let qt = q.transpose();
            let w = FormValued::from_fn(k, 1, t.rb, 1, a.dim(), |tup| PolyMatrix::column_vector(&qt.column(tup[0]), a.dim()));
            let dq = koszul_d(&dual1, &w)?;
            let qd = q * rep.boundary();
            FormValued::from_fn(t.rank(), 2, 1, 1, nv, |tup| match (tup[0] < k, tup[1] < k) {
                (true, true) => one(pair_b(&dq.get(tup).column(0))),
                (true, false) => one(-t.lift(qd.get(tup[0], tup[1] - k))),
                _ => PolyMatrix::zeros(1, 1, nv),
            })
        }
        LemmaInput::CoreDual(gamma) => {
            FormValued::from_fn(t.rank(), 2, 1, 1, nv, |tup| match (tup[0] < k, tup[1] < k) {
                (true, true) => {
                    // −⟨γ, K(e_i, e_j) b⟩ = −⟨K*γ, b⟩
                    let kt = rep.k().get(tup).transpose().mul_vec(gamma);
                    one(-pair_b(&kt))
                }
                (true, false) => one(t.lift(&dual0.apply_frame(tup[0], gamma)[tup[1] - k])),
                _ => {
                    debug_assert!(rc > 0);
                    PolyMatrix::zeros(1, 1, nv)
                }
            })
        }
    })
}

/// Compares the generic differential of `D` with the closed forms on the
/// given generators; one residual family per identity.
pub fn lemma_check(rep: &Rep2, inputs: &[LemmaInput]) -> Result<Report> {
    let t = build_total_algebroid(rep)?;
    let mut out = Report::new("differential_lemmas");
    for (g, input) in inputs.iter().enumerate() {
        let generic = total_differential(&t, &lemma_form(&t, input))?;
        let closed = lemma_closed_form(rep, &t, input)?;
        let diff = generic.checked_sub(&closed)?;
        for (tup, m) in diff.components() {
            let mut idx = vec![g];
            idx.extend(tup);
            out.push(input.name(), &idx, m.clone());
        }
    }
    Ok(out)
}

/// Frame generators of every kind: coordinate functions, unit covectors and
/// elementary matrices.
pub fn frame_lemma_inputs(rep: &Rep2) -> Vec<LemmaInput> {
    let a = rep.algebroid();
    let n = a.dim();
    let unit = |len: usize, i: usize| -> Vec<Poly> { (0..len).map(|j| if i == j { Poly::one(n) } else { Poly::zero(n) }).collect() };
    let mut out = Vec::new();
    for j in 0..n {
        out.push(LemmaInput::BaseFunction(Poly::var(n, j)));
    }
    for beta in 0..rep.rank1() {
        out.push(LemmaInput::Linear(unit(rep.rank1(), beta)));
    }
    for i in 0..a.rank() {
        out.push(LemmaInput::Core(unit(a.rank(), i)));
    }
    for i in 0..a.rank() {
        for beta in 0..rep.rank1() {
            let mut q = PolyMatrix::zeros(a.rank(), rep.rank1(), n);
            q.set(i, beta, Poly::one(n));
            out.push(LemmaInput::LinearForm(q));
        }
    }
    for alpha in 0..rep.rank0() {
        out.push(LemmaInput::CoreDual(unit(rep.rank0(), alpha)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep2::tm_connection;

    fn plane_double_flat() -> Rep2 {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        Rep2::double(&Connection::flat(a, 2)).unwrap()
    }

    #[test]
    fn flat_double_gives_tangent_of_total_space() {
        let t = build_total_algebroid(&plane_double_flat()).unwrap();
        assert_eq!(t.alg.anchor(), &PolyMatrix::identity(4, 4));
        assert!(t.alg.upper_brackets().is_empty());
        assert_eq!(t.names(), &["x1", "x2", "b1", "b2"]);
    }

    #[test]
    fn so3_adjoint_gives_semidirect_product() {
        let so3 = Arc::new(LieAlgebroid::so3());
        let ad = Rep2::adjoint(so3.clone(), &tm_connection(so3.chart(), 3, vec![]).unwrap()).unwrap();
        let t = build_total_algebroid(&ad).unwrap();
        assert_eq!(t.rank(), 6);
        assert!(t.alg.anchor().is_zero());
        // [h1, h2] = h3, [h1, ĉ2] = ĉ3
        assert_eq!(t.alg.structure(0, 1)[2], Poly::one(0));
        assert_eq!(t.alg.structure(0, 4)[5], Poly::one(0));
        assert!(t.alg.structure(3, 4).iter().all(Poly::is_zero));
        let cmp = jacobi_oracle(&ad).unwrap();
        assert!(cmp.v1.passed() && cmp.v2.passed());
    }

    #[test]
    fn fibre_degree_bounds() {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        let mut g = PolyMatrix::zeros(2, 2, 2);
        g.set(1, 0, Poly::var(2, 1));
        let nab = Connection::new(a, 2, vec![g, PolyMatrix::zeros(2, 2, 2)]).unwrap();
        let t = build_total_algebroid(&Rep2::double(&nab).unwrap()).unwrap();
        let fibre = t.n..t.nvars();
        for i in 0..t.rank() {
            for j in 0..t.rank() {
                let bound = if t.kind(i) == 'h' && t.kind(j) == 'h' { 1 } else { 0 };
                for p in t.alg.structure(i, j) {
                    assert!(p.degree_in(fibre.clone()).unwrap_or(0) <= bound);
                }
            }
        }
    }

    #[test]
    fn lemma_examples() {
        let rep = plane_double_flat();
        let inputs = vec![LemmaInput::BaseFunction(Poly::var(2, 0)), LemmaInput::Linear(vec![Poly::one(2), Poly::zero(2)])];
        assert!(lemma_check(&rep, &inputs).unwrap().passed());
        let ab = Arc::new(LieAlgebroid::lie_algebra(2, &[]).unwrap());
        let r = Rep2::new(
            ab.clone(),
            PolyMatrix::zeros(1, 1, 0),
            Connection::flat(ab.clone(), 1),
            Connection::flat(ab, 1),
            FormValued::zero(2, 2, 1, 1, 0),
        )
        .unwrap();
        let t = build_total_algebroid(&r).unwrap();
        let core = LemmaInput::Core(vec![Poly::one(0), Poly::from_int(0, 3)]);
        assert!(total_differential(&t, &lemma_form(&t, &core)).unwrap().is_zero());
        assert!(lemma_check(&r, &frame_lemma_inputs(&r)).unwrap().passed());
    }

    #[test]
    fn oracle_agrees_on_broken_boundary() {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        let mut g = PolyMatrix::zeros(2, 2, 2);
        g.set(1, 0, Poly::var(2, 1));
        let nab = Connection::new(a, 2, vec![g, PolyMatrix::zeros(2, 2, 2)]).unwrap();
        let r = Rep2::double(&nab).unwrap();
        let bad = r.with_boundary(PolyMatrix::from_ints(2, &[&[1, 0], &[0, 2]])).unwrap();
        let cmp = jacobi_oracle(&bad).unwrap();
        assert!(!cmp.v1.passed() && !cmp.v2.passed(), "{cmp}");
        assert!(cmp.v2.families().iter().any(|f| f.contains("hhc") || f.contains("hc")), "{cmp}");
    }

    #[test]
    fn random_oracle_and_lemmas() {
        let mut g = crate::random::Gen::new(3);
        for _ in 0..8 {
            let r = g.passing_rep();
            let cmp = jacobi_oracle(&r).unwrap();
            assert!(cmp.v1.passed() && cmp.v2.passed(), "{cmp}");
            assert!(lemma_check(&r, &frame_lemma_inputs(&r)).unwrap().passed());
            let s = g.rep_shaped();
            assert!(jacobi_oracle(&s).unwrap().agree());
            assert!(lemma_check(&s, &frame_lemma_inputs(&s)).unwrap().passed());
        }
    }
}
