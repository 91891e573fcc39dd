//! Problem files: TOML documents declaring a chart, named objects built from
//! polynomial strings, and a list of tasks.
//!
//! ```toml
//! [chart]
//! vars = ["x1", "x2"]
//!
//! [connections.flat]
//! algebroid = "TM"   # the tangent algebroid of the chart
//! rank = 2
//!
//! [reps.double]
//! kind = "double"
//! connection = "flat"
//!
//! [[tasks]]
//! op = "jacobi_oracle"
//! rep = "double"
//! ```
//!
//! Indices in files are 1-based. Every reference is resolved and every shape
//! checked during [`parse_problem`]; failures carry a line and column.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::algebroid::{BaseChart, Connection, FormValued, LieAlgebroid};
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::polytext::parse_poly;
use crate::rep2::Rep2;
use crate::subgeom::{LinearDistribution, SubbundleProj};
use crate::vbalg::{BialgebroidData, IM2Form, VBMorphismData};

/// Name reserved for the tangent algebroid of the chart.
pub const TANGENT: &str = "TM";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

pub type Row = Vec<Spanned<Entry>>;
pub type Matrix = Spanned<Vec<Row>>;
pub type Name = Spanned<String>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default)]
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    /// `[e_i, e_j]`, 1-based.
    pub pair: Spanned<[usize; 2]>,
    pub value: Spanned<Row>,
}

/// Either `tangent = true`, or a rank with an optional anchor (`n × rank`,
/// zero when omitted) and the nonzero brackets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSpec {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tangent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketSpec>,
}

/// Christoffel blocks `Γ_i` with `∇_{e_i} f_β = Σ_α Γ_i[α][β] f_α`; zero
/// when omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub algebroid: Name,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub christoffel: Option<Spanned<Vec<Matrix>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    /// Increasing frame indices, 1-based.
    pub at: Spanned<Vec<usize>>,
    pub value: Matrix,
}

/// A form on an algebroid with matrix coefficients; missing components are
/// zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub algebroid: Name,
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentSpec>,
}

/// `kind` is one of `explicit`, `double`, `adjoint`, `dual`, `gauge`,
/// `pullback`; each uses a subset of the remaining fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub kind: Name,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebroid: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla0: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla1: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub of: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSpec {
    pub matrix: Matrix,
}

/// A VB-algebroid morphism over the identity; omitted maps are identities
/// and an omitted `phi` is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: Name,
    pub target: Name,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fver: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fhor: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fc: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Name>,
}

/// `mu` is `n × rank` and `nu` holds one antisymmetric `n × n` block per
/// frame element (zero when omitted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IM2FormSpec {
    pub algebroid: Name,
    pub mu: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Spanned<Vec<Matrix>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BialgebroidSpec {
    pub algebroid: Name,
    pub dual: Name,
    pub connection: Name,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub delta: Name,
    pub core: Name,
    pub connection: Name,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    #[default]
    Pass,
    /// The task passes when the checked statement fails (consistently, for
    /// two-sided checks).
    Fail,
}

impl Expect {
    fn is_pass(&self) -> bool {
        *self == Expect::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub op: Name,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Expect::is_pass")]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebroid: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im2form: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bialgebroid: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

/// The document as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub chart: ChartSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebroids: BTreeMap<String, Spanned<AlgebroidSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub connections: BTreeMap<String, Spanned<ConnectionSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, Spanned<FormSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reps: BTreeMap<String, Spanned<RepSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub projections: BTreeMap<String, Spanned<ProjectionSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, Spanned<MorphismSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub im2forms: BTreeMap<String, Spanned<IM2FormSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bialgebroids: BTreeMap<String, Spanned<BialgebroidSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub distributions: BTreeMap<String, Spanned<DistributionSpec>>,
    #[serde(default)]
    pub tasks: Vec<Spanned<TaskSpec>>,
}

/// Resolved arguments of a task.
#[derive(Clone, Debug, PartialEq)]
pub enum TaskKind {
    VerifyAlgebroid(Arc<LieAlgebroid>),
    AlgebroidMorphism {
        map: PolyMatrix,
        source: Arc<LieAlgebroid>,
        target: Arc<LieAlgebroid>,
    },
    VerifyRep(Rep2),
    JacobiOracle(Rep2),
    Lemmas(Rep2),
    PoissonDual(Rep2),
    GaugeTransform(Rep2, FormValued),
    GaugeIso(Rep2, FormValued),
    VerifyMorphism(VBMorphism),
    TheoremMain(VBMorphism),
    VbOracle(VBMorphism),
    IM2Form {
        alg: Arc<LieAlgebroid>,
        nabla: Connection,
        form: IM2Form,
    },
    Bialgebroid(BialgebroidData),
    Subrep {
        rep: Rep2,
        p0: SubbundleProj,
        p1: SubbundleProj,
    },
    Involutivity(LinearDistribution),
    ImProp {
        alg: Arc<LieAlgebroid>,
        dist: LinearDistribution,
    },
    IdealSystem {
        alg: Arc<LieAlgebroid>,
        nabla: Connection,
        delta: SubbundleProj,
        core: SubbundleProj,
    },
    SpencerRoundtrip {
        dist: LinearDistribution,
        splitting: PolyMatrix,
    },
    Random {
        suite: String,
        count: usize,
    },
}

/// Operation names accepted in `op`, with the fields each one reads.
pub const OPERATIONS: &[(&str, &str)] = &[
    ("verify_lie_algebroid", "algebroid"),
    ("algebroid_morphism_check", "algebroid, target, map"),
    ("verify_rep2", "rep"),
    ("jacobi_oracle", "rep"),
    ("lemma_check", "rep"),
    ("poisson_dual_extract", "rep"),
    ("gauge_transform", "rep, gauge"),
    ("gauge_iso", "rep, gauge"),
    ("verify_morphism", "morphism"),
    ("theorem_main_check", "morphism"),
    ("vb_morphism_oracle", "morphism"),
    ("im2form_check", "im2form, connection"),
    ("bialgebroid_check", "bialgebroid"),
    ("subrep_check", "rep, p0, p1"),
    ("involutivity_check", "distribution"),
    ("im_prop_check", "algebroid, distribution"),
    ("ideal_system_check", "algebroid, connection, delta, core"),
    ("spencer_roundtrip", "distribution, splitting"),
    ("random", "suite, count"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct VBMorphism {
    pub data: VBMorphismData,
    pub source: Rep2,
    pub target: Rep2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub name: String,
    pub op: String,
    pub expect: Expect,
    pub kind: TaskKind,
}

/// A parsed, resolved and shape-checked problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub spec: ProblemSpec,
    pub chart: BaseChart,
    pub tasks: Vec<Task>,
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let spec: ProblemSpec = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    Resolver::new(text, &spec)?.resolve_all()
}

/// Canonical text of a problem; `parse_problem(&format_problem(p))`
/// reproduces `p`.
pub fn format_problem(p: &ProblemFile) -> String {
    toml::to_string_pretty(&p.spec).expect("problem specs serialize")
}

struct Resolver<'a> {
    text: &'a str,
    spec: &'a ProblemSpec,
    chart: BaseChart,
    algebroids: BTreeMap<String, Arc<LieAlgebroid>>,
    connections: BTreeMap<String, Connection>,
    forms: BTreeMap<String, FormValued>,
    reps: BTreeMap<String, Rep2>,
    /// Representations under construction, for cycle detection.
    visiting: BTreeSet<String>,
}

impl<'a> Resolver<'a> {
    fn new(text: &'a str, spec: &'a ProblemSpec) -> Result<Self> {
        let chart = BaseChart::new(spec.chart.vars.clone()).map_err(|e| Error::Parse {
            line: 1,
            column: 1,
            message: format!("chart: {e}"),
        })?;
        Ok(Resolver {
            text,
            spec,
            chart,
            algebroids: BTreeMap::new(),
            connections: BTreeMap::new(),
            forms: BTreeMap::new(),
            reps: BTreeMap::new(),
            visiting: BTreeSet::new(),
        })
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> Error {
        let (line, column) = line_col(self.text, span.start);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Attaches a location to an error from the algebra layer.
    fn at<T>(&self, span: Range<usize>, what: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            e @ Error::Parse { .. } => e,
            e => self.err(span, format!("{what}: {e}")),
        })
    }

    fn n(&self) -> usize {
        self.chart.dim()
    }

    fn poly(&self, e: &Spanned<Entry>, nvars: usize) -> Result<Poly> {
        match e.get_ref() {
            Entry::Int(i) => Ok(Poly::from_int(nvars, *i)),
            Entry::Text(s) => parse_poly(s, self.chart.names()).map_err(|err| match err {
                Error::Parse { column, message, .. } => {
                    // the string starts after its opening quote
                    let (line, col) = line_col(self.text, e.span().start);
                    Error::Parse {
                        line,
                        column: col + column,
                        message,
                    }
                }
                other => self.err(e.span(), other.to_string()),
            }),
        }
    }

    fn matrix(&self, m: &Matrix, rows: usize, cols: usize, field: &str) -> Result<PolyMatrix> {
        let given = m.get_ref();
        if given.len() != rows || given.iter().any(|r| r.len() != cols) {
            let found_cols = given.first().map_or(0, Vec::len);
            return Err(self.err(
                m.span(),
                format!("{field}: expected a {rows}x{cols} matrix, found {}x{found_cols}", given.len()),
            ));
        }
        let n = self.n();
        let rows = given
            .iter()
            .map(|r| r.iter().map(|e| self.poly(e, n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Ok(PolyMatrix::zeros(0, cols, n));
        }
        PolyMatrix::from_rows(n, rows)
    }

    fn square(&self, m: &Matrix, field: &str) -> Result<PolyMatrix> {
        let r = m.get_ref().len();
        self.matrix(m, r, r, field)
    }

    fn lookup<'s, T>(&self, map: &'s BTreeMap<String, Spanned<T>>, name: &Name, kind: &str) -> Result<&'s Spanned<T>> {
        map.get(name.get_ref())
            .ok_or_else(|| self.err(name.span(), format!("unresolved reference: no {kind} named '{}'", name.get_ref())))
    }

    fn required<'s>(&self, field: &'s Option<Name>, what: &str, owner: Range<usize>) -> Result<&'s Name> {
        field.as_ref().ok_or_else(|| self.err(owner, format!("missing field '{what}'")))
    }

    fn required_matrix<'s>(&self, field: &'s Option<Matrix>, what: &str, owner: Range<usize>) -> Result<&'s Matrix> {
        field.as_ref().ok_or_else(|| self.err(owner, format!("missing field '{what}'")))
    }

    fn algebroid(&mut self, name: &Name) -> Result<Arc<LieAlgebroid>> {
        if let Some(a) = self.algebroids.get(name.get_ref()) {
            return Ok(a.clone());
        }
        if name.get_ref() == TANGENT {
            let a = Arc::new(LieAlgebroid::tangent(self.chart.clone()));
            self.algebroids.insert(TANGENT.into(), a.clone());
            return Ok(a);
        }
        let spec = self.lookup(&self.spec.algebroids, name, "algebroid")?;
        let s = spec.get_ref();
        let n = self.n();
        let alg = if s.tangent {
            if s.anchor.is_some() || !s.brackets.is_empty() || s.rank.is_some_and(|k| k != n) {
                return Err(self.err(spec.span(), "a tangent algebroid takes no anchor, brackets or other rank"));
            }
            LieAlgebroid::tangent(self.chart.clone())
        } else {
            let k = s.rank.ok_or_else(|| self.err(spec.span(), "missing field 'rank'"))?;
            let anchor = match &s.anchor {
                Some(m) => self.matrix(m, n, k, "anchor")?,
                None => PolyMatrix::zeros(n, k, n),
            };
            let mut upper = Vec::new();
            for b in &s.brackets {
                let [i, j] = *b.pair.get_ref();
                if i == 0 || j == 0 || i > k || j > k || i == j {
                    return Err(self.err(b.pair.span(), format!("bracket pair must hold two distinct indices in 1..={k}")));
                }
                let row = b.value.get_ref();
                if row.len() != k {
                    return Err(self.err(b.value.span(), format!("bracket value: expected {k} components, found {}", row.len())));
                }
                let v = row.iter().map(|e| self.poly(e, n)).collect::<Result<Vec<_>>>()?;
                upper.push(((i - 1, j - 1), v));
            }
            let r = LieAlgebroid::new(self.chart.clone(), anchor, upper);
            self.at(spec.span(), &format!("algebroid '{}'", name.get_ref()), r)?
        };
        let a = Arc::new(alg);
        self.algebroids.insert(name.get_ref().clone(), a.clone());
        Ok(a)
    }

    fn connection(&mut self, name: &Name) -> Result<Connection> {
        if let Some(c) = self.connections.get(name.get_ref()) {
            return Ok(c.clone());
        }
        let spec = self.lookup(&self.spec.connections, name, "connection")?;
        let s = spec.get_ref();
        let alg = self.algebroid(&s.algebroid)?;
        let gamma = match &s.christoffel {
            None => vec![PolyMatrix::zeros(s.rank, s.rank, self.n()); alg.rank()],
            Some(blocks) => {
                if blocks.get_ref().len() != alg.rank() {
                    return Err(self.err(
                        blocks.span(),
                        format!(
                            "christoffel: expected {} blocks, one per frame element, found {}",
                            alg.rank(),
                            blocks.get_ref().len()
                        ),
                    ));
                }
                blocks
                    .get_ref()
                    .iter()
                    .map(|m| self.matrix(m, s.rank, s.rank, "christoffel"))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let c = self.at(spec.span(), &format!("connection '{}'", name.get_ref()), Connection::new(alg, s.rank, gamma))?;
        self.connections.insert(name.get_ref().clone(), c.clone());
        Ok(c)
    }

    fn form(&mut self, name: &Name) -> Result<FormValued> {
        if let Some(f) = self.forms.get(name.get_ref()) {
            return Ok(f.clone());
        }
        let spec = self.lookup(&self.spec.forms, name, "form")?;
        let s = spec.get_ref();
        let alg = self.algebroid(&s.algebroid)?;
        let k = alg.rank();
        let mut f = FormValued::zero(k, s.degree, s.rows, s.cols, self.n());
        for c in &s.components {
            let at = c.at.get_ref();
            let ok = at.len() == s.degree && at.iter().all(|&i| i >= 1 && i <= k) && at.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(self.err(c.at.span(), format!("component index must be {} increasing indices in 1..={k}", s.degree)));
            }
            let idx: Vec<usize> = at.iter().map(|i| i - 1).collect();
            f.set(&idx, self.matrix(&c.value, s.rows, s.cols, "component value")?);
        }
        self.forms.insert(name.get_ref().clone(), f.clone());
        Ok(f)
    }

    fn rep(&mut self, name: &Name) -> Result<Rep2> {
        if let Some(r) = self.reps.get(name.get_ref()) {
            return Ok(r.clone());
        }
        let spec = self.lookup(&self.spec.reps, name, "representation")?;
        if !self.visiting.insert(name.get_ref().clone()) {
            return Err(self.err(name.span(), format!("representation '{}' refers to itself", name.get_ref())));
        }
        let (s, span) = (spec.get_ref(), spec.span());
        let what = format!("representation '{}'", name.get_ref());
        let r = match s.kind.get_ref().as_str() {
            "explicit" => {
                let alg = self.algebroid(self.required(&s.algebroid, "algebroid", span.clone())?)?;
                let n0 = self.connection(self.required(&s.nabla0, "nabla0", span.clone())?)?;
                let n1 = self.connection(self.required(&s.nabla1, "nabla1", span.clone())?)?;
                let d = match &s.boundary {
                    Some(m) => self.matrix(m, n1.rank(), n0.rank(), "boundary")?,
                    None => PolyMatrix::zeros(n1.rank(), n0.rank(), self.n()),
                };
                let k = match &s.k {
                    Some(f) => self.form(f)?,
                    None => FormValued::zero(alg.rank(), 2, n0.rank(), n1.rank(), self.n()),
                };
                self.at(span, &what, Rep2::new(alg, d, n0, n1, k))?
            }
            "double" => {
                let c = self.connection(self.required(&s.connection, "connection", span.clone())?)?;
                self.at(span, &what, Rep2::double(&c))?
            }
            "adjoint" => {
                let alg = self.algebroid(self.required(&s.algebroid, "algebroid", span.clone())?)?;
                let c = self.connection(self.required(&s.connection, "connection", span.clone())?)?;
                self.at(span, &what, Rep2::adjoint(alg, &c))?
            }
            "dual" => self.rep(self.required(&s.of, "of", span)?)?.dual(),
            "gauge" => {
                let base = self.rep(self.required(&s.of, "of", span.clone())?)?;
                let g = self.form(self.required(&s.gauge, "gauge", span.clone())?)?;
                self.at(span, &what, base.gauge(&g))?
            }
            "pullback" => {
                let base = self.rep(self.required(&s.of, "of", span.clone())?)?;
                let alg = self.algebroid(self.required(&s.algebroid, "algebroid", span.clone())?)?;
                let t = self.matrix(self.required_matrix(&s.map, "map", span.clone())?, base.algebroid().rank(), alg.rank(), "map")?;
                self.at(span, &what, base.pullback(&t, alg))?
            }
            other => {
                return Err(self.err(
                    s.kind.span(),
                    format!("unknown representation kind '{other}' (explicit, double, adjoint, dual, gauge, pullback)"),
                ))
            }
        };
        self.visiting.remove(name.get_ref());
        self.reps.insert(name.get_ref().clone(), r.clone());
        Ok(r)
    }

    fn projection(&self, name: &Name) -> Result<SubbundleProj> {
        let spec = self.lookup(&self.spec.projections, name, "projection")?;
        let m = self.square(&spec.get_ref().matrix, "matrix")?;
        self.at(spec.span(), &format!("projection '{}'", name.get_ref()), SubbundleProj::new(m))
    }

    fn morphism(&mut self, name: &Name) -> Result<VBMorphism> {
        let spec = self.lookup(&self.spec.morphisms, name, "morphism")?;
        let s = spec.get_ref();
        let v = self.rep(&s.source)?;
        let w = self.rep(&s.target)?;
        let (a, b) = (v.algebroid(), w.algebroid());
        let n = self.n();
        let map = |r: &Self, m: &Option<Matrix>, rows: usize, cols: usize, field: &str| -> Result<PolyMatrix> {
            match m {
                Some(m) => r.matrix(m, rows, cols, field),
                None if rows == cols => Ok(PolyMatrix::identity(rows, n)),
                None => Err(r.err(spec.span(), format!("missing field '{field}': the identity needs equal ranks"))),
            }
        };
        let data = VBMorphismData {
            fver: map(self, &s.fver, b.rank(), a.rank(), "fver")?,
            fhor: map(self, &s.fhor, w.rank1(), v.rank1(), "fhor")?,
            fc: map(self, &s.fc, w.rank0(), v.rank0(), "fc")?,
            phi: match &s.phi {
                Some(f) => {
                    let f = self.form(f)?;
                    if f.degree() != 1 || f.rank() != a.rank() || f.coeff_shape() != (w.rank0(), v.rank1()) {
                        return Err(self.err(
                            s.phi.as_ref().map_or(spec.span(), |p| p.span()),
                            format!("phi must be a 1-form on the source algebroid with {}x{} blocks", w.rank0(), v.rank1()),
                        ));
                    }
                    f
                }
                None => FormValued::zero(a.rank(), 1, w.rank0(), v.rank1(), n),
            },
        };
        if a.chart() != b.chart() {
            return Err(self.err(spec.span(), "source and target must share the chart"));
        }
        Ok(VBMorphism { data, source: v, target: w })
    }

    fn im2form(&mut self, name: &Name) -> Result<(Arc<LieAlgebroid>, IM2Form)> {
        let spec = self.lookup(&self.spec.im2forms, name, "IM-2-form")?;
        let s = spec.get_ref();
        let alg = self.algebroid(&s.algebroid)?;
        let n = self.n();
        let mu = self.matrix(&s.mu, n, alg.rank(), "mu")?;
        let nu = match &s.nu {
            None => vec![PolyMatrix::zeros(n, n, n); alg.rank()],
            Some(blocks) => {
                if blocks.get_ref().len() != alg.rank() {
                    return Err(self.err(blocks.span(), format!("nu: expected {} blocks, found {}", alg.rank(), blocks.get_ref().len())));
                }
                let out = blocks.get_ref().iter().map(|m| self.matrix(m, n, n, "nu")).collect::<Result<Vec<_>>>()?;
                if out.iter().any(|m| !(m + &m.transpose()).is_zero()) {
                    return Err(self.err(blocks.span(), "nu: blocks must be antisymmetric"));
                }
                out
            }
        };
        Ok((alg, IM2Form { mu, nu }))
    }

    fn bialgebroid(&mut self, name: &Name) -> Result<BialgebroidData> {
        let spec = self.lookup(&self.spec.bialgebroids, name, "bialgebroid")?;
        let s = spec.get_ref();
        let a = self.algebroid(&s.algebroid)?;
        let astar = self.algebroid(&s.dual)?;
        let nab = self.connection(&s.connection)?;
        self.at(spec.span(), &format!("bialgebroid '{}'", name.get_ref()), BialgebroidData::new(a, astar, nab))
    }

    fn distribution(&mut self, name: &Name) -> Result<LinearDistribution> {
        let spec = self.lookup(&self.spec.distributions, name, "distribution")?;
        let s = spec.get_ref();
        let delta = self.projection(&s.delta)?;
        let core = self.projection(&s.core)?;
        let nab = self.connection(&s.connection)?;
        self.at(
            spec.span(),
            &format!("distribution '{}'", name.get_ref()),
            LinearDistribution::new(delta, core, nab),
        )
    }

    fn task(&mut self, t: &Spanned<TaskSpec>, index: usize) -> Result<Task> {
        let (s, span) = (t.get_ref(), t.span());
        let req = |r: &Self, f: &Option<Name>, what: &str| -> Result<Name> { r.required(f, what, span.clone()).cloned() };
        let op = s.op.get_ref().as_str();
        let kind = match op {
            "verify_lie_algebroid" => TaskKind::VerifyAlgebroid(self.algebroid(&req(self, &s.algebroid, "algebroid")?)?),
            "algebroid_morphism_check" => {
                let source = self.algebroid(&req(self, &s.algebroid, "algebroid")?)?;
                let target = self.algebroid(&req(self, &s.target, "target")?)?;
                let map = self.matrix(self.required_matrix(&s.map, "map", span.clone())?, target.rank(), source.rank(), "map")?;
                TaskKind::AlgebroidMorphism { map, source, target }
            }
            "verify_rep2" => TaskKind::VerifyRep(self.rep(&req(self, &s.rep, "rep")?)?),
            "jacobi_oracle" => TaskKind::JacobiOracle(self.rep(&req(self, &s.rep, "rep")?)?),
            "lemma_check" => TaskKind::Lemmas(self.rep(&req(self, &s.rep, "rep")?)?),
            "poisson_dual_extract" => TaskKind::PoissonDual(self.rep(&req(self, &s.rep, "rep")?)?),
            "gauge_transform" | "gauge_iso" => {
                let rep = self.rep(&req(self, &s.rep, "rep")?)?;
                let g = req(self, &s.gauge, "gauge")?;
                let phi = self.form(&g)?;
                self.at(g.span(), "gauge", rep.check_gauge(&phi))?;
                if op == "gauge_iso" {
                    TaskKind::GaugeIso(rep, phi)
                } else {
                    TaskKind::GaugeTransform(rep, phi)
                }
            }
            "verify_morphism" | "theorem_main_check" | "vb_morphism_oracle" => {
                let m = self.morphism(&req(self, &s.morphism, "morphism")?)?;
                match op {
                    "verify_morphism" => TaskKind::VerifyMorphism(m),
                    "theorem_main_check" => TaskKind::TheoremMain(m),
                    _ => TaskKind::VbOracle(m),
                }
            }
            "im2form_check" => {
                let (alg, form) = self.im2form(&req(self, &s.im2form, "im2form")?)?;
                let nabla = self.connection(&req(self, &s.connection, "connection")?)?;
                TaskKind::IM2Form { alg, nabla, form }
            }
            "bialgebroid_check" => TaskKind::Bialgebroid(self.bialgebroid(&req(self, &s.bialgebroid, "bialgebroid")?)?),
            "subrep_check" => TaskKind::Subrep {
                rep: self.rep(&req(self, &s.rep, "rep")?)?,
                p0: self.projection(&req(self, &s.p0, "p0")?)?,
                p1: self.projection(&req(self, &s.p1, "p1")?)?,
            },
            "involutivity_check" => TaskKind::Involutivity(self.distribution(&req(self, &s.distribution, "distribution")?)?),
            "im_prop_check" => TaskKind::ImProp {
                alg: self.algebroid(&req(self, &s.algebroid, "algebroid")?)?,
                dist: self.distribution(&req(self, &s.distribution, "distribution")?)?,
            },
            "ideal_system_check" => TaskKind::IdealSystem {
                alg: self.algebroid(&req(self, &s.algebroid, "algebroid")?)?,
                nabla: self.connection(&req(self, &s.connection, "connection")?)?,
                delta: self.projection(&req(self, &s.delta, "delta")?)?,
                core: self.projection(&req(self, &s.core, "core")?)?,
            },
            "spencer_roundtrip" => {
                let dist = self.distribution(&req(self, &s.distribution, "distribution")?)?;
                let splitting = self.square(self.required_matrix(&s.splitting, "splitting", span.clone())?, "splitting")?;
                TaskKind::SpencerRoundtrip { dist, splitting }
            }
            "random" => {
                let suite = req(self, &s.suite, "suite")?;
                if !crate::suites::SUITES.contains(&suite.get_ref().as_str()) {
                    return Err(self.err(
                        suite.span(),
                        format!("unknown suite '{}' (known: {})", suite.get_ref(), crate::suites::SUITES.join(", ")),
                    ));
                }
                TaskKind::Random {
                    suite: suite.get_ref().clone(),
                    count: s.count.unwrap_or(20),
                }
            }
            other => {
                let known: Vec<&str> = OPERATIONS.iter().map(|(o, _)| *o).collect();
                return Err(self.err(s.op.span(), format!("unknown operation '{other}' (known: {})", known.join(", "))));
            }
        };
        Ok(Task {
            name: s.name.clone().unwrap_or_else(|| format!("{}#{}", op, index + 1)),
            op: op.to_string(),
            expect: s.expect,
            kind,
        })
    }

    fn resolve_all(mut self) -> Result<ProblemFile> {
        let spec = self.spec;
        if let Some((_, a)) = spec.algebroids.iter().find(|(k, _)| k.as_str() == TANGENT) {
            return Err(self.err(a.span(), format!("the name '{TANGENT}' is reserved for the tangent algebroid")));
        }
        // every declared object is checked, used or not
        for name in spec.algebroids.keys() {
            self.algebroid(&Spanned::new(0..0, name.clone()))?;
        }
        let declared = |map_keys: Vec<&String>| map_keys.into_iter().map(|k| Spanned::new(0..0, k.clone())).collect::<Vec<_>>();
        for n in declared(spec.connections.keys().collect()) {
            self.connection(&n)?;
        }
        for n in declared(spec.forms.keys().collect()) {
            self.form(&n)?;
        }
        for n in declared(spec.reps.keys().collect()) {
            self.rep(&n)?;
        }
        for n in declared(spec.projections.keys().collect()) {
            self.projection(&n)?;
        }
        for n in declared(spec.morphisms.keys().collect()) {
            self.morphism(&n)?;
        }
        for n in declared(spec.im2forms.keys().collect()) {
            self.im2form(&n)?;
        }
        for n in declared(spec.bialgebroids.keys().collect()) {
            self.bialgebroid(&n)?;
        }
        for n in declared(spec.distributions.keys().collect()) {
            self.distribution(&n)?;
        }
        let mut tasks = Vec::new();
        let mut names = BTreeSet::new();
        for (i, t) in spec.tasks.iter().enumerate() {
            let task = self.task(t, i)?;
            if !names.insert(task.name.clone()) {
                return Err(self.err(t.span(), format!("duplicate task name '{}'", task.name)));
            }
            tasks.push(task);
        }
        Ok(ProblemFile {
            spec: spec.clone(),
            chart: self.chart,
            tasks,
        })
    }
}
