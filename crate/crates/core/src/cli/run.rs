use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::problem::{Expect, ProblemFile, Task, TaskKind};
use crate::error::Result;
use crate::rep2::gauge_iso;
use crate::report::{Comparison, Report};
use crate::subgeom::{connection_to_spencer, ideal_system_check, im_prop_check, involutivity_check, spencer_to_connection, subrep_check};
use crate::suites::run_suite;
use crate::vbalg::{
    bialgebroid_check, frame_lemma_inputs, im2form_check, jacobi_oracle, lemma_check, poisson_dual_extract, theorem_main_check, vb_morphism_oracle,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskVerdict {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualLine {
    /// `V1`, `V2`, or empty for one-sided checks.
    pub side: String,
    pub family: String,
    /// 1-based frame indices.
    pub indices: Vec<usize>,
    pub value: String,
}

#[derive(Clone, Debug)]
pub struct TaskOutcome {
    pub index: usize,
    pub name: String,
    pub op: String,
    pub expect: Expect,
    pub verdict: TaskVerdict,
    /// Whether the checked statement holds; `None` on error or when the two
    /// computations disagree.
    pub holds: Option<bool>,
    pub residuals: Vec<ResidualLine>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub seed: u64,
    pub tasks: Vec<TaskOutcome>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.tasks.iter().all(|t| t.verdict == TaskVerdict::Pass)
    }

    pub fn count(&self, v: TaskVerdict) -> usize {
        self.tasks.iter().filter(|t| t.verdict == v).count()
    }

    /// 0 iff every task passes.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// One JSON object per task, then a summary line. Contains no timings,
    /// so identical inputs give identical bytes.
    pub fn json_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let line = json!({
                "task": t.index + 1,
                "name": t.name,
                "op": t.op,
                "expect": t.expect,
                "verdict": t.verdict,
                "holds": t.holds,
                "residuals": t.residuals,
                "notes": t.notes,
            });
            writeln!(out, "{line}").unwrap();
        }
        let summary = json!({
            "summary": {
                "seed": self.seed,
                "tasks": self.tasks.len(),
                "pass": self.count(TaskVerdict::Pass),
                "fail": self.count(TaskVerdict::Fail),
                "error": self.count(TaskVerdict::Error),
            }
        });
        writeln!(out, "{summary}").unwrap();
        out
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let v = match t.verdict {
                TaskVerdict::Pass => "PASS",
                TaskVerdict::Fail => "FAIL",
                TaskVerdict::Error => "ERROR",
            };
            let expect = if t.expect == Expect::Fail { " (expected to fail)" } else { "" };
            writeln!(out, "[{v}] {} ({}){expect} {:.1?}", t.name, t.op, t.elapsed).unwrap();
            for n in &t.notes {
                writeln!(out, "    {n}").unwrap();
            }
            let shown = if t.verdict == TaskVerdict::Pass { 0 } else { 12 };
            for r in t.residuals.iter().take(shown) {
                let side = if r.side.is_empty() { String::new() } else { format!("[{}] ", r.side) };
                let idx: Vec<String> = r.indices.iter().map(usize::to_string).collect();
                writeln!(out, "    {side}{}({}) = {}", r.family, idx.join(","), r.value).unwrap();
            }
            if t.verdict != TaskVerdict::Pass && t.residuals.len() > shown {
                writeln!(out, "    ... {} more residuals", t.residuals.len() - shown).unwrap();
            }
        }
        writeln!(
            out,
            "{} tasks: {} pass, {} fail, {} error",
            self.tasks.len(),
            self.count(TaskVerdict::Pass),
            self.count(TaskVerdict::Fail),
            self.count(TaskVerdict::Error)
        )
        .unwrap();
        out
    }
}

/// What a task computed before its verdict is decided.
struct Computed {
    holds: Option<bool>,
    residuals: Vec<ResidualLine>,
    notes: Vec<String>,
}

fn lines(side: &str, r: &Report) -> Vec<ResidualLine> {
    r.residuals
        .iter()
        .map(|x| ResidualLine {
            side: side.to_string(),
            family: x.family.clone(),
            indices: x.indices.iter().map(|i| i + 1).collect(),
            value: x.value.to_string(),
        })
        .collect()
}

fn one(r: Report) -> Computed {
    Computed {
        holds: Some(r.passed()),
        residuals: lines("", &r),
        notes: r.notes.clone(),
    }
}

fn two(c: Comparison) -> Computed {
    let mut residuals = lines("V1", &c.v1);
    residuals.extend(lines("V2", &c.v2));
    let mut notes: Vec<String> = c.v1.notes.iter().chain(&c.v2.notes).cloned().collect();
    if !c.agree() {
        notes.push(format!("V1 ({}) and V2 ({}) disagree", c.v1.check, c.v2.check));
    }
    Computed {
        holds: c.agree().then(|| c.v1.passed()),
        residuals,
        notes,
    }
}

fn compute(task: &Task, seed: u64) -> Result<Computed> {
    Ok(match &task.kind {
        TaskKind::VerifyAlgebroid(a) => one(a.verify()),
        TaskKind::AlgebroidMorphism { map, source, target } => one(crate::algebroid::algebroid_morphism_check(map, source, target)?),
        TaskKind::VerifyRep(r) => one(r.verify()),
        TaskKind::JacobiOracle(r) => two(jacobi_oracle(r)?),
        TaskKind::Lemmas(r) => one(lemma_check(r, &frame_lemma_inputs(r))?),
        TaskKind::PoissonDual(r) => {
            let mut rep = Report::new("poisson_dual_extract");
            match poisson_dual_extract(r) {
                Ok(d) => {
                    let dual = r.dual();
                    rep.push("boundary", &[], d.boundary() - dual.boundary());
                    for i in 0..r.algebroid().rank() {
                        rep.push("nabla0", &[i], d.nabla0().christoffel(i) - dual.nabla0().christoffel(i));
                        rep.push("nabla1", &[i], d.nabla1().christoffel(i) - dual.nabla1().christoffel(i));
                    }
                    let dk = d.k().checked_sub(dual.k())?;
                    for (t, m) in dk.components() {
                        rep.push("k", t, m.clone());
                    }
                }
                Err(e) => rep.note(format!("extraction refused: {e}")),
            }
            let mut c = one(rep);
            if !c.notes.is_empty() {
                c.holds = Some(false);
            }
            c
        }
        TaskKind::GaugeTransform(r, phi) => {
            let g = r.gauge(phi)?;
            let (before, after) = (r.verify(), g.verify());
            let mut c = one(after);
            if before.passed() != c.holds.unwrap_or(false) {
                c.notes.push("the gauge transformation changed the verdict".into());
                c.holds = None;
            }
            c
        }
        TaskKind::GaugeIso(r, phi) => one(gauge_iso(r, phi)?.verify()?),
        TaskKind::VerifyMorphism(m) => one(m.data.rep_morphism(&m.source, &m.target)?.verify()?),
        TaskKind::TheoremMain(m) => two(theorem_main_check(&m.data, &m.source, &m.target)?),
        TaskKind::VbOracle(m) => one(vb_morphism_oracle(&m.data, &m.source, &m.target)?),
        TaskKind::IM2Form { alg, nabla, form } => two(im2form_check(alg.clone(), nabla, form)?),
        TaskKind::Bialgebroid(d) => two(bialgebroid_check(d)?),
        TaskKind::Subrep { rep, p0, p1 } => one(subrep_check(rep, p0, p1)?),
        TaskKind::Involutivity(d) => two(involutivity_check(d)?),
        TaskKind::ImProp { alg, dist } => two(im_prop_check(alg.clone(), dist)?),
        TaskKind::IdealSystem { alg, nabla, delta, core } => {
            let r = ideal_system_check(alg.clone(), nabla, delta, core)?;
            one(r.as_report())
        }
        TaskKind::SpencerRoundtrip { dist, splitting } => {
            let op = dist.spencer();
            let back = spencer_to_connection(&op, splitting)?;
            let again = connection_to_spencer(&back, &dist.delta, &dist.core)?;
            let mut rep = Report::new("spencer_roundtrip");
            for (j, (a, b)) in op.components().iter().zip(again.components()).enumerate() {
                rep.push("roundtrip", &[j], a - b);
            }
            one(rep)
        }
        TaskKind::Random { suite, count } => {
            let out = run_suite(suite, seed, *count)?;
            let mut notes = vec![out.to_string().lines().next().unwrap_or_default().to_string()];
            notes.extend(out.violations.iter().cloned());
            Computed {
                holds: out.ok().then_some(true),
                residuals: Vec::new(),
                notes,
            }
        }
    })
}

fn run_one(index: usize, task: &Task, seed: u64) -> TaskOutcome {
    let start = Instant::now();
    let computed = compute(task, seed.wrapping_add(index as u64));
    let elapsed = start.elapsed();
    let (verdict, holds, residuals, notes) = match computed {
        Ok(c) => {
            let v = match (c.holds, task.expect) {
                (Some(true), Expect::Pass) | (Some(false), Expect::Fail) => TaskVerdict::Pass,
                _ => TaskVerdict::Fail,
            };
            (v, c.holds, c.residuals, c.notes)
        }
        Err(e) => (TaskVerdict::Error, None, Vec::new(), vec![e.to_string()]),
    };
    TaskOutcome {
        index,
        name: task.name.clone(),
        op: task.op.clone(),
        expect: task.expect,
        verdict,
        holds,
        residuals,
        notes,
        elapsed,
    }
}

/// Runs the tasks (all of them, or those named in `only`) concurrently;
/// the report keeps file order. Random suites use `seed + task index`.
pub fn run_tasks(p: &ProblemFile, seed: u64, only: Option<&str>) -> RunReport {
    let selected: Vec<(usize, &Task)> = p.tasks.iter().enumerate().filter(|(_, t)| only.is_none_or(|n| t.name == n)).collect();
    let tasks = selected.par_iter().map(|(i, t)| run_one(*i, t, seed)).collect();
    RunReport { seed, tasks }
}
