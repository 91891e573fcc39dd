//! One line per acceptance criterion, with pinned instance counts and
//! wall-clock limits. Runs without the test harness so the table
//! always prints.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use vbrep::algebroid::{BaseChart, LieAlgebroid};
use vbrep::cli::{catalog, fixture, format_problem, parse_problem, run_tasks};
use vbrep::random::Gen;
use vbrep::rep2::{tm_connection, Rep2};
use vbrep::subgeom::{ideal_system_check, im_prop_check, LinearDistribution, SubbundleProj};
use vbrep::suites::{rep_mutations, run_suite};
use vbrep::vbalg::poisson_dual_extract;
use vbrep::{Poly, PolyMatrix};

const SEED: u64 = 2024;

type Outcome = Result<String, String>;
type Criterion = (u32, u64, Box<dyn Fn() -> Outcome>);

fn suite(name: &str, count: usize) -> Outcome {
    let out = run_suite(name, SEED, count).map_err(|e| e.to_string())?;
    if !out.ok() || out.instances < count {
        return Err(out.to_string());
    }
    Ok(format!("{name} {}/{} agree ({} pass, {} fail)", out.instances, count, out.passes, out.fails()))
}

fn fixture_passes(name: &str) -> Outcome {
    let f = fixture(name).ok_or(format!("missing fixture {name}"))?;
    let p = parse_problem(f.text).map_err(|e| e.to_string())?;
    let r = run_tasks(&p, SEED, None);
    if r.passed() {
        Ok(format!("{name} ({} tasks)", r.tasks.len()))
    } else {
        Err(r.human())
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    parts.into_iter().collect::<Result<Vec<_>, _>>().map(|v| v.join("; "))
}

fn c1() -> Outcome {
    let muts = rep_mutations(SEED).map_err(|e| e.to_string())?;
    if muts.len() != 8 {
        return Err(format!("{} mutations", muts.len()));
    }
    for (label, c) in &muts {
        if !c.agree() || c.v1.passed() {
            return Err(format!("mutation {label}: {c}"));
        }
    }
    all(vec![suite("rep_oracle", 50), Ok("8 mutations fail in both".into())])
}

fn c2() -> Outcome {
    let mut g = Gen::new(SEED);
    let algs = [
        ("so3", LieAlgebroid::so3()),
        ("sl2", LieAlgebroid::sl2()),
        ("heisenberg", LieAlgebroid::heisenberg()),
        ("TR2", LieAlgebroid::tangent(BaseChart::standard(2))),
        ("action_line", LieAlgebroid::action_line()),
    ];
    for (name, a) in algs {
        let a = Arc::new(a);
        for _ in 0..3 {
            let nab = g.tm_connection(a.chart(), a.rank());
            let rep = Rep2::adjoint(a.clone(), &nab).map_err(|e| e.to_string())?.verify();
            if !rep.passed() {
                return Err(format!("{name}: {rep}"));
            }
        }
    }
    Ok("5 algebroids x 3 connections pass".into())
}

fn c5() -> Outcome {
    let so3 = Arc::new(LieAlgebroid::so3());
    let point = tm_connection(so3.chart(), 3, vec![]).map_err(|e| e.to_string())?;
    let plane = BaseChart::standard(2);
    let flat = tm_connection(&plane, 2, vec![PolyMatrix::zeros(2, 2, 2), PolyMatrix::zeros(2, 2, 2)]).map_err(|e| e.to_string())?;
    let reps = [
        ("so3 adjoint", Rep2::adjoint(so3, &point).map_err(|e| e.to_string())?),
        ("flat double", Rep2::double(&flat).map_err(|e| e.to_string())?),
    ];
    for (name, r) in reps {
        if poisson_dual_extract(&r).map_err(|e| e.to_string())? != r.dual() {
            return Err(format!("{name}: extracted dual differs"));
        }
    }
    all(vec![
        suite("dual_poisson", 20),
        fixture_passes("dual_poisson_so3"),
        Ok("so3 and flat-double fixtures match".into()),
    ])
}

/// Over a point the ideal-system conditions reduce to `C` being an ideal.
fn lie_ideal_reduction() -> Outcome {
    let mut checked = 0;
    for (name, a) in [
        ("so3", LieAlgebroid::so3()),
        ("heisenberg", LieAlgebroid::heisenberg()),
        ("sl2", LieAlgebroid::sl2()),
    ] {
        let a = Arc::new(a);
        let nab = tm_connection(a.chart(), 3, vec![]).map_err(|e| e.to_string())?;
        let delta = SubbundleProj::full(0, 0);
        for sub in [vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]] {
            let unit = |i: usize| (0..3).map(|l| if l == i { Poly::one(0) } else { Poly::zero(0) }).collect::<Vec<_>>();
            let mut ideal = true;
            for &i in &sub {
                for j in 0..3 {
                    let br = a.bracket(&unit(i), &unit(j)).map_err(|e| e.to_string())?;
                    ideal &= br.iter().enumerate().all(|(l, p)| sub.contains(&l) || p.is_zero());
                }
            }
            let core = SubbundleProj::coordinate(3, 0, &sub);
            let r = ideal_system_check(a.clone(), &nab, &delta, &core).map_err(|e| e.to_string())?;
            let d = LinearDistribution::new(delta.clone(), core.clone(), nab.clone()).map_err(|e| e.to_string())?;
            let c = im_prop_check(a.clone(), &d).map_err(|e| e.to_string())?;
            if r.passed() != ideal || !c.agree() || c.v1.passed() != ideal {
                return Err(format!("{name} span{sub:?}: ideal = {ideal}, ideal system = {}, {c}", r.passed()));
            }
            checked += 1;
        }
    }
    Ok(format!("Lie-ideal reduction on {checked} coordinate subspaces"))
}

fn c10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_vbrep");
    for f in catalog() {
        let o = Command::new(bin).args(["check", f.name]).output().map_err(|e| e.to_string())?;
        if o.status.code() != Some(0) {
            return Err(format!("{} exits {:?}", f.name, o.status.code()));
        }
        let p = parse_problem(f.text).map_err(|e| e.to_string())?;
        if parse_problem(&format_problem(&p)).map_err(|e| e.to_string())? != p {
            return Err(format!("{} does not round-trip", f.name));
        }
    }
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/");
    for (file, family) in [
        ("mutated_k.toml", "curvature"),
        ("mutated_bracket.toml", "jacobi"),
        ("mutated_boundary.toml", "chain"),
    ] {
        let o = Command::new(bin).args(["check", &format!("{dir}{file}")]).output().map_err(|e| e.to_string())?;
        if o.status.code() != Some(1) || !String::from_utf8_lossy(&o.stdout).contains(family) {
            return Err(format!("{file}: exit {:?} without a {family} residual", o.status.code()));
        }
    }
    Ok(format!("{} fixtures exit 0 and round-trip; 3 mutated fixtures exit 1", catalog().len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, 30, Box::new(c1)),
        (2, 10, Box::new(c2)),
        (3, 60, Box::new(|| suite("theorem_main", 51))),
        (4, 30, Box::new(|| suite("lemmas", 20))),
        (5, 60, Box::new(c5)),
        (6, 30, Box::new(|| suite("gauge", 30))),
        (7, 20, Box::new(|| suite("spencer", 20))),
        (
            8,
            60,
            Box::new(|| all(vec![suite("involutivity", 30), suite("im_prop", 30), lie_ideal_reduction()])),
        ),
        (
            9,
            30,
            Box::new(|| {
                all(vec![
                    fixture_passes("im2form_symplectic_r2"),
                    fixture_passes("bialgebroid_trivial"),
                    suite("bialgebroid", 10),
                ])
            }),
        ),
        (10, 20, Box::new(c10)),
    ];
    let mut failed = Vec::new();
    for (n, limit, f) in criteria {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let ok = res.is_ok() && dt < Duration::from_secs(limit);
        let detail = res.unwrap_or_else(|e| e);
        println!(
            "criterion {n:>2}: {} [{:.2}s < {limit}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64()
        );
        if !ok {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
