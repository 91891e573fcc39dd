use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vbrep::cli::{catalog, fixture, parse_problem, run_tasks};

const EXAMPLES_HELP: &str = "Builtin fixtures (stable names): so3_adjoint, heisenberg_adjoint, tangent_double_flat, \
tangent_double_curved, action_algebroid_r1, im2form_symplectic_r2, bialgebroid_trivial, ideal_system_point, \
spencer_roundtrip, dual_poisson_so3, theorem_main_random. Pass a name to `check` in place of a file.";

/// Exact verification of 2-term representations up to homotopy and
/// decomposed VB-algebroids.
///
/// Exit codes: 0 every task passes, 1 a verification fails, 2 usage or
/// parse error.
#[derive(Parser)]
#[command(version, after_help = EXAMPLES_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a problem file (or builtin fixture name) and run its tasks.
    Check {
        file: String,
        /// Seed for randomized suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON-lines report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run only the task with this name.
        #[arg(long)]
        task: Option<String>,
    },
    /// List the builtin fixtures, or run all of them.
    #[command(after_help = EXAMPLES_HELP)]
    Examples {
        #[arg(long)]
        run: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(file: &str) -> Result<(String, String), String> {
    if let Some(f) = fixture(file) {
        return Ok((f.name.to_string(), f.text.to_string()));
    }
    std::fs::read_to_string(file)
        .map(|t| (file.to_string(), t))
        .map_err(|e| format!("cannot read {file}: {e}"))
}

fn check(file: &str, seed: u64, json: Option<PathBuf>, task: Option<String>) -> ExitCode {
    let (label, text) = match load(file) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{label}: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = &task {
        if !problem.tasks.iter().any(|x| &x.name == t) {
            let names: Vec<&str> = problem.tasks.iter().map(|x| x.name.as_str()).collect();
            eprintln!("error: no task named '{t}' (tasks: {})", names.join(", "));
            return ExitCode::from(2);
        }
    }
    let report = run_tasks(&problem, seed, task.as_deref());
    print!("{}", report.human());
    if let Some(path) = json {
        let lines = report.json_lines();
        if path.as_os_str() == "-" {
            print!("{lines}");
        } else if let Err(e) = std::fs::write(&path, lines) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn examples(run: bool, seed: u64) -> ExitCode {
    let mut code = 0u8;
    for f in catalog() {
        if !run {
            println!("{:<24} {}", f.name, f.summary);
            continue;
        }
        let report = match parse_problem(f.text) {
            Ok(p) => run_tasks(&p, seed, None),
            Err(e) => {
                println!("{:<24} ERROR {e}", f.name);
                code = 2;
                continue;
            }
        };
        let status = if report.passed() { "pass" } else { "FAIL" };
        println!("{:<24} {status} ({} tasks)", f.name, report.tasks.len());
        if !report.passed() {
            print!("{}", report.human());
            code = code.max(1);
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Check { file, seed, json, task } => check(&file, seed, json, task),
        Command::Examples { run, seed } => examples(run, seed),
    }
}
