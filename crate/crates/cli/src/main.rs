use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geomod_core::reconstruction::{reconstruct_with, OracleSpec, ReconstructOptions, ReconstructionReport};
use geomod_core::suites::{self, SuiteReport};
use geomod_core::tolerances::RECONSTRUCTION_TOL;
use serde::Serialize;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "geomod", version, about = "Wedge geometry, Poincaré reconstruction and modular-theory checks")]
struct Cli {
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance override; each command has its own default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reconstruct the point map behind a wedge oracle given as JSON.
    Reconstruct {
        #[arg(long)]
        oracle: PathBuf,
    },
    /// Run a seeded invariant suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Run a named demonstration.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Wedges,
    Poincare,
    Sl2c,
    Reconstruction,
    Desitter,
    Modular,
    Coxeter,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Wedges => "wedges",
            Suite::Poincare => "poincare",
            Suite::Sl2c => "sl2c",
            Suite::Reconstruction => "reconstruction",
            Suite::Desitter => "desitter",
            Suite::Modular => "modular",
            Suite::Coxeter => "coxeter",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Demo {
    Counterexample,
    PairedNet,
    Borchers,
    Factorization,
}

/// A rendered report and the exit code that goes with it.
struct Outcome {
    json: String,
    text: String,
    code: u8,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).unwrap_or_else(|e| format!("{{\"error\": \"serialization failed: {e}\"}}"))
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
    message: String,
}

fn error_outcome(kind: &str, message: String, code: u8) -> Outcome {
    let text = format!("{kind}: {message}\n");
    Outcome { json: to_json(&ErrorReport { error: kind.into(), message }), text, code }
}

fn reconstruct(path: &PathBuf, seed: u64, tol: Option<f64>) -> Outcome {
    let raw = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return error_outcome("io", format!("{}: {e}", path.display()), EXIT_ERROR),
    };
    let spec: OracleSpec = match serde_json::from_str(&raw) {
        Ok(s) => s,
        Err(e) => return error_outcome("parse", e.to_string(), EXIT_ERROR),
    };
    let oracle = match spec.build() {
        Ok(o) => o,
        Err(e) => return error_outcome("invalid_oracle", e.to_string(), EXIT_ERROR),
    };
    let opts = ReconstructOptions { seed, verify_samples: 50, tol: tol.unwrap_or(RECONSTRUCTION_TOL) };
    match reconstruct_with(oracle.as_ref(), &opts) {
        Ok(r) => Outcome { json: to_json(&r), text: reconstruction_text(&r), code: EXIT_OK },
        Err(e) => error_outcome("reconstruction_failed", e.to_string(), EXIT_NEGATIVE),
    }
}

fn reconstruction_text(r: &ReconstructionReport) -> String {
    let e = &r.element;
    let lambda = serde_json::to_string(e.lambda()).unwrap_or_default();
    let a = serde_json::to_string(&e.a()).unwrap_or_default();
    let mut s = format!("gamma: {}\nlambda: {lambda}\na: {a}\n", e.gamma());
    let _ = writeln!(s, "fit residual: {:e}\nsamples checked: {}", r.fit_residual, r.samples_checked);
    let _ = writeln!(s, "condition estimate: {:e}\ninvolutive: {}", r.condition_estimate, r.involutive);
    s
}

fn suite_text(r: &SuiteReport) -> String {
    let mut s = format!("suite {} (seed {}): {}\n", r.suite, r.seed, if r.passed { "PASS" } else { "FAIL" });
    for c in &r.checks {
        let _ = write!(s, "  {}: {}/{}", c.name, c.passed, c.samples);
        if let (Some(d), Some(t)) = (c.max_deviation, c.tolerance) {
            let _ = write!(s, " (max deviation {d:.1e}, tolerance {t:.0e})");
        }
        s.push('\n');
    }
    for l in &r.lines {
        let _ = writeln!(s, "{l}");
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(s, "witness: {w}");
    }
    s
}

fn verify(suite: Suite, seed: u64, tol: Option<f64>) -> Outcome {
    match suites::run_suite(suite.name(), seed, tol) {
        Some(r) => Outcome { json: to_json(&r), text: suite_text(&r), code: if r.passed { EXIT_OK } else { EXIT_ERROR } },
        None => error_outcome("usage", format!("unknown suite {}", suite.name()), EXIT_ERROR),
    }
}

fn demo(name: Demo, seed: u64, tol: Option<f64>) -> Outcome {
    let tol = tol.unwrap_or(1e-9);
    let verdict = |ok: bool| if ok { EXIT_OK } else { EXIT_NEGATIVE };
    match name {
        Demo::Counterexample => match suites::demo_counterexample(seed) {
            Ok(r) => {
                let text = format!(
                    "triple nonempty: {}\nwitness: {:?} (margin {:.3e})\nimage empty: {} ({} certificates)\n",
                    r.triple_nonempty,
                    r.witness,
                    r.witness_margin,
                    r.image_empty,
                    r.image_certificates.len()
                );
                Outcome { code: verdict(suites::counterexample_holds(&r)), json: to_json(&r), text }
            }
            Err(e) => error_outcome("internal", e.to_string(), EXIT_ERROR),
        },
        Demo::PairedNet => {
            let r = suites::demo_paired_net(seed);
            let text = format!(
                "reflection consistent: {} over {} probes (max deviation {:.1e})\nflow agrees: {}\n",
                r.reflection_consistent, r.probes, r.reflection_max_deviation, r.flow_agrees
            );
            Outcome { code: verdict(r.reflection_consistent && !r.flow_agrees), json: to_json(&r), text }
        }
        Demo::Borchers => {
            let r = suites::demo_borchers();
            let text = format!(
                "grid points: {}\nmax deviation: {:.1e}\ngroup law deviation: {:.1e}\n",
                r.grid_points, r.max_deviation, r.group_law_deviation
            );
            Outcome { code: verdict(r.max_deviation < tol), json: to_json(&r), text }
        }
        Demo::Factorization => {
            let r = suites::demo_factorization(seed, 200, tol);
            let text = format!(
                "{}/{} round trips pass (max deviation {:.1e}, longest product {}, all even {})\n",
                r.passed, r.samples, r.max_deviation, r.max_length, r.all_even
            );
            Outcome { code: verdict(r.passed == r.samples), json: to_json(&r), text }
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Reconstruct { oracle } => reconstruct(oracle, cli.seed, cli.tol),
        Command::Verify { suite } => verify(*suite, cli.seed, cli.tol),
        Command::Demo { name } => demo(*name, cli.seed, cli.tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: --tol must be a positive number");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    let outcome = match std::panic::catch_unwind(|| run(&cli)) {
        Ok(o) => o,
        Err(_) => error_outcome("internal", "unexpected internal failure".into(), EXIT_ERROR),
    };
    let body = match cli.format {
        Format::Json => outcome.json + "\n",
        Format::Text => outcome.text,
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_ERROR);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(outcome.code)
}
