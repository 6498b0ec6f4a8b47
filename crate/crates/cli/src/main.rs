//! `branchflow`: growth bounds and flow simulation for branched surfaces.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 too many
//! tangential trajectories.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use branchflow::bound::{family_cross_check, frame_length_bound, growth_rate, BoundResult, GrowthReport, FamilyCrossCheck};
use branchflow::report::{bound_csv, sig12, sim_csv, write_event_log};
use branchflow::sim::{
    realize, sample_initial, simulate, simulate_with_events, trace, Execution, SamplePlan,
    SimEstimates,
};
use branchflow::surface::{family_tori_on_solid_torus, validate, BranchedSurfaceSpec};
use branchflow::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "branchflow", version, about = "Growth bounds and geodesic-flow simulation for branched surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth rate and window-frame length bound of a spec.
    Bound(BoundArgs),
    /// Monte Carlo crossing rates, entropy rate and sphere lengths.
    Simulate(SimulateArgs),
    /// The n punctured tori on a solid torus, with both bound formulas.
    Family(FamilyArgs),
    /// Event log of a single trajectory.
    Trace(TraceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Spec file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Bind a length parameter, e.g. `--param a=6`. Repeatable.
    #[arg(long = "param", value_parser = parse_binding)]
    params: Vec<(String, f64)>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trajectories: usize,
    /// Length of each trajectory.
    #[arg(long, default_value_t = 200.0)]
    budget: f64,
    /// Sphere radius to estimate. Repeatable.
    #[arg(long = "radius")]
    radii: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write every crossing as line-delimited JSON.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Run trajectories on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100.0)]
    budget: f64,
    #[arg(long, default_value_t = 0)]
    trajectory: u64,
}

fn parse_binding(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("`{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

enum Failure {
    Io(String),
    Invalid(String),
    Tangential(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Tangential(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Invalid(m) | Failure::Tangential(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Tangential { .. } | Error::TangentialOverrun { .. } => Failure::Tangential(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Loaded {
    spec: BranchedSurfaceSpec,
    hash: String,
}

fn load(common: &Common) -> Result<Loaded, Failure> {
    let bytes = fs::read(&common.input)
        .map_err(|e| Failure::Io(format!("{}: {e}", common.input.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| Failure::Invalid(format!("{}: {e}", common.input.display())))?;
    let spec = BranchedSurfaceSpec::from_json(&text)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", common.input.display())))?;
    let spec = spec.with_bindings(common.params.iter().map(|(n, v)| (n.as_str(), *v)));
    let report = validate(&spec);
    for w in &report.warnings {
        eprintln!("warning: [{}] {}: {}", w.rule, w.element, w.message);
    }
    if !report.ok {
        for v in &report.violations {
            eprintln!("violation: [{}] {}: {}", v.rule, v.element, v.message);
        }
        return Err(Failure::Invalid(format!("{} violation(s)", report.violations.len())));
    }
    Ok(Loaded {
        spec,
        hash: sha256_hex(&bytes),
    })
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    let result = match output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure::Io(format!("writing report: {e}")))
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn with_meta(mut csv: String, hash: &str, columns: usize) -> String {
    // The hash goes in the value column of a trailing meta row.
    let value_column = if columns > 5 { 4 } else { 2 };
    let mut cells = vec![String::new(); columns];
    cells[0] = "meta".into();
    cells[1] = "input_sha256".into();
    cells[value_column] = hash.into();
    csv.push_str(&cells.join(","));
    csv.push('\n');
    csv
}

#[derive(Serialize)]
struct BoundReport<'a> {
    command: &'static str,
    input_sha256: &'a str,
    parameters: &'a std::collections::BTreeMap<String, f64>,
    growth: &'a GrowthReport,
    bound: &'a BoundResult,
}

fn run_bound(args: &BoundArgs) -> Outcome {
    let loaded = load(&args.common)?;
    let growth = growth_rate(&loaded.spec)?;
    let bound = frame_length_bound(&loaded.spec)?;
    let text = match args.format {
        Format::Json => json_text(&BoundReport {
            command: "bound",
            input_sha256: &loaded.hash,
            parameters: &loaded.spec.parameters,
            growth: &growth,
            bound: &bound,
        }),
        Format::Csv => with_meta(bound_csv(&growth, &bound), &loaded.hash, 5),
    };
    emit(args.common.output.as_deref(), &text)
}

#[derive(Serialize)]
struct SimReport<'a> {
    command: &'static str,
    input_sha256: &'a str,
    parameters: &'a std::collections::BTreeMap<String, f64>,
    twists: &'a std::collections::BTreeMap<String, f64>,
    plan: &'a SamplePlan,
    estimates: &'a SimEstimates,
}

fn run_simulate(args: &SimulateArgs) -> Outcome {
    let loaded = load(&args.common)?;
    let surface = realize(&loaded.spec)?;
    let execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let plan = SamplePlan::new(args.trajectories, args.budget).with_execution(execution);
    let estimates = match &args.events {
        Some(path) => {
            let (est, events) = simulate_with_events(&surface, &plan, &args.radii, args.seed)?;
            let mut buf = Vec::new();
            write_event_log(&mut buf, &events).expect("writing to memory");
            fs::write(path, buf).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            est
        }
        None => simulate(&surface, &plan, &args.radii, args.seed)?,
    };
    for w in &estimates.warnings {
        eprintln!("warning: {w}");
    }
    let text = match args.format {
        Format::Json => json_text(&SimReport {
            command: "simulate",
            input_sha256: &loaded.hash,
            parameters: &loaded.spec.parameters,
            twists: &loaded.spec.twists,
            plan: &plan,
            estimates: &estimates,
        }),
        Format::Csv => with_meta(sim_csv(&estimates), &loaded.hash, 9),
    };
    emit(args.common.output.as_deref(), &text)
}

#[derive(Serialize)]
struct FamilyReport<'a> {
    command: &'static str,
    n: usize,
    spec_sha256: &'a str,
    spec: &'a BranchedSurfaceSpec,
    cross_check: &'a FamilyCrossCheck,
    bound: &'a BoundResult,
}

fn run_family(args: &FamilyArgs) -> Outcome {
    let spec = family_tori_on_solid_torus(args.n)?;
    let check = family_cross_check(args.n)?;
    let bound = frame_length_bound(&spec)?;
    let hash = sha256_hex(spec.to_json().as_bytes());
    let text = match args.format {
        Format::Json => json_text(&FamilyReport {
            command: "family",
            n: args.n,
            spec_sha256: &hash,
            spec: &spec,
            cross_check: &check,
            bound: &bound,
        }),
        Format::Csv => {
            let mut csv = String::from("kind,name,value\n");
            csv.push_str(&format!("family,n,{}\n", args.n));
            csv.push_str(&format!("family,formula_bound,{}\n", sig12(check.formula_bound)));
            csv.push_str(&format!("family,closed_form_bound,{}\n", sig12(check.closed_form_bound)));
            csv.push_str(&format!("family,ratio,{}\n", sig12(check.ratio)));
            csv.push_str(&format!("family,discrepancy,{}\n", sig12(check.discrepancy)));
            csv.push_str(&format!("meta,spec_sha256,{hash}\n"));
            csv
        }
    };
    if args.n >= 4 {
        eprintln!("note: {}", check.note);
    }
    emit(args.output.as_deref(), &text)
}

fn run_trace(args: &TraceArgs) -> Outcome {
    let loaded = load(&args.common)?;
    let surface = realize(&loaded.spec)?;
    let start = sample_initial(&surface, args.seed, args.trajectory)?;
    let end = trace(&surface, start, args.budget, args.seed)?;
    let mut buf = Vec::new();
    write_event_log(&mut buf, &end.history).expect("writing to memory");
    emit(args.common.output.as_deref(), std::str::from_utf8(&buf).expect("utf-8 json"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bound(a) => run_bound(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Family(a) => run_family(a),
        Command::Trace(a) => run_trace(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let overrun: Failure = Error::TangentialOverrun { discarded: 2, total: 10 }.into();
        assert_eq!(overrun.code(), 3);
        let tangential: Failure = Error::Tangential { trajectory: 0, arclength: 1.0 }.into();
        assert_eq!(tangential.code(), 3);
        assert_eq!(Failure::from(Error::FamilyTooSmall(2)).code(), 2);
        assert_eq!(Failure::Io(String::new()).code(), 1);
    }

    #[test]
    fn bindings() {
        assert_eq!(parse_binding("a=6").unwrap(), ("a".to_string(), 6.0));
        assert_eq!(parse_binding(" x = 1.5 ").unwrap(), ("x".to_string(), 1.5));
        assert!(parse_binding("a").is_err());
        assert!(parse_binding("a=six").is_err());
    }

    #[test]
    fn digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
