use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pointisland::asymptotics::similarity_snapshot;
use pointisland::centre_manifold::{default_order, expand};
use pointisland::export::{write_observables_csv, write_snapshot_csv, write_trajectory_csv};
use pointisland::integrator::{log_checkpoints, IntegrationConfig};
use pointisland::qssa::{compare_expansions, qssa_expansion};
use pointisland::rational::{self, Rational};
use pointisland::simulation::simulate_truncated;
use pointisland::{Error, ModelParams};
use pointisland_verify::{Preset, Suite};

const OUT_DIR_ENV: &str = "POINTISLAND_OUT_DIR";

#[derive(Parser)]
#[command(name = "pointisland", version, about = "Point-island rate equations with fragmenting subcritical clusters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the truncated rate equations and write trajectory, observables and summary.
    Simulate(SimulateArgs),
    /// Centre-manifold series and the reduced monomer equation.
    Expand(ExpandArgs),
    /// Compare the centre-manifold and quasi-steady-state reduced equations power by power.
    Compare(CompareArgs),
    /// Run the acceptance criteria and report pass/fail per criterion.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Output {
    /// Output directory [default: $POINTISLAND_OUT_DIR, else ./out]
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Output {
    fn dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    /// Critical island size.
    #[arg(long)]
    i: usize,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    alpha_tilde: Rational,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    beta: Rational,
    /// Final scaled time.
    #[arg(long)]
    t_end: f64,
    /// Truncation size; sized from the predicted front when omitted.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = IntegrationConfig::DEFAULT_RTOL)]
    rtol: f64,
    #[arg(long, default_value_t = IntegrationConfig::DEFAULT_ATOL)]
    atol: f64,
    /// Log-spaced checkpoints between 10⁻² and t_end, plus T = 0.
    #[arg(long, default_value_t = 41)]
    checkpoints: usize,
    /// Initial scaled concentrations c_1,c_2,… (default: empty substrate).
    #[arg(long, value_delimiter = ',')]
    initial: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    i: usize,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    alpha: Rational,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    beta: Rational,
    /// Series order [default: 2i+6]
    #[arg(long)]
    order: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    i: usize,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    alpha: Rational,
    /// Series order [default: 2i+6]
    #[arg(long)]
    order: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Quick,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict the criteria to one critical size.
    #[arg(long)]
    i: Option<usize>,
    #[arg(long, value_enum, default_value = "desk")]
    preset: PresetArg,
    /// Force the truncation size of every simulation.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Compute(String),
    Criteria(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CriticalSizeTooSmall(_)
            | Error::NonPositiveRate { .. }
            | Error::InvalidConfig(_)
            | Error::OrderTooSmall { .. }
            | Error::DimensionMismatch { .. }
            | Error::NegativityViolation { time: 0.0, .. }
            | Error::Parse(_) => Failure::Input(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Expand(a) => expand_cmd(a),
        Command::Compare(a) => compare(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Criteria(ids)) => {
            eprintln!("error: failing criteria: {}", ids.join(", "));
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn prepare(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Compute(format!("{}: {e}", dir.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Compute(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let params = ModelParams::new(a.i, a.alpha_tilde, a.beta)?;
    let mut checkpoints = vec![0.0];
    if a.t_end > 0.01 {
        checkpoints.extend(log_checkpoints(0.01, a.t_end, a.checkpoints.max(2))?);
    } else if a.t_end > 0.0 {
        checkpoints.push(a.t_end);
    }
    let config = IntegrationConfig::new(a.t_end).with_tolerances(a.rtol, a.atol).with_checkpoints(checkpoints);
    let run = simulate_truncated(&params, &a.initial, a.n_max, &config)?;

    let dir = a.output.dir();
    prepare(&dir)?;
    match a.format {
        Format::Csv => write_trajectory_csv(create(&dir.join("trajectory.csv"))?, &run.trajectory, run.n_max)?,
        Format::Json => {
            let t = &run.trajectory;
            write_json(
                &dir.join("trajectory.json"),
                &json!({"n_max": run.n_max, "T": t.times, "rho": t.rho, "tau": t.tau, "states": t.states}),
            )?;
        }
    }
    write_observables_csv(create(&dir.join("observables.csv"))?, &params, &run.trajectory)?;
    let last = run.final_state();
    if last.c.iter().any(|&x| x > 0.0) {
        let snapshot = similarity_snapshot(&params, &last.c, last.time)?;
        write_snapshot_csv(create(&dir.join("profile.csv"))?, &snapshot)?;
    }
    let summary = run.summary();
    write_json(
        &dir.join("summary.json"),
        &json!({
            "params": params,
            "tolerances": {"rtol": a.rtol, "atol": a.atol},
            "summary": summary,
        }),
    )?;
    println!(
        "T = {}: {} checkpoints, N_max {}, mass residual {:.3e}, front {:.1}, truncation {}",
        summary.t_end,
        summary.checkpoints,
        summary.n_max,
        summary.max_mass_residual,
        summary.front_position,
        if summary.truncation_adequate { "adequate" } else { "INADEQUATE" }
    );
    println!("wrote {}", dir.display());
    Ok(())
}

fn expand_cmd(a: ExpandArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| default_order(a.i));
    let e = expand(a.i, &a.alpha, &a.beta, order)?;
    let dir = a.output.dir();
    prepare(&dir)?;
    write_json(&dir.join("expansion.json"), &e.to_json())?;
    let ode = e.ode_string();
    fs::write(dir.join("ode.txt"), format!("{ode}\n"))?;
    println!("{ode}");
    Ok(())
}

fn compare(a: CompareArgs) -> Result<(), Failure> {
    let order = a.order.unwrap_or_else(|| default_order(a.i));
    let cm = expand(a.i, &a.alpha, &Rational::from_integer(1.into()), order)?;
    let q = qssa_expansion(a.i, &a.alpha, order)?;
    let report = compare_expansions(&cm, &q)?;
    let dir = a.output.dir();
    prepare(&dir)?;
    write_json(
        &dir.join("comparison.json"),
        &json!({
            "centre_manifold": cm.to_json(),
            "qssa": q.to_json(),
            "report": report,
        }),
    )?;
    match report.first_difference {
        Some(p) => println!(
            "first divergence at power {p}: centre manifold {}, quasi-steady state {}",
            report.rows[p].cm_coeff, report.rows[p].qssa_coeff
        ),
        None => println!("no divergence through order {order}"),
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let preset = match a.preset {
        PresetArg::Desk => Preset::Desk,
        PresetArg::Quick => Preset::Quick,
    };
    let mut suite = Suite::new(preset);
    if let Some(i) = a.i {
        ModelParams::new(i, Rational::from_integer(1.into()), Rational::from_integer(1.into()))?;
        suite = suite.with_i(i);
    }
    if let Some(n) = a.n_max {
        suite = suite.with_n_max(n);
    }
    if let Some(s) = a.seed {
        suite = suite.with_seed(s);
    }
    let mut outcomes = Vec::new();
    for id in suite.ids() {
        let o = suite.run(id);
        println!("{o}");
        outcomes.push(o);
    }
    let failing: Vec<String> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id.to_string()).collect();
    let dir = a.output.dir();
    prepare(&dir)?;
    write_json(
        &dir.join("verify.json"),
        &json!({
            "preset": preset,
            "i": a.i,
            "n_max": a.n_max,
            "pass": failing.is_empty(),
            "criteria": outcomes,
        }),
    )?;
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Criteria(failing))
    }
}
