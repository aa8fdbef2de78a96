//! `divisi` — analyze one-step P-divisibility of system-environment
//! unitary dynamics from the command line.
//!
//! Exit codes: 0 success, 2 usage or parse failure, 3 domain validation
//! failure (non-unitary matrix, invalid state, ...).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use divisi_core::channels::{UnitalityReport, UnitaryDilation, CHANNEL_TOL};
use divisi_core::divisibility::{
    probe_step_with, theorem2_report, witness_search, Metric, StepReport, Theorem2Report,
    WitnessConfig, VERDICT_TOL,
};
use divisi_core::formats::{MatrixJson, StateJson};
use divisi_core::scenarios::{build_scenario, run_scenario, Mode, ScenarioName, PAPER_VERDICT_TOL};
use divisi_core::states::{Bipartition, DensityMatrix, PureState, Validation};
use divisi_core::{ComplexMatrix, Error};

mod output;

use output::{print_report_table, print_witness_table};

#[derive(Parser)]
#[command(
    name = "divisi",
    version,
    about = "One-step P-divisibility analysis of system-environment unitary dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Paper,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Paper => Mode::PaperTruncated,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Trace,
    Hs,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Trace => Metric::TraceNorm,
            MetricArg::Hs => Metric::HilbertSchmidt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

#[derive(Args)]
struct SplitArgs {
    /// Contiguous split `NS:NE` (first NS qubits system, last NE environment)
    #[arg(long)]
    split: Option<String>,
    /// Comma-separated system qubit indices, e.g. `0,2` (environment is
    /// the complement)
    #[arg(long, conflicts_with = "split")]
    system: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a bundled scenario (bell, ghz or w)
    Scenario {
        /// Scenario name: bell, ghz or w
        name: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = MetricArg::Trace)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
    },
    /// Analyze a user-supplied unitary acting on a pair of joint states
    Analyze {
        /// Unitary file `{"qubits": N, "matrix": [...]}`
        #[arg(long)]
        unitary: PathBuf,
        /// First joint input state file
        #[arg(long)]
        state1: PathBuf,
        /// Second joint input state file
        #[arg(long)]
        state2: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, value_enum, default_value_t = MetricArg::Trace)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
        /// Project a defective matrix to the nearest unitary before
        /// analyzing
        #[arg(long)]
        repair_polar: bool,
        /// Accepted max-entry deviation of `U^dag U` from the identity
        #[arg(long, default_value_t = CHANNEL_TOL)]
        unitary_tol: f64,
        /// Environment initial state file for the induced system channel
        /// (default: all-zeros ket)
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Search for a pair of inputs whose system distance grows
    Witness {
        #[arg(long)]
        unitary: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        /// Optimize over correlated joint pure inputs instead of product
        /// inputs
        #[arg(long)]
        correlated: bool,
        #[arg(long, default_value_t = 16)]
        restarts: u32,
        #[arg(long, default_value_t = 400)]
        iters: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hill-climbing step size
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        /// Environment initial state file (default: all-zeros ket)
        #[arg(long)]
        env: Option<PathBuf>,
        /// Pure state file seeding restart 0 (first member of the pair)
        #[arg(long, requires = "init2")]
        init1: Option<PathBuf>,
        /// Pure state file seeding restart 0 (second member of the pair)
        #[arg(long, requires = "init1")]
        init2: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Validate a unitary or state file
    Validate {
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Write a bundled scenario's unitary and input states as JSON files
    Export {
        /// Scenario name: bell, ghz or w
        name: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Output directory (created if missing)
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Analysis payload shared by `scenario` and `analyze`, so exporting a
/// scenario and re-analyzing it reproduces the report byte for byte.
#[derive(Serialize)]
struct ReportJson {
    step: StepReport,
    theorem2: Theorem2Report,
    system_channel: UnitalityReport,
}

#[derive(Serialize)]
struct WitnessJson {
    growth: f64,
    iterations: u64,
    seed: u64,
    restart: u32,
    correlated: bool,
    state1: StateJson,
    state2: StateJson,
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownScenario { .. } => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json parse error: {e}"))
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of a pipe goes away (e.g. `| head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// `DIVISI_TOL` overrides the verdict tie tolerance.
fn verdict_tolerance(default: f64) -> Result<f64, CliError> {
    match std::env::var("DIVISI_TOL") {
        Ok(text) => text
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("DIVISI_TOL is not a number: {text}"))),
        Err(_) => Ok(default),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn read_unitary(path: &Path) -> Result<(usize, ComplexMatrix), CliError> {
    let m: MatrixJson = read_json(path)?;
    let matrix = m.to_matrix().map_err(|e| CliError::Domain(e.to_string()))?;
    Ok((m.qubits, matrix))
}

fn read_density(path: &Path, validation: Validation) -> Result<DensityMatrix, CliError> {
    let s: StateJson = read_json(path)?;
    Ok(s.to_density(validation)?)
}

fn read_pure(path: &Path) -> Result<PureState, CliError> {
    let s: StateJson = read_json(path)?;
    match s {
        StateJson::Pure(p) => {
            let amps = p.amps.iter().map(|&[re, im]| divisi_core::c64(re, im)).collect();
            Ok(PureState::new(p.qubits, amps)?)
        }
        StateJson::Density(_) => Err(CliError::Domain(
            "witness initial states must be pure (use an \"amps\" file)".into(),
        )),
    }
}

fn parse_split(args: &SplitArgs, total_qubits: usize) -> Result<Bipartition, CliError> {
    if let Some(spec) = &args.split {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 2 {
            return Err(CliError::Usage(format!("split must look like `2:1`, got `{spec}`")));
        }
        let ns: usize = parts[0]
            .parse()
            .map_err(|_| CliError::Usage(format!("bad system count in split `{spec}`")))?;
        let ne: usize = parts[1]
            .parse()
            .map_err(|_| CliError::Usage(format!("bad environment count in split `{spec}`")))?;
        if ns + ne != total_qubits {
            return Err(CliError::Domain(format!(
                "split {ns}:{ne} covers {} qubits but the unitary acts on {total_qubits}",
                ns + ne
            )));
        }
        Ok(Bipartition::contiguous(ns, ne)?)
    } else if let Some(list) = &args.system {
        let system: Vec<usize> = list
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("bad qubit list `{list}`")))?;
        Ok(Bipartition::from_system(system, total_qubits)?)
    } else {
        Err(CliError::Usage("one of --split or --system is required".into()))
    }
}

fn default_env(split: &Bipartition) -> DensityMatrix {
    PureState::basis(split.environment_qubits(), 0).to_density()
}

fn emit_report(
    dilation: &UnitaryDilation,
    s1: &DensityMatrix,
    s2: &DensityMatrix,
    metric: Metric,
    tolerance: f64,
    format: FormatArg,
    warnings: &[String],
) -> Result<(), CliError> {
    let step = probe_step_with(dilation, s1, s2, metric, tolerance)?;
    let theorem2 = theorem2_report(dilation, s1, s2)?;
    let unital_tol = dilation.unitary_tol().max(CHANNEL_TOL);
    let system_channel = dilation.to_kraus()?.is_unital(unital_tol)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let report = ReportJson { step, theorem2, system_channel };
    match format {
        FormatArg::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        FormatArg::Table => print_report_table(&report.step, &report.theorem2, &report.system_channel),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scenario { name, mode, metric, format } => {
            let name: ScenarioName = name.parse()?;
            let scenario = build_scenario(name, mode.into());
            let tolerance = verdict_tolerance(scenario.verdict_tolerance())?;
            // run through the library first so table/json agree with it
            let full = run_scenario(&scenario, metric.into())?;
            let dilation = scenario.dilation()?;
            emit_report(
                &dilation,
                &scenario.s1,
                &scenario.s2,
                metric.into(),
                tolerance,
                format,
                &full.warnings,
            )
        }
        Command::Analyze {
            unitary,
            state1,
            state2,
            split,
            metric,
            format,
            repair_polar,
            unitary_tol,
            env,
        } => {
            let (qubits, mut u) = read_unitary(&unitary)?;
            let split = parse_split(&split, qubits)?;
            if repair_polar {
                u = divisi_core::channels::nearest_unitary(&u)?;
            }
            let deviation = u.unitarity_deviation();
            if deviation > unitary_tol {
                return Err(CliError::Domain(
                    Error::NotUnitary { deviation, tolerance: unitary_tol }.to_string(),
                ));
            }
            let validation =
                if unitary_tol > CHANNEL_TOL { Validation::Lenient } else { Validation::Strict };
            let env_init = match env {
                Some(path) => read_density(&path, validation)?,
                None => default_env(&split),
            };
            let s1 = read_density(&state1, validation)?;
            let s2 = read_density(&state2, validation)?;
            let dilation = UnitaryDilation::with_tolerance(u, split, env_init, unitary_tol)?;
            let default_tol =
                if unitary_tol > CHANNEL_TOL { PAPER_VERDICT_TOL } else { VERDICT_TOL };
            let tolerance = verdict_tolerance(default_tol)?;
            emit_report(&dilation, &s1, &s2, metric.into(), tolerance, format, &[])
        }
        Command::Witness {
            unitary,
            split,
            correlated,
            restarts,
            iters,
            seed,
            step,
            env,
            init1,
            init2,
            format,
        } => {
            let (qubits, u) = read_unitary(&unitary)?;
            let split = parse_split(&split, qubits)?;
            let env_init = match env {
                Some(path) => read_density(&path, Validation::Strict)?,
                None => default_env(&split),
            };
            let dilation = UnitaryDilation::new(u, split, env_init)?;
            let mut init_pairs = Vec::new();
            if let (Some(p1), Some(p2)) = (init1, init2) {
                init_pairs.push((read_pure(&p1)?, read_pure(&p2)?));
            }
            let cfg = WitnessConfig { restarts, iters, step, seed, correlated, init_pairs };
            let result = witness_search(&dilation, &cfg)?;
            let payload = WitnessJson {
                growth: result.growth,
                iterations: result.iterations,
                seed: result.seed,
                restart: result.restart,
                correlated,
                state1: StateJson::from_density(&result.state1),
                state2: StateJson::from_density(&result.state2),
            };
            match format {
                FormatArg::Json => println!("{}", serde_json::to_string_pretty(&payload).unwrap()),
                FormatArg::Table => print_witness_table(&result, correlated),
            }
            Ok(())
        }
        Command::Validate { unitary, state } => {
            match (unitary, state) {
                (Some(path), None) => {
                    let (_, u) = read_unitary(&path)?;
                    let deviation = u.unitarity_deviation();
                    if deviation > CHANNEL_TOL {
                        return Err(CliError::Domain(
                            Error::NotUnitary { deviation, tolerance: CHANNEL_TOL }.to_string(),
                        ));
                    }
                    println!("unitary ok (deviation {deviation:.3e})");
                    Ok(())
                }
                (None, Some(path)) => {
                    let rho = read_density(&path, Validation::Strict)?;
                    println!(
                        "state ok ({} qubits, purity {:.6})",
                        rho.qubits(),
                        rho.purity()
                    );
                    Ok(())
                }
                _ => Err(CliError::Usage(
                    "validate needs exactly one of --unitary or --state".into(),
                )),
            }
        }
        Command::Export { name, mode, out_dir } => {
            let name: ScenarioName = name.parse()?;
            let scenario = build_scenario(name, mode.into());
            std::fs::create_dir_all(&out_dir)?;
            let qubits = scenario.split.total_qubits();
            let files = [
                ("unitary.json", serde_json::to_string_pretty(&MatrixJson::from_matrix(
                    qubits,
                    &scenario.u,
                ))
                .unwrap()),
                ("state1.json", serde_json::to_string_pretty(&StateJson::from_density(&scenario.s1)).unwrap()),
                ("state2.json", serde_json::to_string_pretty(&StateJson::from_density(&scenario.s2)).unwrap()),
                ("state1_amps.json", serde_json::to_string_pretty(&StateJson::from_pure(&scenario.s1_pure)).unwrap()),
                ("state2_amps.json", serde_json::to_string_pretty(&StateJson::from_pure(&scenario.s2_pure)).unwrap()),
            ];
            for (file, text) in &files {
                std::fs::write(out_dir.join(file), text)?;
            }
            println!(
                "wrote {} to {} (split {}:{})",
                files.map(|(name, _)| name).join(", "),
                out_dir.display(),
                scenario.split.system_qubits(),
                scenario.split.environment_qubits()
            );
            Ok(())
        }
    }
}
