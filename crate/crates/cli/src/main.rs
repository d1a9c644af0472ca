use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kerr_jcm::check::run_criteria;
use kerr_jcm::run::{
    emit, figure_preset, run, write_series, AtomInit, FieldModel, Figure, Filling, Observable, ObservableSeries,
    OutputFormat, Picture, RunConfig, ORACLE_DEVIATION_LIMIT,
};
use kerr_jcm::{Execution, JcmError};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "jcm",
    version,
    about = "Jaynes-Cummings dynamics with a spin-j (Kerr) field mode"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate observables on a uniform grid of scaled time.
    Run(RunArgs),
    /// Regenerate the data behind a named figure.
    Figure(FigureArgs),
    /// Run the numerical acceptance suite.
    Check(CheckArgs),
}

#[derive(Args)]
struct Exec {
    /// Evaluate the time grid on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Exec {
    fn mode(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Maximal excitation number 2j.
    #[arg(long, default_value_t = 1000, conflicts_with = "standard")]
    two_j: u32,
    /// Use the harmonic-oscillator field (2j -> infinity) instead.
    #[arg(long)]
    standard: bool,
    #[arg(long, group = "filling")]
    mean_n: Option<f64>,
    /// Binomial parameter <n>/2j.
    #[arg(long, group = "filling")]
    chi: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 60.0)]
    t_max: f64,
    #[arg(long, default_value_t = 3000)]
    steps: usize,
    /// Comma-separated subset of inversion, mandel_q, quadratures.
    #[arg(long, value_delimiter = ',', default_value = "inversion")]
    observables: Vec<Observable>,
    /// schrodinger or interaction.
    #[arg(long, default_value = "schrodinger")]
    picture: Picture,
    /// Initial atomic level: excited or ground.
    #[arg(long, default_value = "excited", value_parser = parse_atom)]
    atom: AtomInit,
    /// Phase of the coherent-state parameter.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
    /// Cross-check against direct integration at 10 checkpoints.
    #[arg(long)]
    oracle_check: bool,
    /// csv, or doc (a self-describing JSON document).
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    exec: Exec,
}

#[derive(Args)]
struct FigureArgs {
    /// figure1, figure2a-c, figure3a-c or figure4.
    name: Figure,
    /// Output file; `<name>.csv` when omitted. Multi-series figures get a `_2j<N>` suffix.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[command(flatten)]
    exec: Exec,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    exec: Exec,
}

fn parse_atom(s: &str) -> Result<AtomInit, String> {
    match s {
        "excited" => Ok(AtomInit::Excited),
        "ground" => Ok(AtomInit::Ground),
        other => Err(format!("unknown atomic level `{other}`")),
    }
}

enum Failure {
    Lib(JcmError),
    Numerical(String),
}

impl From<JcmError> for Failure {
    fn from(e: JcmError) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(err: &JcmError) -> u8 {
    match err {
        JcmError::Io { .. } | JcmError::Serialize(_) => EXIT_IO,
        JcmError::Integrator { .. } | JcmError::Truncation { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn run_config(args: &RunArgs) -> RunConfig {
    let filling = match (args.mean_n, args.chi) {
        (_, Some(chi)) => Filling::Chi(chi),
        (Some(mean), None) => Filling::MeanN(mean),
        (None, None) => Filling::MeanN(20.0),
    };
    RunConfig {
        model: if args.standard {
            FieldModel::Standard
        } else {
            FieldModel::Spin { two_j: args.two_j }
        },
        filling,
        omega: args.omega,
        omega0: args.omega0,
        lambda: args.lambda,
        t_max: args.t_max,
        steps: args.steps,
        observables: args.observables.iter().copied().collect::<BTreeSet<_>>(),
        picture: args.picture,
        atom_init: args.atom,
        phase_phi: args.phase,
        format: args.format,
        output_path: args.output.clone(),
        oracle_check: args.oracle_check,
    }
}

fn write_out(series: &ObservableSeries, format: OutputFormat, path: Option<&Path>) -> Result<(), JcmError> {
    match path {
        Some(path) => emit(series, format, path),
        None => {
            let stdout = io::stdout();
            write_series(series, format, stdout.lock())
        }
    }
}

fn oracle_verdict(series: &ObservableSeries) -> Result<(), Failure> {
    let Some(d) = series.metadata.oracle_max_deviation else {
        return Ok(());
    };
    if series.oracle_passed() == Some(true) {
        eprintln!("oracle check passed: max deviation {d:e}");
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "oracle deviation {d:e} exceeds {ORACLE_DEVIATION_LIMIT:e}"
        )))
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let config = run_config(&args);
    let series = run(&config, args.exec.mode())?;
    write_out(&series, config.format, config.output_path.as_deref())?;
    oracle_verdict(&series)
}

fn suffixed(path: &Path, two_j: u32) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_2j{two_j}.{}", ext.to_string_lossy()),
        None => format!("{stem}_2j{two_j}"),
    };
    path.with_file_name(name)
}

fn cmd_figure(args: FigureArgs) -> Result<(), Failure> {
    let configs = figure_preset(args.name);
    let ext = match args.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Doc => "json",
    };
    let base = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{ext}", args.name)));
    let multi = configs.len() > 1;
    for mut config in configs {
        let path = match (multi, config.model) {
            (true, FieldModel::Spin { two_j }) => suffixed(&base, two_j),
            _ => base.clone(),
        };
        config.format = args.format;
        config.output_path = Some(path.clone());
        let series = run(&config, args.exec.mode())?;
        emit(&series, args.format, &path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let reports = run_criteria(args.exec.mode());
    let mut out = io::stdout().lock();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut failed = 0;
    for r in &reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!r.passed);
        let _ = writeln!(out, "{:>2}  {:<width$}  {verdict}  {}", r.id, r.name, r.detail);
    }
    let _ = writeln!(out, "{} passed, {failed} failed", reports.len() - failed);
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(msg)) => {
            eprintln!("jcm: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Lib(err)) => {
            eprintln!("jcm: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
