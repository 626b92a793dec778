//! `rfj`: command-line front end of the random Fourier-Jacobi convergence lab.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on bad flags or a
//! violated experiment gate.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rfj_core::lab::{self, ConvergenceReport, ExperimentConfig, DEFAULT_SEED};
use rfj_core::series::catalog_coefficients;
use rfj_core::stable::sample_increments_seeded;
use rfj_core::summation::{check_conditions, FamilyTag, SummationFamily, SummationMatrix};
use rfj_core::{Error, FunctionId, GridSpec, JacobiParams, Result, SeedInfo, StableIndex};

#[derive(Parser)]
#[command(name = "rfj", version, about = "Random Fourier-Jacobi series driven by symmetric stable processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier-Jacobi coefficients a_0..a_N of a catalog function.
    Coeffs(CoeffsArgs),
    /// E|reference - S_n| over the n schedule (alpha in (1, 2]).
    ///
    /// Defaults: alpha 1.5, exp, gamma = delta = 1, n 2,4,8,16, y 0,0.5, grid 4096, 2000 trials.
    ConvergeMean(LabArgs),
    /// P(|θ-sum - reference| > eps) at alpha = 1, with partial sums as contrast.
    ///
    /// Defaults: (C,1), runge, gamma = delta = eta = tau = 0.5, n 8,16,32,64, y 0, eps 0.1, grid 4096, 2000 trials.
    Cesaro(CesaroArgs),
    /// Tail probabilities of ∫ f ρ dX, fitted log-log slope and both bounds.
    ///
    /// Defaults: alpha 1.5, runge, gamma = delta = 1, eps 1,2,4,8, grid 256, 100000 trials.
    TailBound(LabArgs),
    /// Evaluates the regularity conditions T1-T5 of a summation matrix.
    CheckTheta(ThetaArgs),
    /// P(|I(x) - I(y)| > eps) as x approaches y.
    ///
    /// Defaults: alpha 1.5, exp, gamma = delta = 1, y 0, offsets 0.4,0.2,0.1, eps 0.1, grid 4096, 5000 trials.
    WeakContinuity(ContinuityArgs),
    /// Dumps one increment path.
    Increments(IncrementArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpFormat {
    Csv,
    Binary,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; the result goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the verdict summary.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct LabArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Catalog function: p<k>, t<d>, exp, abs, jump, runge, endsing.
    #[arg(long = "f")]
    function: Option<FunctionId>,
    #[arg(long, value_delimiter = ',')]
    n_schedule: Option<Vec<usize>>,
    /// Reference truncation as a multiple of the largest n.
    #[arg(long, default_value_t = 4)]
    n_ref_mult: usize,
    /// Number of grid cells on [-1, 1].
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<f64>>,
    #[arg(long, env = "RFJ_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    output: Output,
}

impl LabArgs {
    fn config(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$target = v.clone();
                }
            )*};
        }
        set!(alpha => alpha, gamma => gamma, delta => delta, eta => eta, tau => tau, function => function,
             n_schedule => n_schedule, grid => grid, trials => trials, eps => eps, y => y);
        cfg.n_ref_mult = self.n_ref_mult;
        cfg.seed = self.seed;
        cfg.workers = self.workers;
        cfg
    }
}

#[derive(Args)]
struct CesaroArgs {
    /// Summation family; anything but cesaro1 runs the general θ-sum experiment.
    #[arg(long, default_value = "cesaro1")]
    family: FamilyTag,
    #[command(flatten)]
    lab: LabArgs,
}

#[derive(Args)]
struct ContinuityArgs {
    /// Distances |x - y|; x = y + offset, mirrored to y - offset past the right end.
    #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1")]
    offsets: Vec<f64>,
    #[command(flatten)]
    lab: LabArgs,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long = "f")]
    function: FunctionId,
    /// Highest coefficient index.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    delta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct ThetaSource {
    /// identity, zero or cesaro<mu>.
    #[arg(long)]
    family: Option<FamilyTag>,
    /// JSON file with a matrix: {"family": .., "rows": [[..], ..]} or a bare array of rows.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    #[command(flatten)]
    source: ThetaSource,
    #[arg(long, default_value_t = 128)]
    n_max: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct IncrementArgs {
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[arg(long, env = "RFJ_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Trial index, i.e. the RNG stream.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: DumpFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Writes the result, and the summary to stdout when the result went to a file
/// (to stderr otherwise, so stdout stays parseable).
fn finish(output: &Output, body: String, summary: &str) -> Result<()> {
    emit(body.as_bytes(), output.out.as_deref())?;
    if !output.quiet {
        if output.out.is_some() {
            print!("{summary}");
        } else {
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn report_out(output: &Output, report: &ConvergenceReport) -> Result<()> {
    let body = match output.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()? + "\n",
    };
    let summary = format!("{} ({} trials, seed {})\n{}", report.experiment, report.config.trials, report.config.seed, report.summary());
    finish(output, body, &summary)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn coeffs(args: &CoeffsArgs) -> Result<()> {
    let p = JacobiParams::new(args.gamma, args.delta)?;
    let c = catalog_coefficients(args.function, args.n, &p)?;
    let body = match args.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "a"])?;
            for (n, a) in c.values.iter().enumerate() {
                w.serialize((n, a))?;
            }
            csv_string(w)?
        }
        Format::Json => {
            let v = serde_json::json!({
                "function": args.function.to_string(),
                "gamma": args.gamma,
                "delta": args.delta,
                "coefficients": c.values,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    finish(&args.output, body, &format!("{} coefficients of {}\n", c.len(), args.function))
}

fn load_matrix(path: &Path) -> Result<SummationMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.is_array() {
        let rows: Vec<Vec<f64>> = serde_json::from_value(value)?;
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "custom".into());
        return SummationMatrix::from_rows(SummationFamily::Custom { label }, rows);
    }
    let m: SummationMatrix<f64> = serde_json::from_value(value)
        .map_err(|e| Error::Format(format!("{}: expected {{\"family\", \"rows\"}} or an array of rows: {e}", path.display())))?;
    SummationMatrix::from_rows(m.family, m.rows)
}

fn check_theta(args: &ThetaArgs) -> Result<()> {
    let theta = match (&args.source.family, &args.source.matrix) {
        (Some(tag), _) => tag.build(args.n_max)?,
        (None, Some(path)) => load_matrix(path)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    let report = check_conditions(&theta, args.n_max)?;
    let body = match args.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["condition", "passed", "estimate", "witness"])?;
            for (name, v) in report.verdicts() {
                w.write_record([name.to_string(), v.passed.to_string(), v.estimate.to_string(), v.witness.clone()])?;
            }
            for (name, ok) in [("Xi1", report.xi1), ("Xi2", report.xi2), ("Xi3", report.xi3)] {
                w.write_record([name, &ok.to_string(), "", ""])?;
            }
            csv_string(w)?
        }
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    finish(&args.output, body, &report.render_text())
}

fn increments(args: &IncrementArgs) -> Result<()> {
    let inc = sample_increments_seeded(StableIndex::new(args.alpha)?, GridSpec::new(args.grid)?, SeedInfo { master_seed: args.seed, stream: args.trial });
    let mut buf = Vec::new();
    match args.format {
        DumpFormat::Csv => inc.write_csv(&mut buf)?,
        DumpFormat::Binary => inc.write_binary(&mut buf)?,
    }
    emit(&buf, args.out.as_deref())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Coeffs(args) => coeffs(&args),
        Command::ConvergeMean(args) => {
            let cfg = args.config(ExperimentConfig::default());
            report_out(&args.output, &lab::mean_convergence_experiment(&cfg)?)
        }
        Command::Cesaro(args) => {
            let base = ExperimentConfig {
                alpha: 1.0,
                gamma: 0.5,
                delta: 0.5,
                eta: 0.5,
                tau: 0.5,
                function: FunctionId::Runge,
                n_schedule: vec![8, 16, 32, 64],
                y: vec![0.0],
                ..Default::default()
            };
            let cfg = args.lab.config(base);
            let report = match args.family {
                FamilyTag::Cesaro(1) => lab::cesaro_summability_experiment(&cfg)?,
                family => lab::theta_probability_experiment(&cfg, family)?,
            };
            report_out(&args.lab.output, &report)
        }
        Command::TailBound(args) => {
            let base = ExperimentConfig {
                function: FunctionId::Runge,
                grid: 256,
                trials: 100_000,
                eps: vec![1.0, 2.0, 4.0, 8.0],
                ..Default::default()
            };
            let cfg = args.config(base);
            report_out(&args.output, &lab::tail_scaling_experiment(&cfg)?)
        }
        Command::WeakContinuity(args) => {
            let base = ExperimentConfig { y: vec![0.0], trials: 5000, ..Default::default() };
            let cfg = args.lab.config(base);
            cfg.validate()?;
            let mut report = None;
            for &y in &cfg.y {
                let r = lab::weak_continuity_sweep(&cfg, y, &args.offsets)?;
                match &mut report {
                    None => report = Some(r),
                    Some(acc) => {
                        let acc: &mut ConvergenceReport = acc;
                        acc.rows.extend(r.rows);
                        acc.verdicts.extend(r.verdicts.into_iter().filter(|v| v.name != "theorem-regime"));
                    }
                }
            }
            report_out(&args.lab.output, &report.expect("validated y list is non-empty"))
        }
        Command::CheckTheta(args) => check_theta(&args),
        Command::Increments(args) => increments(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
