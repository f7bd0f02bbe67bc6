//! `mobpred`: simulate a two-route highway junction, train a route classifier
//! on vehicle positions and report its accuracy.
//!
//! Exit codes: 0 success, 1 I/O error, 2 usage or configuration error,
//! 3 data error.

mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mobpred_core::svm::KernelFamily;
use mobpred_core::traffic_sim::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "mobpred", version, about = "Highway route prediction with a kernel SVM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the highway scenario and write a trace CSV.
    Generate(GenerateArgs),
    /// Draw labeled train/test examples from a trace.
    Sample(SampleArgs),
    /// Train a classifier on examples sampled from a trace.
    Train(TrainCmdArgs),
    /// Evaluate accuracy over several test-set sizes.
    Sweep(SweepArgs),
    /// Render examples and decision regions as SVG.
    Plot(PlotArgs),
    /// Convert a SUMO floating-car-data export plus label sidecar to a trace CSV.
    ImportFcd(ImportFcdArgs),
    /// Write a trace as an FCD XML export plus label sidecar.
    ExportFcd(ExportFcdArgs),
    /// Generate, train, sweep and plot with the reference defaults.
    RunPaper(RunPaperArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Scenario file with `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub vehicles: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub route2_probability: Option<f64>,
    #[arg(long)]
    pub spawn_spacing: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    pub trace: PathBuf,
    #[arg(long, default_value_t = 400)]
    pub train_size: usize,
    #[arg(long, default_value_t = 0)]
    pub test_size: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Let test examples come from training vehicles.
    #[arg(long)]
    pub overlap: bool,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    #[arg(long, default_value = "linear", value_parser = parse_family)]
    pub kernel: KernelFamily,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub coef0: Option<f64>,
    /// Box constraint.
    #[arg(short = 'C', long = "c", default_value_t = 0.1)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_passes: usize,
    #[arg(long, default_value_t = 400)]
    pub train_size: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Train on raw coordinates instead of standardized ones.
    #[arg(long)]
    pub no_standardize: bool,
}

#[derive(Args, Debug)]
pub struct TrainCmdArgs {
    pub trace: PathBuf,
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    pub trace: PathBuf,
    /// Evaluate this model instead of training one.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub train: TrainArgs,
    /// `start:stop:step`, a comma list, or a single size.
    #[arg(long, default_value = "10:100:10", value_parser = parse_sizes)]
    pub test_sizes: Sizes,
    #[arg(long)]
    pub report: PathBuf,
    /// Also write the trained model here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset CSV (`vehicle_id,x,y,label`).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 600)]
    pub height: u32,
    /// Scatter only, no decision regions.
    #[arg(long)]
    pub no_shade: bool,
    #[arg(long, value_parser = parse_range)]
    pub x_range: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range)]
    pub y_range: Option<(f64, f64)>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct ImportFcdArgs {
    pub fcd: PathBuf,
    /// Sidecar CSV `vehicle_id,route_label`.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExportFcdArgs {
    pub trace: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub labels_out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RunPaperArgs {
    /// Directory receiving every artifact; created if missing.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 600)]
    pub vehicles: usize,
    #[arg(long, default_value_t = 400)]
    pub train_size: usize,
}

#[derive(Debug, Clone)]
pub struct Sizes(pub Vec<usize>);

fn parse_family(s: &str) -> Result<KernelFamily, String> {
    s.parse().map_err(|e: mobpred_core::svm::SvmError| e.to_string())
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let bad = || format!("invalid test sizes `{s}`");
    let parts: Vec<&str> = s.split(':').collect();
    let sizes = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (usize, usize, usize) = (
                start.parse().map_err(|_| bad())?,
                stop.parse().map_err(|_| bad())?,
                step.parse().map_err(|_| bad())?,
            );
            if step == 0 || start > stop {
                return Err(bad());
            }
            (start..=stop).step_by(step).collect()
        }
        [list] => list
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad()),
    };
    if sizes.contains(&0) {
        return Err("test sizes must be positive".into());
    }
    Ok(Sizes(sizes))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `lo:hi`, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("invalid number `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("invalid number `{b}`"))?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Train(a) => commands::train(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Plot(a) => commands::plot(&a),
        Command::ImportFcd(a) => commands::import_fcd(&a),
        Command::ExportFcd(a) => commands::export_fcd(&a),
        Command::RunPaper(a) => commands::run_paper(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
