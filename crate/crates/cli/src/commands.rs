use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use log::info;
use mobpred_core::dataset::{
    read_dataset_csv, read_fcd_xml, read_trace_csv, split, write_dataset_csv, write_fcd_xml, write_trace_csv,
    Dataset, LabelTable, SplitPools,
};
use mobpred_core::eval::{accuracy_sweep, boundary_report, sweep_with_model, EvaluationReport};
use mobpred_core::svm::{parse_model, train as fit, write_model, KernelSpec, LabeledExample, Standardizer, SvmModel, TrainConfig};
use mobpred_core::traffic_sim::{generate_trace, ScenarioConfig, Trace};

use crate::config::parse_config;
use crate::error::{CliError, Result};
use crate::plot::{render_svg, PlotSpec};
use crate::{
    ExportFcdArgs, GenerateArgs, ImportFcdArgs, PlotArgs, RunPaperArgs, SampleArgs, SweepArgs, TrainArgs, TrainCmdArgs,
};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Runs `body` against a buffered writer on `path`; I/O failures name the path.
fn write_with<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)?;
    out.flush().map_err(|e| CliError::io(path, e))
}

fn load_trace(path: &Path) -> Result<Trace> {
    let trace = read_trace_csv(open(path)?)?;
    if trace.is_empty() {
        return Err(CliError::data(format!("{}: trace has no points", path.display())));
    }
    Ok(trace)
}

fn save_trace(path: &Path, trace: &Trace) -> Result<()> {
    write_with(path, |out| Ok(write_trace_csv(trace, out)?))
}

fn save_dataset(path: &Path, data: &Dataset) -> Result<()> {
    write_with(path, |out| Ok(write_dataset_csv(data, out)?))
}

fn load_model(path: &Path) -> Result<SvmModel> {
    parse_model(&read_text(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(&read_text(path)?)?,
        None => ScenarioConfig::default(),
    };
    if let Some(v) = args.vehicles {
        cfg.num_vehicles = v;
    }
    if let Some(v) = args.steps {
        cfg.num_steps = v;
    }
    if let Some(v) = args.seed {
        cfg.rng_seed = v;
    }
    if let Some(v) = args.route2_probability {
        cfg.route2_probability = v;
    }
    if let Some(v) = args.spawn_spacing {
        cfg.spawn_spacing = v;
    }
    let trace = generate_trace(&cfg)?;
    save_trace(&args.output, &trace)?;
    println!(
        "wrote {} vehicles x {} steps ({} points) to {}",
        trace.num_vehicles(),
        trace.num_steps(),
        trace.points.len(),
        args.output.display()
    );
    Ok(())
}

pub fn sample(args: &SampleArgs) -> Result<()> {
    if args.test_size > 0 && args.test_out.is_none() {
        return Err(CliError::usage("--test-size needs --test-out"));
    }
    let trace = load_trace(&args.trace)?;
    let (train, test) = split(&trace, args.train_size, args.test_size, args.seed, !args.overlap)?;
    save_dataset(&args.train_out, &train)?;
    println!("train: {} examples -> {}", train.len(), args.train_out.display());
    if let Some(path) = &args.test_out {
        save_dataset(path, &test)?;
        println!("test: {} examples -> {}", test.len(), path.display());
    }
    Ok(())
}

fn train_config(args: &TrainArgs) -> TrainConfig {
    TrainConfig {
        c: args.c,
        tol: args.tol,
        max_passes: args.max_passes,
        rng_seed: args.seed,
        standardize: !args.no_standardize,
    }
}

/// Kernel parameters left unset default to values computed on the features
/// the kernel will actually see, i.e. after standardization when enabled.
fn kernel_for(args: &TrainArgs, train: &[LabeledExample]) -> KernelSpec {
    let scaled;
    let seen = match Standardizer::fit(train) {
        Some(s) if !args.no_standardize => {
            scaled = s.transform_examples(train);
            &scaled[..]
        }
        _ => train,
    };
    KernelSpec::with_defaults(args.kernel, seen, args.gamma, args.degree, args.coef0)
}

fn describe(model: &SvmModel) -> Result<()> {
    println!(
        "kernel {}, {} support vectors, converged {} after {} passes",
        model.kernel.family(),
        model.num_support(),
        model.summary.converged,
        model.summary.passes
    );
    println!("boundary: {}", boundary_report(model).map_err(CliError::from)?);
    Ok(())
}

pub fn train(args: &TrainCmdArgs) -> Result<()> {
    let trace = load_trace(&args.trace)?;
    let cfg = train_config(&args.train);
    cfg.validate()?;
    let pools = SplitPools::new(&trace, args.train.train_size, args.train.train_size, args.train.seed)?;
    let kernel = kernel_for(&args.train, &pools.train.examples);
    let model = fit(&pools.train.examples, &kernel, &cfg)?;
    if !model.summary.converged {
        log::warn!("optimizer stopped at the pass limit before converging");
    }
    write_bytes(&args.output, write_model(&model).as_bytes())?;
    describe(&model)?;
    println!("model written to {}", args.output.display());
    Ok(())
}

fn print_report(report: &EvaluationReport) {
    print!("{}", report.to_table());
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let sizes = &args.test_sizes.0;
    let trace = load_trace(&args.trace)?;
    let report = match &args.model {
        Some(path) => {
            let model = load_model(path)?;
            sweep_with_model(&model, &trace, sizes, args.train.seed)?
        }
        None => {
            let cfg = train_config(&args.train);
            cfg.validate()?;
            let t = &args.train;
            let max_test = sizes.iter().copied().max().unwrap_or(0);
            let pools = SplitPools::new(&trace, t.train_size, t.train_size + max_test, t.seed)?;
            let kernel = kernel_for(t, &pools.train.examples);
            let (model, report) = accuracy_sweep(&trace, t.train_size, sizes, &kernel, &cfg, t.seed)?;
            if let Some(path) = &args.model_out {
                write_bytes(path, write_model(&model).as_bytes())?;
            }
            describe(&model)?;
            report
        }
    };
    write_with(&args.report, |out| {
        report.write_csv(out).map_err(|e| CliError::io(&args.report, e))
    })?;
    print_report(&report);
    Ok(())
}

pub fn plot(args: &PlotArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let data = read_dataset_csv(open(&args.data)?)?;
    let spec = PlotSpec {
        width: args.width,
        height: args.height,
        shade_regions: !args.no_shade,
        x_range: args.x_range,
        y_range: args.y_range,
        title: args.title.clone(),
        ..PlotSpec::default()
    };
    let svg = render_svg(&model, &data, &spec)?;
    write_bytes(&args.output, svg.as_bytes())?;
    println!("plotted {} examples to {}", data.len(), args.output.display());
    Ok(())
}

pub fn import_fcd(args: &ImportFcdArgs) -> Result<()> {
    let labels = LabelTable::read_csv(open(&args.labels)?)?;
    let import = read_fcd_xml(open(&args.fcd)?, &labels)?;
    if import.trace.is_empty() {
        return Err(CliError::data(format!(
            "{}: no labeled vehicles found",
            args.fcd.display()
        )));
    }
    save_trace(&args.output, &import.trace)?;
    println!(
        "imported {} vehicles ({} points); skipped {} unlabeled vehicles ({} points)",
        import.trace.num_vehicles(),
        import.trace.points.len(),
        import.skipped_vehicles,
        import.skipped_points
    );
    Ok(())
}

pub fn export_fcd(args: &ExportFcdArgs) -> Result<()> {
    let trace = load_trace(&args.trace)?;
    write_with(&args.output, |out| Ok(write_fcd_xml(&trace, out)?))?;
    write_with(&args.labels_out, |out| Ok(LabelTable::from_trace(&trace).write_csv(out)?))?;
    println!(
        "exported {} vehicles to {} with labels in {}",
        trace.num_vehicles(),
        args.output.display(),
        args.labels_out.display()
    );
    Ok(())
}

/// Test sizes of the reference sweep.
pub const REFERENCE_TEST_SIZES: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

pub fn run_paper(args: &RunPaperArgs) -> Result<()> {
    let dir = &args.out_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let scenario = ScenarioConfig {
        num_vehicles: args.vehicles,
        rng_seed: args.seed,
        ..ScenarioConfig::default()
    };
    let trace = generate_trace(&scenario)?;
    save_trace(&dir.join("trace.csv"), &trace)?;
    info!("generated {} points", trace.points.len());

    let train_args = TrainArgs {
        kernel: mobpred_core::svm::KernelFamily::Linear,
        gamma: None,
        degree: None,
        coef0: None,
        c: TrainConfig::default().c,
        tol: TrainConfig::default().tol,
        max_passes: TrainConfig::default().max_passes,
        train_size: args.train_size,
        seed: args.seed,
        no_standardize: false,
    };
    let cfg = train_config(&train_args);
    let max_test = *REFERENCE_TEST_SIZES.iter().max().unwrap();
    let pools = SplitPools::new(&trace, args.train_size, args.train_size + max_test, args.seed)?;
    let kernel = kernel_for(&train_args, &pools.train.examples);
    let (model, report) = accuracy_sweep(&trace, args.train_size, &REFERENCE_TEST_SIZES, &kernel, &cfg, args.seed)?;

    write_bytes(&dir.join("model.txt"), write_model(&model).as_bytes())?;
    let report_path = dir.join("report.csv");
    write_with(&report_path, |out| report.write_csv(out).map_err(|e| CliError::io(&report_path, e)))?;

    // The sweep draws test set `k` on stream `k`; reuse the first and last.
    let last = REFERENCE_TEST_SIZES.len() - 1;
    let test_small = pools.test_set(REFERENCE_TEST_SIZES[0], 0)?;
    let test_large = pools.test_set(REFERENCE_TEST_SIZES[last], last as u64)?;
    save_dataset(&dir.join("train.csv"), &pools.train)?;
    save_dataset(&dir.join("test_10.csv"), &test_small)?;
    save_dataset(&dir.join("test_100.csv"), &test_large)?;

    let figures: [(&str, &Dataset, String); 3] = [
        ("train.svg", &pools.train, format!("{} training examples", pools.train.len())),
        ("test_10.svg", &test_small, format!("{} testing examples", test_small.len())),
        ("test_100.svg", &test_large, format!("{} testing examples", test_large.len())),
    ];
    for (name, data, title) in figures {
        let spec = PlotSpec {
            title: Some(title),
            ..PlotSpec::default()
        };
        write_bytes(&dir.join(name), render_svg(&model, data, &spec)?.as_bytes())?;
    }

    describe(&model)?;
    print_report(&report);
    println!("artifacts written to {}", dir.display());
    Ok(())
}
