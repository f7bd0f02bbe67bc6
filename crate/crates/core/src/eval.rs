//! Train/evaluate orchestration and the per-test-size accuracy table.

use std::fmt::Write as _;
use std::io::Write;

use thiserror::Error;

use crate::dataset::{Dataset, DatasetError, SplitPools};
use crate::svm::{train, KernelSpec, SvmError, SvmModel, TrainConfig, NUMERIC_FLOOR};
use crate::traffic_sim::Trace;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTest,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Svm(#[from] SvmError),
}

pub type Result<T> = std::result::Result<T, EvalError>;

/// Number of correctly classified test examples and the resulting accuracy.
pub fn evaluate(model: &SvmModel, test: &Dataset) -> Result<(usize, f64)> {
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let mut correct = 0;
    for e in &test.examples {
        if model.classify(&e.features)? == e.label {
            correct += 1;
        }
    }
    Ok((correct, correct as f64 / test.len() as f64))
}

/// Indices of misclassified examples, in dataset order.
pub fn misclassified(model: &SvmModel, data: &Dataset) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, e) in data.examples.iter().enumerate() {
        if model.classify(&e.features)? != e.label {
            out.push(i);
        }
    }
    Ok(out)
}

/// Linear decision boundary of a two-feature model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryReport {
    /// `y = slope·x + intercept`
    Line { slope: f64, intercept: f64 },
    /// `x = at`
    Vertical { at: f64 },
    /// `w` is numerically zero; the classifier is constant.
    Degenerate,
    /// Nonlinear kernel or feature dimension other than two.
    Unsupported,
}

impl std::fmt::Display for BoundaryReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryReport::Line { slope, intercept } => {
                write!(f, "y = {slope:.6}x + {intercept:.6}")
            }
            BoundaryReport::Vertical { at } => write!(f, "x = {at:.6}"),
            BoundaryReport::Degenerate => f.write_str("degenerate (w = 0)"),
            BoundaryReport::Unsupported => f.write_str("unsupported (nonlinear kernel)"),
        }
    }
}

pub fn boundary_from_hyperplane(w: &[f64], b: f64) -> BoundaryReport {
    if w.len() != 2 {
        return BoundaryReport::Unsupported;
    }
    let (wx, wy) = (w[0], w[1]);
    if wy.abs() > NUMERIC_FLOOR {
        // `+ 0.0` folds a negative zero into positive zero.
        BoundaryReport::Line {
            slope: -wx / wy + 0.0,
            intercept: -b / wy + 0.0,
        }
    } else if wx.abs() > NUMERIC_FLOOR {
        BoundaryReport::Vertical { at: -b / wx + 0.0 }
    } else {
        BoundaryReport::Degenerate
    }
}

pub fn boundary_report(model: &SvmModel) -> Result<BoundaryReport> {
    match model.extract_hyperplane() {
        Ok((w, b)) => Ok(boundary_from_hyperplane(&w, b)),
        Err(SvmError::UnsupportedKernel(_)) => Ok(BoundaryReport::Unsupported),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub test_size: usize,
    pub correct: usize,
}

impl SweepRow {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.test_size as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<SweepRow>,
    pub boundary: BoundaryReport,
    pub train_size: usize,
    pub seed: u64,
    pub converged: bool,
}

pub const REPORT_HEADER: &str = "test_size,correct,accuracy";

impl EvaluationReport {
    /// Unweighted mean of the row accuracies; `None` for an empty sweep.
    pub fn mean_accuracy(&self) -> Option<f64> {
        if self.rows.is_empty() {
            return None;
        }
        Some(self.rows.iter().map(SweepRow::accuracy).sum::<f64>() / self.rows.len() as f64)
    }

    pub fn write_csv<W: Write>(&self, mut dest: W) -> std::io::Result<()> {
        writeln!(dest, "{REPORT_HEADER}")?;
        for r in &self.rows {
            writeln!(dest, "{},{},{}", r.test_size, r.correct, r.accuracy())?;
        }
        dest.flush()
    }

    /// Two-column table: test size against accuracy in percent.
    pub fn to_table(&self) -> String {
        let left = "Testing examples";
        let right = format!("{} training examples", self.train_size);
        let lw = left.len();
        let rw = right.len();
        let rule = format!("+-{}-+-{}-+\n", "-".repeat(lw), "-".repeat(rw));
        let mut out = String::new();
        out.push_str(&rule);
        writeln!(out, "| {left:<lw$} | {right:<rw$} |").unwrap();
        out.push_str(&rule);
        for r in &self.rows {
            let pct = format!("{:.2}%", 100.0 * r.accuracy());
            writeln!(out, "| {:<lw$} | {pct:<rw$} |", r.test_size).unwrap();
            out.push_str(&rule);
        }
        match self.mean_accuracy() {
            Some(m) => writeln!(out, "mean accuracy: {:.2}%", 100.0 * m).unwrap(),
            None => writeln!(out, "mean accuracy: undefined (no rows)").unwrap(),
        }
        out
    }
}

/// Evaluates `model` on independent test sets drawn from the vehicles left
/// over after the training split.
fn sweep_rows(model: &SvmModel, pools: &SplitPools<'_>, test_sizes: &[usize]) -> Result<Vec<SweepRow>> {
    test_sizes
        .iter()
        .enumerate()
        .map(|(idx, &size)| {
            let test = pools.test_set(size, idx as u64)?;
            let (correct, _) = evaluate(model, &test)?;
            Ok(SweepRow {
                test_size: size,
                correct,
            })
        })
        .collect()
}

/// Trains once on `train_size` examples and evaluates every requested test
/// size on its own vehicle-disjoint test set.
pub fn accuracy_sweep(
    trace: &Trace,
    train_size: usize,
    test_sizes: &[usize],
    kernel: &KernelSpec,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(SvmModel, EvaluationReport)> {
    let max_test = test_sizes.iter().copied().max().unwrap_or(0);
    let pools = SplitPools::new(trace, train_size, train_size + max_test, seed)?;
    let model = train(&pools.train.examples, kernel, cfg)?;
    let rows = sweep_rows(&model, &pools, test_sizes)?;
    let report = EvaluationReport {
        rows,
        boundary: boundary_report(&model)?,
        train_size,
        seed,
        converged: model.summary.converged,
    };
    Ok((model, report))
}

/// Sweep with an already trained model; test sets are drawn from all vehicles.
pub fn sweep_with_model(
    model: &SvmModel,
    trace: &Trace,
    test_sizes: &[usize],
    seed: u64,
) -> Result<EvaluationReport> {
    let max_test = test_sizes.iter().copied().max().unwrap_or(0);
    let pools = SplitPools::new(trace, 0, max_test, seed)?;
    Ok(EvaluationReport {
        rows: sweep_rows(model, &pools, test_sizes)?,
        boundary: boundary_report(model)?,
        train_size: 0,
        seed,
        converged: model.summary.converged,
    })
}
