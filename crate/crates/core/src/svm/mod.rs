//! Binary kernel support vector machine.
//!
//! The model is `z(x) = Σ αᵢ yᵢ K(xᵢ, x) + b`, classified by the sign of `z`
//! with `z = 0` resolved to `+1`. Training solves the soft-margin dual
//!
//! ```text
//! maximize   Σ αᵢ − ½ Σᵢ Σⱼ αᵢ αⱼ yᵢ yⱼ K(xᵢ, xⱼ)
//! subject to 0 ≤ αᵢ ≤ C,  Σ αᵢ yᵢ = 0
//! ```
//!
//! by pairwise coordinate ascent (see [`smo`]).

mod kernel;
mod model;
mod scale;
pub mod smo;

pub use kernel::{KernelFamily, KernelSpec};
pub use model::{classify_value, parse_model, write_model, SvmModel, TrainSummary, MODEL_FORMAT_TAG};
pub use scale::Standardizer;
pub use smo::{dual_objective, train, train_detailed, TrainConfig, TrainOutcome};

use thiserror::Error;

/// Guard for norms and denominators.
pub const NUMERIC_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data is empty")]
    EmptyData,
    #[error("training data contains a single class ({0})")]
    SingleClass(Label),
    #[error("non-finite feature value in example {0}")]
    NonFinite(usize),
    #[error("weight vector norm is below the numeric floor")]
    ZeroNorm,
    #[error("operation requires a linear kernel, model uses {0}")]
    UnsupportedKernel(KernelFamily),
    #[error("model has no support vectors")]
    EmptyModel,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, SvmError>;

/// Class label in `{+1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn from_sign(v: i64) -> Option<Self> {
        match v {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Positive => f.write_str("+1"),
            Label::Negative => f.write_str("-1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub label: Label,
}

impl LabeledExample {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        Self { features, label }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(SvmError::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
