use super::{check_dims, dot, LabeledExample, Result, SvmError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Linear,
    Polynomial,
    Rbf,
    Sigmoid,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Linear => "linear",
            KernelFamily::Polynomial => "polynomial",
            KernelFamily::Rbf => "rbf",
            KernelFamily::Sigmoid => "sigmoid",
        }
    }
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = SvmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(KernelFamily::Linear),
            "polynomial" | "poly" => Ok(KernelFamily::Polynomial),
            "rbf" => Ok(KernelFamily::Rbf),
            "sigmoid" => Ok(KernelFamily::Sigmoid),
            other => Err(SvmError::InvalidConfig(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Kernel family with exactly the hyperparameters that family uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `a·b`
    Linear,
    /// `(gamma·(a·b) + coef0)^degree`
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
    /// `exp(−gamma·‖a−b‖²)`
    Rbf { gamma: f64 },
    /// `tanh(gamma·(a·b) + coef0)`
    Sigmoid { gamma: f64, coef0: f64 },
}

pub const DEFAULT_DEGREE: u32 = 3;
pub const DEFAULT_COEF0: f64 = 0.0;

impl KernelSpec {
    pub fn family(&self) -> KernelFamily {
        match self {
            KernelSpec::Linear => KernelFamily::Linear,
            KernelSpec::Polynomial { .. } => KernelFamily::Polynomial,
            KernelSpec::Rbf { .. } => KernelFamily::Rbf,
            KernelSpec::Sigmoid { .. } => KernelFamily::Sigmoid,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            KernelSpec::Linear => None,
            KernelSpec::Polynomial { gamma, .. }
            | KernelSpec::Rbf { gamma }
            | KernelSpec::Sigmoid { gamma, .. } => Some(gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SvmError::InvalidConfig(m.to_string()));
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial {
                degree,
                gamma,
                coef0,
            } => {
                if degree < 1 {
                    return bad("polynomial degree must be at least 1");
                }
                if !(gamma.is_finite() && gamma > 0.0) {
                    return bad("gamma must be positive");
                }
                if !coef0.is_finite() {
                    return bad("coef0 must be finite");
                }
                Ok(())
            }
            KernelSpec::Rbf { gamma } => {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return bad("gamma must be positive");
                }
                Ok(())
            }
            KernelSpec::Sigmoid { gamma, coef0 } => {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return bad("gamma must be positive");
                }
                if !coef0.is_finite() {
                    return bad("coef0 must be finite");
                }
                Ok(())
            }
        }
    }

    /// Builds a spec for `family` filling unset parameters with defaults:
    /// `gamma = 1 / (d · var)` over all feature values of `data`, `coef0 = 0`,
    /// `degree = 3`.
    pub fn with_defaults(
        family: KernelFamily,
        data: &[LabeledExample],
        gamma: Option<f64>,
        degree: Option<u32>,
        coef0: Option<f64>,
    ) -> Self {
        let gamma = gamma.unwrap_or_else(|| scale_gamma(data));
        let coef0 = coef0.unwrap_or(DEFAULT_COEF0);
        match family {
            KernelFamily::Linear => KernelSpec::Linear,
            KernelFamily::Polynomial => KernelSpec::Polynomial {
                degree: degree.unwrap_or(DEFAULT_DEGREE),
                gamma,
                coef0,
            },
            KernelFamily::Rbf => KernelSpec::Rbf { gamma },
            KernelFamily::Sigmoid => KernelSpec::Sigmoid { gamma, coef0 },
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dims(a.len(), b.len())?;
        Ok(self.eval_unchecked(a, b))
    }

    pub(crate) fn eval_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Polynomial {
                degree,
                gamma,
                coef0,
            } => (gamma * dot(a, b) + coef0).powi(degree as i32),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
            KernelSpec::Sigmoid { gamma, coef0 } => (gamma * dot(a, b) + coef0).tanh(),
        }
    }
}

fn scale_gamma(data: &[LabeledExample]) -> f64 {
    let d = data.first().map_or(1, |e| e.dim()).max(1);
    let values: Vec<f64> = data.iter().flat_map(|e| e.features.iter().copied()).collect();
    if values.is_empty() {
        return 1.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var > super::NUMERIC_FLOOR {
        1.0 / (d as f64 * var)
    } else {
        1.0
    }
}
