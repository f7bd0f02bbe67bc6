use std::fmt::Write as _;

use super::{check_dims, KernelFamily, KernelSpec, Label, LabeledExample, Result, SvmError};
use super::{Standardizer, NUMERIC_FLOOR};

/// How the optimizer finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrainSummary {
    pub converged: bool,
    pub passes: usize,
}

/// Trained classifier. Only examples with a nonzero dual coefficient are kept;
/// the weight vector is implicit, `w = Σ αᵢ yᵢ φ(xᵢ)`.
///
/// When `scaler` is set, support vectors live in standardized coordinates and
/// every input is standardized before the kernel is applied. Margins are then
/// measured in standardized units, while [`SvmModel::extract_hyperplane`]
/// reports the boundary in raw coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub support: Vec<LabeledExample>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    /// Feature dimension; fixed even when `support` is empty.
    pub dim: usize,
    pub scaler: Option<Standardizer>,
    pub summary: TrainSummary,
}

impl SvmModel {
    pub fn new(
        support: Vec<LabeledExample>,
        alphas: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
        dim: usize,
    ) -> Result<Self> {
        if support.len() != alphas.len() {
            return Err(SvmError::InvalidConfig(format!(
                "{} support examples but {} coefficients",
                support.len(),
                alphas.len()
            )));
        }
        for e in &support {
            check_dims(dim, e.dim())?;
        }
        Ok(Self {
            support,
            alphas,
            bias,
            kernel,
            dim,
            scaler: None,
            summary: TrainSummary::default(),
        })
    }

    pub fn with_scaler(mut self, scaler: Standardizer) -> Result<Self> {
        check_dims(self.dim, scaler.mean.len())?;
        check_dims(self.dim, scaler.std.len())?;
        self.scaler = Some(scaler);
        Ok(self)
    }

    pub fn num_support(&self) -> usize {
        self.support.len()
    }

    /// `Σ αᵢ yᵢ K(xᵢ, x) + b`, summed in support-vector order.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        check_dims(self.dim, x.len())?;
        let scaled;
        let x = match &self.scaler {
            Some(s) => {
                scaled = s.transform(x);
                &scaled[..]
            }
            None => x,
        };
        let mut z = 0.0;
        for (e, a) in self.support.iter().zip(&self.alphas) {
            z += a * e.label.sign() * self.kernel.eval_unchecked(&e.features, x);
        }
        Ok(z + self.bias)
    }

    pub fn classify(&self, x: &[f64]) -> Result<Label> {
        Ok(classify_value(self.decision_value(x)?))
    }

    /// `y · z(x)`.
    pub fn functional_margin(&self, e: &LabeledExample) -> Result<f64> {
        Ok(e.label.sign() * self.decision_value(&e.features)?)
    }

    /// `‖w‖` in the kernel feature space: `sqrt(Σᵢ Σⱼ αᵢ αⱼ yᵢ yⱼ K(xᵢ, xⱼ))`.
    pub fn weight_norm(&self) -> f64 {
        let mut sq = 0.0;
        for (ei, ai) in self.support.iter().zip(&self.alphas) {
            for (ej, aj) in self.support.iter().zip(&self.alphas) {
                sq += ai
                    * aj
                    * ei.label.sign()
                    * ej.label.sign()
                    * self.kernel.eval_unchecked(&ei.features, &ej.features);
            }
        }
        sq.max(0.0).sqrt()
    }

    /// Signed distance of `e` to the decision boundary, positive when correct.
    pub fn geometric_margin(&self, e: &LabeledExample) -> Result<f64> {
        let norm = self.weight_norm();
        if norm <= NUMERIC_FLOOR {
            return Err(SvmError::ZeroNorm);
        }
        Ok(self.functional_margin(e)? / norm)
    }

    /// Explicit `(w, b)` in raw input coordinates, so that
    /// `classify(x) = sign(w·x + b)`; only defined for the linear kernel.
    pub fn extract_hyperplane(&self) -> Result<(Vec<f64>, f64)> {
        if self.kernel.family() != KernelFamily::Linear {
            return Err(SvmError::UnsupportedKernel(self.kernel.family()));
        }
        if self.support.is_empty() {
            return Err(SvmError::EmptyModel);
        }
        let mut w = vec![0.0; self.dim];
        for (e, a) in self.support.iter().zip(&self.alphas) {
            let coef = a * e.label.sign();
            for (wk, xk) in w.iter_mut().zip(&e.features) {
                *wk += coef * xk;
            }
        }
        let mut b = self.bias;
        if let Some(s) = &self.scaler {
            // w'·(x − μ)/σ + b' = (w'/σ)·x + (b' − Σ w'μ/σ)
            for ((wk, m), sd) in w.iter_mut().zip(&s.mean).zip(&s.std) {
                *wk /= sd;
                b -= *wk * m;
            }
        }
        Ok((w, b))
    }

    /// Copy with every α and the bias multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.alphas.iter_mut().for_each(|a| *a *= factor);
        out.bias *= factor;
        out
    }
}

/// Sign rule with the tie at zero going to `+1`.
pub fn classify_value(z: f64) -> Label {
    if z >= 0.0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

pub const MODEL_FORMAT_TAG: &str = "mobpred-svm";
const MODEL_FORMAT_VERSION: u32 = 1;

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Plain-text model format, version 1.
///
/// ```text
/// mobpred-svm v1 kernel=rbf gamma=5.0000000000000000e-1 bias=... dim=2 support=2 converged=true passes=3
/// <alpha> <label> <feature_1> ... <feature_d>
/// ```
///
/// A standardized model adds `mean=<m1>,...,<md> std=<s1>,...,<sd>` to the
/// header.
///
/// All reals are written with 17 significant digits, so values round-trip
/// bit-exactly.
pub fn write_model(model: &SvmModel) -> String {
    let mut out = String::new();
    write!(
        out,
        "{MODEL_FORMAT_TAG} v{MODEL_FORMAT_VERSION} kernel={}",
        model.kernel.family()
    )
    .unwrap();
    match model.kernel {
        KernelSpec::Linear => {}
        KernelSpec::Polynomial {
            degree,
            gamma,
            coef0,
        } => write!(
            out,
            " degree={degree} gamma={} coef0={}",
            fmt_f64(gamma),
            fmt_f64(coef0)
        )
        .unwrap(),
        KernelSpec::Rbf { gamma } => write!(out, " gamma={}", fmt_f64(gamma)).unwrap(),
        KernelSpec::Sigmoid { gamma, coef0 } => {
            write!(out, " gamma={} coef0={}", fmt_f64(gamma), fmt_f64(coef0)).unwrap()
        }
    }
    writeln!(
        out,
        " bias={} dim={} support={} converged={} passes={}",
        fmt_f64(model.bias),
        model.dim,
        model.support.len(),
        model.summary.converged,
        model.summary.passes
    )
    .unwrap();
    if let Some(s) = &model.scaler {
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
        out.pop();
        writeln!(out, " mean={} std={}", join(&s.mean), join(&s.std)).unwrap();
    }
    for (e, a) in model.support.iter().zip(&model.alphas) {
        write!(out, "{} {}", fmt_f64(*a), e.label).unwrap();
        for f in &e.features {
            write!(out, " {}", fmt_f64(*f)).unwrap();
        }
        out.push('\n');
    }
    out
}

fn format_err(line: usize, message: impl Into<String>) -> SvmError {
    SvmError::Format {
        line,
        message: message.into(),
    }
}

pub fn parse_model(text: &str) -> Result<SvmModel> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| format_err(1, "empty input"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(MODEL_FORMAT_TAG) {
        return Err(format_err(1, "missing format tag"));
    }
    match tokens.next() {
        Some(v) if v == format!("v{MODEL_FORMAT_VERSION}") => {}
        Some(v) => return Err(format_err(1, format!("unsupported version `{v}`"))),
        None => return Err(format_err(1, "missing version")),
    }
    let mut fields = std::collections::HashMap::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format_err(1, format!("malformed field `{tok}`")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| format_err(1, format!("missing field `{k}`")))
    };
    let real = |k: &str| -> Result<f64> {
        get(k)?
            .parse::<f64>()
            .map_err(|_| format_err(1, format!("field `{k}` is not a number")))
    };
    let count = |k: &str| -> Result<usize> {
        get(k)?
            .parse::<usize>()
            .map_err(|_| format_err(1, format!("field `{k}` is not a count")))
    };

    let family: KernelFamily = get("kernel")?
        .parse()
        .map_err(|_| format_err(1, "unknown kernel family"))?;
    let kernel = match family {
        KernelFamily::Linear => KernelSpec::Linear,
        KernelFamily::Polynomial => KernelSpec::Polynomial {
            degree: get("degree")?
                .parse()
                .map_err(|_| format_err(1, "field `degree` is not a count"))?,
            gamma: real("gamma")?,
            coef0: real("coef0")?,
        },
        KernelFamily::Rbf => KernelSpec::Rbf {
            gamma: real("gamma")?,
        },
        KernelFamily::Sigmoid => KernelSpec::Sigmoid {
            gamma: real("gamma")?,
            coef0: real("coef0")?,
        },
    };
    let bias = real("bias")?;
    let dim = count("dim")?;
    let n_support = count("support")?;
    let converged = match get("converged")? {
        "true" => true,
        "false" => false,
        _ => return Err(format_err(1, "field `converged` is not a boolean")),
    };
    let passes = count("passes")?;
    let reals = |k: &str| -> Result<Option<Vec<f64>>> {
        match fields.get(k) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| format_err(1, format!("field `{k}` is not a list of numbers"))),
        }
    };
    let scaler = match (reals("mean")?, reals("std")?) {
        (Some(mean), Some(std)) => Some(Standardizer { mean, std }),
        (None, None) => None,
        _ => return Err(format_err(1, "`mean` and `std` must appear together")),
    };

    let mut support = Vec::with_capacity(n_support);
    let mut alphas = Vec::with_capacity(n_support);
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != dim + 2 {
            return Err(format_err(
                lineno,
                format!("expected {} fields, found {}", dim + 2, parts.len()),
            ));
        }
        let alpha: f64 = parts[0]
            .parse()
            .map_err(|_| format_err(lineno, "alpha is not a number"))?;
        let label = parts[1]
            .parse::<i64>()
            .ok()
            .and_then(Label::from_sign)
            .ok_or_else(|| format_err(lineno, "label must be +1 or -1"))?;
        let features = parts[2..]
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| format_err(lineno, "feature is not a number"))?;
        alphas.push(alpha);
        support.push(LabeledExample::new(features, label));
    }
    if support.len() != n_support {
        return Err(format_err(
            1,
            format!("header declares {n_support} support vectors, found {}", support.len()),
        ));
    }
    let mut model = SvmModel::new(support, alphas, bias, kernel, dim)?;
    if let Some(s) = scaler {
        model = model.with_scaler(s).map_err(|_| format_err(1, "scaler dimension mismatch"))?;
    }
    model.summary = TrainSummary { converged, passes };
    Ok(model)
}
