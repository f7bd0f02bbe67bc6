//! Pairwise dual coordinate ascent (SMO).
//!
//! Each iteration picks the multiplier that violates the KKT conditions the
//! most, pairs it with the partner whose closed-form two-variable step yields
//! the largest dual gain, solves that subproblem exactly and clips to the box
//! `[0, C]`. The equality constraint `Σ αᵢ yᵢ = 0` is preserved by every step.
//!
//! With gradient `Gᵢ = (Qα)ᵢ − 1`, `Q = yyᵀ ∘ K`, the optimality gap is
//! `max_{I_up} −yᵢGᵢ − min_{I_low} −yᵢGᵢ`; training stops once it is at most
//! `tol`. Any bias in between those two bounds then satisfies every KKT
//! condition within `tol`, and the bias chosen (the mean over unbounded
//! support vectors) lies in that range.

use super::{
    check_dims, KernelSpec, LabeledExample, Result, Standardizer, SvmError, SvmModel, TrainSummary,
};

/// Curvature floor for non-PSD pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Box constraint.
    pub c: f64,
    /// KKT tolerance.
    pub tol: f64,
    /// One pass is `n` pair updates.
    pub max_passes: usize,
    /// Reserved for randomized tie-breaking; selection is currently deterministic.
    pub rng_seed: u64,
    /// Standardize features with training-set mean and deviation first.
    pub standardize: bool,
}

impl Default for TrainConfig {
    /// Route-prediction defaults: standardized features, `C = 0.1`.
    fn default() -> Self {
        Self {
            c: 0.1,
            tol: 1e-3,
            max_passes: 200,
            rng_seed: 0,
            standardize: true,
        }
    }
}

impl TrainConfig {
    /// Plain SVM on raw features with box constraint `c`.
    pub fn raw(c: f64) -> Self {
        Self {
            c,
            standardize: false,
            ..Self::default()
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(SvmError::InvalidConfig("C must be finite and positive".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(SvmError::InvalidConfig("tol must be finite and positive".into()));
        }
        if self.max_passes < 1 {
            return Err(SvmError::InvalidConfig("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SvmModel,
    /// Dual coefficient of every training example, in input order.
    pub alphas: Vec<f64>,
    /// Dual objective at the start and after every pass.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

pub fn train(data: &[LabeledExample], kernel: &KernelSpec, cfg: &TrainConfig) -> Result<SvmModel> {
    train_detailed(data, kernel, cfg).map(|o| o.model)
}

fn validate_data(data: &[LabeledExample]) -> Result<usize> {
    let first = data.first().ok_or(SvmError::EmptyData)?;
    let dim = first.dim();
    for (i, e) in data.iter().enumerate() {
        check_dims(dim, e.dim())?;
        if e.features.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite(i));
        }
    }
    if data.iter().all(|e| e.label == first.label) {
        return Err(SvmError::SingleClass(first.label));
    }
    Ok(dim)
}

struct Problem<'a> {
    y: Vec<f64>,
    /// Row-major kernel matrix.
    k: Vec<f64>,
    n: usize,
    c: f64,
    data: &'a [LabeledExample],
}

// Kernel entries are looked up by index, so index loops read best here.
#[allow(clippy::needless_range_loop)]
impl Problem<'_> {
    fn kij(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    fn in_up(&self, i: usize, alpha: f64) -> bool {
        (self.y[i] > 0.0 && alpha < self.c) || (self.y[i] < 0.0 && alpha > 0.0)
    }

    fn in_low(&self, i: usize, alpha: f64) -> bool {
        (self.y[i] > 0.0 && alpha > 0.0) || (self.y[i] < 0.0 && alpha < self.c)
    }

    fn objective(&self, alpha: &[f64]) -> f64 {
        let mut quad = 0.0;
        for i in 0..self.n {
            if alpha[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..self.n {
                row += alpha[j] * self.y[j] * self.kij(i, j);
            }
            quad += alpha[i] * self.y[i] * row;
        }
        alpha.iter().sum::<f64>() - 0.5 * quad
    }

    /// `(max_{I_up} −yG, argmax, min_{I_low} −yG)`.
    fn violation_bounds(&self, alpha: &[f64], grad: &[f64]) -> (f64, Option<usize>, f64) {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax_idx = None;
        let mut gmin = f64::INFINITY;
        for t in 0..self.n {
            let v = -self.y[t] * grad[t];
            if self.in_up(t, alpha[t]) && v > gmax {
                gmax = v;
                gmax_idx = Some(t);
            }
            if self.in_low(t, alpha[t]) && v < gmin {
                gmin = v;
            }
        }
        (gmax, gmax_idx, gmin)
    }

    /// Partner for `i` maximizing the closed-form gain `b² / a`.
    fn select_partner(&self, i: usize, gmax: f64, alpha: &[f64], grad: &[f64]) -> Option<usize> {
        let mut best = None;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..self.n {
            if !self.in_low(t, alpha[t]) {
                continue;
            }
            let b = gmax + self.y[t] * grad[t];
            if b <= 0.0 {
                continue;
            }
            let mut a = self.kij(i, i) + self.kij(t, t) - 2.0 * self.kij(i, t);
            if a <= 0.0 {
                a = TAU;
            }
            let gain = b * b / a;
            if gain > best_gain {
                best_gain = gain;
                best = Some(t);
            }
        }
        best
    }

    /// Solves the two-variable subproblem on `(i, j)` and clips to the box.
    fn update_pair(&self, i: usize, j: usize, alpha: &mut [f64], grad: &mut [f64]) {
        let c = self.c;
        let (yi, yj) = (self.y[i], self.y[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = self.kij(i, i) + self.kij(j, j) - 2.0 * self.kij(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }

        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = old_i - old_j;
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = old_i + old_j;
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        for t in 0..self.n {
            grad[t] += self.y[t] * (yi * self.kij(t, i) * di + yj * self.kij(t, j) * dj);
        }
    }

    fn bias(&self, alpha: &[f64], grad: &[f64]) -> f64 {
        let mut sum = 0.0;
        let mut free = 0usize;
        for i in 0..self.n {
            if alpha[i] > 0.0 && alpha[i] < self.c {
                let mut s = 0.0;
                for j in 0..self.n {
                    s += alpha[j] * self.y[j] * self.kij(j, i);
                }
                sum += self.y[i] - s;
                free += 1;
            }
        }
        if free > 0 {
            sum / free as f64
        } else {
            let (gmax, _, gmin) = self.violation_bounds(alpha, grad);
            match (gmax.is_finite(), gmin.is_finite()) {
                (true, true) => 0.5 * (gmax + gmin),
                (true, false) => gmax,
                (false, true) => gmin,
                (false, false) => 0.0,
            }
        }
    }
}

pub fn train_detailed(
    data: &[LabeledExample],
    kernel: &KernelSpec,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    kernel.validate()?;
    let dim = validate_data(data)?;
    let n = data.len();
    let scaler = if cfg.standardize {
        Standardizer::fit(data)
    } else {
        None
    };
    let scaled;
    let data = match &scaler {
        Some(s) => {
            scaled = s.transform_examples(data);
            &scaled[..]
        }
        None => data,
    };

    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval_unchecked(&data[i].features, &data[j].features);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let problem = Problem {
        y: data.iter().map(|e| e.label.sign()).collect(),
        k,
        n,
        c: cfg.c,
        data,
    };

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut history = vec![0.0];
    let max_iter = cfg.max_passes.saturating_mul(n);
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        let (gmax, i, gmin) = problem.violation_bounds(&alpha, &grad);
        if gmax - gmin <= cfg.tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        let (Some(i), Some(j)) = (i, i.and_then(|i| problem.select_partner(i, gmax, &alpha, &grad)))
        else {
            converged = true;
            break;
        };
        problem.update_pair(i, j, &mut alpha, &mut grad);
        iterations += 1;
        if iterations.is_multiple_of(n) {
            history.push(problem.objective(&alpha));
        }
    }
    if !iterations.is_multiple_of(n) || iterations == 0 {
        history.push(problem.objective(&alpha));
    }

    let bias = problem.bias(&alpha, &grad);
    let passes = iterations.div_ceil(n);
    let mut support = Vec::new();
    let mut coefs = Vec::new();
    for (e, &a) in problem.data.iter().zip(&alpha) {
        if a > 0.0 {
            support.push(e.clone());
            coefs.push(a);
        }
    }
    let mut model = SvmModel::new(support, coefs, bias, *kernel, dim)?;
    if let Some(s) = scaler {
        model = model.with_scaler(s)?;
    }
    model.summary = TrainSummary { converged, passes };
    Ok(TrainOutcome {
        model,
        alphas: alpha,
        objective_history: history,
        iterations,
    })
}

/// Dual objective `Σα − ½ ΣΣ αᵢαⱼyᵢyⱼK(xᵢ,xⱼ)` for arbitrary coefficients.
pub fn dual_objective(data: &[LabeledExample], kernel: &KernelSpec, alphas: &[f64]) -> f64 {
    let mut quad = 0.0;
    for (ei, ai) in data.iter().zip(alphas) {
        for (ej, aj) in data.iter().zip(alphas) {
            quad += ai * aj * ei.label.sign() * ej.label.sign() * kernel.eval_unchecked(&ei.features, &ej.features);
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::Label;

    fn ex(x: f64, y: f64, pos: bool) -> LabeledExample {
        LabeledExample::new(vec![x, y], if pos { Label::Positive } else { Label::Negative })
    }

    #[test]
    fn mirror_pair_gives_bisector() {
        let data = vec![ex(0.0, 1.0, true), ex(0.0, -1.0, false)];
        let cfg = TrainConfig::raw(10.0);
        let m = train(&data, &KernelSpec::Linear, &cfg).unwrap();
        let (w, b) = m.extract_hyperplane().unwrap();
        assert!(w[0].abs() < 1e-3 && w[1] > 0.0);
        assert!((w[1] - 1.0).abs() < 1e-3);
        assert!(b.abs() < 1e-3);
        assert_eq!(m.num_support(), 2);
        assert!((m.alphas[0] - m.alphas[1]).abs() < 1e-9);
        assert!(m.decision_value(&[0.0, 0.0]).unwrap().abs() < 1e-6);
        assert!(m.summary.converged);
    }

    #[test]
    fn xor_is_learned_by_rbf() {
        let data = vec![
            ex(0.0, 0.0, false),
            ex(1.0, 1.0, false),
            ex(0.0, 1.0, true),
            ex(1.0, 0.0, true),
        ];
        let cfg = TrainConfig::raw(100.0);
        let m = train(&data, &KernelSpec::Rbf { gamma: 1.0 }, &cfg).unwrap();
        for e in &data {
            assert_eq!(m.classify(&e.features).unwrap(), e.label);
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let cfg = TrainConfig::default();
        assert_eq!(train(&[], &KernelSpec::Linear, &cfg), Err(SvmError::EmptyData));
        let one = vec![ex(0.0, 1.0, true), ex(1.0, 1.0, true)];
        assert_eq!(
            train(&one, &KernelSpec::Linear, &cfg),
            Err(SvmError::SingleClass(Label::Positive))
        );
        let mixed = vec![ex(0.0, 1.0, true), LabeledExample::new(vec![1.0], Label::Negative)];
        assert!(matches!(
            train(&mixed, &KernelSpec::Linear, &cfg),
            Err(SvmError::DimensionMismatch { .. })
        ));
        let nan = vec![ex(0.0, f64::NAN, true), ex(1.0, 1.0, false)];
        assert_eq!(train(&nan, &KernelSpec::Linear, &cfg), Err(SvmError::NonFinite(0)));
        let bad = TrainConfig { c: 0.0, ..Default::default() };
        assert!(matches!(
            train(&data_pair(), &KernelSpec::Linear, &bad),
            Err(SvmError::InvalidConfig(_))
        ));
    }

    fn data_pair() -> Vec<LabeledExample> {
        vec![ex(0.0, 1.0, true), ex(0.0, -1.0, false)]
    }

    #[test]
    fn exhausting_passes_is_not_an_error() {
        let data: Vec<_> = (0..40)
            .map(|i| {
                let t = i as f64;
                ex((t * 0.37).sin(), (t * 1.3).cos(), i % 3 == 0)
            })
            .collect();
        let cfg = TrainConfig { tol: 1e-9, max_passes: 1, ..TrainConfig::raw(100.0) };
        let out = train_detailed(&data, &KernelSpec::Linear, &cfg).unwrap();
        assert!(!out.model.summary.converged);
        assert_eq!(out.iterations, 40);
    }

    #[test]
    fn standardized_training_stores_scaler() {
        let data = vec![ex(100.0, 1.0, true), ex(300.0, 1.2, true), ex(150.0, -1.0, false), ex(250.0, -0.8, false)];
        let m = train(&data, &KernelSpec::Linear, &TrainConfig::default()).unwrap();
        assert!(m.scaler.is_some());
        for e in &data {
            assert_eq!(m.classify(&e.features).unwrap(), e.label);
        }
        let (w, _) = m.extract_hyperplane().unwrap();
        assert!(w[1] > 0.0);
    }

    #[test]
    fn objective_matches_direct_evaluation() {
        let data = vec![ex(0.0, 1.0, true), ex(1.0, 2.0, true), ex(0.5, -1.0, false), ex(2.0, -0.5, false)];
        let k = KernelSpec::Polynomial { degree: 2, gamma: 0.5, coef0: 1.0 };
        let out = train_detailed(&data, &k, &TrainConfig::raw(1.0)).unwrap();
        let direct = dual_objective(&data, &k, &out.alphas);
        assert!((out.objective_history.last().unwrap() - direct).abs() < 1e-9);
    }
}
