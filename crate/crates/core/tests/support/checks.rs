//! Property checks shared by the core test suites and the acceptance runner.
//! Each returns a description of the first violation found.

#![allow(dead_code)]

use mobpred_core::svm::{
    classify_value, dual_objective, train, train_detailed, KernelSpec, Label, LabeledExample, SvmModel, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{hard_margin, separable_set};

pub type Check<T = ()> = Result<T, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Smallest signed distance from the data to the trained boundary.
fn trained_margin(model: &SvmModel, data: &[LabeledExample]) -> Check<f64> {
    let (w, b) = model.extract_hyperplane().map_err(|e| e.to_string())?;
    let norm = w[0].hypot(w[1]);
    Ok(data
        .iter()
        .map(|e| e.label.sign() * (w[0] * e.features[0] + w[1] * e.features[1] + b) / norm)
        .fold(f64::INFINITY, f64::min))
}

/// Trains with `C = 1e6` on `trials` random separable sets of 2 to 6 points
/// and compares the margin with the brute-force optimum. Returns the worst
/// relative error.
pub fn oracle_equivalence(trials: usize, seed: u64) -> Check<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = TrainConfig {
        tol: 1e-6,
        max_passes: 10_000,
        ..TrainConfig::raw(1e6)
    };
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let n = rng.gen_range(2..=6);
        let data = separable_set(&mut rng, n, 0.1);
        let oracle = hard_margin(&data).ok_or_else(|| format!("trial {trial}: oracle found no separator"))?;
        let model = train(&data, &KernelSpec::Linear, &cfg).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(model.summary.converged, || format!("trial {trial}: no convergence"))?;
        let got = trained_margin(&model, &data)?;
        let rel = (got - oracle.margin()).abs() / oracle.margin();
        worst = worst.max(rel);
        ensure(rel <= 1e-3, || format!("trial {trial}: margin {got} vs oracle {}", oracle.margin()))?;
    }
    Ok(worst)
}

pub fn xor_set() -> Vec<LabeledExample> {
    [((0.0, 0.0), -1), ((1.0, 1.0), -1), ((0.0, 1.0), 1), ((1.0, 0.0), 1)]
        .iter()
        .map(|&((a, b), y)| LabeledExample::new(vec![a, b], Label::from_sign(y).unwrap()))
        .collect()
}

pub fn training_accuracy(model: &SvmModel, data: &[LabeledExample]) -> usize {
    data.iter()
        .filter(|e| model.classify(&e.features).unwrap() == e.label)
        .count()
}

/// Two label-alternating uniform clouds around `(±sep/2, 0)`; they overlap
/// when `sep` is small.
pub fn blobs(rng: &mut ChaCha8Rng, n: usize, sep: f64) -> Vec<LabeledExample> {
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Positive } else { Label::Negative };
            let cx = label.sign() * sep / 2.0;
            let x = [cx + rng.gen_range(-1.0..1.0), rng.gen_range(-1.5..1.5)];
            LabeledExample::new(x.to_vec(), label)
        })
        .collect()
}

/// Trains on 20 datasets, alternating separable and overlapping, cycling
/// `C` through 0.1, 1 and 10, and checks the optimality conditions, the
/// equality constraint and monotone ascent of the dual objective.
pub fn kkt_suite() -> Check {
    let cs = [0.1, 1.0, 10.0];
    for set in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + set);
        let sep = if set % 2 == 0 { 3.0 } else { 0.8 };
        let data = blobs(&mut rng, 20 + 2 * set as usize, sep);
        let c = cs[set as usize % 3];
        let kernel = if set % 4 == 3 { KernelSpec::Rbf { gamma: 0.5 } } else { KernelSpec::Linear };
        let cfg = TrainConfig {
            tol: 1e-3,
            max_passes: 10_000,
            ..TrainConfig::raw(c)
        };
        let tol = cfg.tol;
        let out = train_detailed(&data, &kernel, &cfg).map_err(|e| format!("set {set}: {e}"))?;
        ensure(out.model.summary.converged, || format!("set {set}: no convergence"))?;

        let mut balance = 0.0;
        for (i, (e, &a)) in data.iter().zip(&out.alphas).enumerate() {
            ensure((0.0..=c).contains(&a), || format!("set {set}: alpha {a} outside [0, {c}]"))?;
            balance += a * e.label.sign();
            let m = out.model.functional_margin(e).map_err(|e| e.to_string())?;
            let ok = if a <= 1e-9 * c {
                m >= 1.0 - tol
            } else if a >= c * (1.0 - 1e-9) {
                m <= 1.0 + tol
            } else {
                (m - 1.0).abs() <= tol
            };
            ensure(ok, || format!("set {set}, example {i}: alpha {a} with margin {m}"))?;
        }
        ensure(balance.abs() <= tol, || format!("set {set}: sum alpha*y = {balance}"))?;

        let h = &out.objective_history;
        ensure(h.len() >= 2, || format!("set {set}: no passes recorded"))?;
        for w in h.windows(2) {
            ensure(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0), || {
                format!("set {set}: objective fell {} -> {}", w[0], w[1])
            })?;
        }
        let last = *h.last().unwrap();
        let recomputed = dual_objective(&data, &kernel, &out.alphas);
        ensure((last - recomputed).abs() <= 1e-9 * recomputed.abs().max(1.0), || {
            format!("set {set}: tracked objective {last} vs recomputed {recomputed}")
        })?;
    }
    Ok(())
}

pub fn random_linear_model(rng: &mut ChaCha8Rng) -> SvmModel {
    let k = rng.gen_range(1..=5);
    let support = (0..k)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Positive } else { Label::Negative };
            LabeledExample::new(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)], label)
        })
        .collect();
    let alphas = (0..k).map(|_| rng.gen_range(0.05..2.0)).collect();
    SvmModel::new(support, alphas, rng.gen_range(-2.0..2.0), KernelSpec::Linear, 2).unwrap()
}

fn explicit_w(model: &SvmModel) -> [f64; 2] {
    let mut w = [0.0; 2];
    for (e, a) in model.support.iter().zip(&model.alphas) {
        w[0] += a * e.label.sign() * e.features[0];
        w[1] += a * e.label.sign() * e.features[1];
    }
    w
}

pub fn grid(n: usize) -> Vec<[f64; 2]> {
    let step = 10.0 / (n - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [-5.0 + step * i as f64, -5.0 + step * j as f64]))
        .collect()
}

/// On `count` random linear models: geometric margin is functional margin
/// over `‖w‖`, and scaling `(α, b)` by `c` scales only the functional margin.
/// Functional margins are compared to `c·f` within 1e-12 relative, the
/// rounding of a re-evaluated sum.
pub fn margin_identities(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = grid(50);
    let mut models = 0;
    while models < count {
        let model = random_linear_model(&mut rng);
        let w = explicit_w(&model);
        let norm = w[0].hypot(w[1]);
        if norm < 1e-3 {
            continue;
        }
        models += 1;
        let label = if rng.gen_bool(0.5) { Label::Positive } else { Label::Negative };
        let e = LabeledExample::new(vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)], label);
        let f = model.functional_margin(&e).unwrap();
        let g = model.geometric_margin(&e).unwrap();
        let direct = label.sign() * (w[0] * e.features[0] + w[1] * e.features[1] + model.bias);
        ensure((f - direct).abs() <= 1e-9 * direct.abs().max(1.0), || {
            format!("model {models}: functional margin {f} vs explicit {direct}")
        })?;
        ensure((g - f / norm).abs() <= 1e-9, || format!("model {models}: geometric {g} vs {}", f / norm))?;

        let base: Vec<Label> = grid.iter().map(|x| model.classify(x).unwrap()).collect();
        for c in [0.5, 3.0, 100.0] {
            let scaled = model.scaled(c);
            let gc = scaled.geometric_margin(&e).unwrap();
            ensure((gc - g).abs() <= 1e-9, || format!("model {models}, c={c}: geometric {gc} vs {g}"))?;
            let fc = scaled.functional_margin(&e).unwrap();
            ensure((fc - c * f).abs() <= 1e-12 * (c * f).abs().max(1.0), || {
                format!("model {models}, c={c}: functional {fc} vs {}", c * f)
            })?;
            for (x, &l) in grid.iter().zip(&base) {
                ensure(scaled.classify(x).unwrap() == l, || format!("model {models}, c={c}: flip at {x:?}"))?;
            }
        }
    }
    Ok(())
}

/// `classify(x) = +1` exactly when `decision_value(x) ≥ 0`, on a grid.
pub fn classify_matches_sign(models: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = grid(50);
    for m in 0..models {
        let model = random_linear_model(&mut rng);
        for x in &grid {
            let z = model.decision_value(x).unwrap();
            let label = model.classify(x).unwrap();
            ensure((label == Label::Positive) == (z >= 0.0) && classify_value(z) == label, || {
                format!("model {m}: z={z} classified {label} at {x:?}")
            })?;
        }
    }
    Ok(())
}
