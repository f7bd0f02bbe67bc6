//! Brute-force hard-margin reference for tiny 2-D problems.
//!
//! In the plane the maximum-margin hyperplane is pinned by two or three
//! support points that lie exactly on the margins. Enumerating every such
//! subset, solving `y_i (w·x_i + b) = 1` on it and keeping the feasible
//! candidate with the smallest `‖w‖` recovers the optimum without any
//! iterative solver.

#![allow(dead_code)]

use mobpred_core::svm::LabeledExample;

#[derive(Debug, Clone, Copy)]
pub struct Hyperplane {
    pub w: [f64; 2],
    pub b: f64,
}

impl Hyperplane {
    pub fn norm(&self) -> f64 {
        self.w[0].hypot(self.w[1])
    }

    /// Half-width of the gap between the two margin lines.
    pub fn margin(&self) -> f64 {
        1.0 / self.norm()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.w[0] * x[0] + self.w[1] * x[1] + self.b
    }
}

fn feasible(h: &Hyperplane, data: &[LabeledExample]) -> bool {
    data.iter()
        .all(|e| e.label.sign() * h.value(&e.features) >= 1.0 - 1e-9)
}

/// Points `p` (positive) and `q` (negative) on opposite margins with `w`
/// along `p − q`.
fn from_pair(p: &[f64], q: &[f64]) -> Option<Hyperplane> {
    let d = [p[0] - q[0], p[1] - q[1]];
    let sq = d[0] * d[0] + d[1] * d[1];
    if sq < 1e-18 {
        return None;
    }
    let w = [2.0 * d[0] / sq, 2.0 * d[1] / sq];
    let b = 1.0 - (w[0] * p[0] + w[1] * p[1]);
    Some(Hyperplane { w, b })
}

/// Solves the 3×3 system `w·x_i + b = y_i` by Cramer's rule.
fn from_triple(t: [&LabeledExample; 3]) -> Option<Hyperplane> {
    let row = |e: &LabeledExample| [e.features[0], e.features[1], 1.0];
    let m = [row(t[0]), row(t[1]), row(t[2])];
    let rhs = [t[0].label.sign(), t[1].label.sign(), t[2].label.sign()];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(m);
    if det.abs() < 1e-12 {
        return None;
    }
    let mut sol = [0.0; 3];
    for (col, s) in sol.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][col] = rhs[r];
        }
        *s = det3(mc) / det;
    }
    Some(Hyperplane {
        w: [sol[0], sol[1]],
        b: sol[2],
    })
}

/// Maximum-margin separating hyperplane, or `None` when the data are not
/// linearly separable (or hold a single class).
pub fn hard_margin(data: &[LabeledExample]) -> Option<Hyperplane> {
    let n = data.len();
    let mut best: Option<Hyperplane> = None;
    let mut consider = |h: Hyperplane| {
        if h.norm() > 1e-12 && feasible(&h, data) && best.is_none_or(|b| h.norm() < b.norm()) {
            best = Some(h);
        }
    };
    for i in 0..n {
        for j in 0..n {
            if data[i].label.sign() > 0.0 && data[j].label.sign() < 0.0 {
                if let Some(h) = from_pair(&data[i].features, &data[j].features) {
                    consider(h);
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t = [&data[i], &data[j], &data[k]];
                let pos = t.iter().filter(|e| e.label.sign() > 0.0).count();
                if pos == 0 || pos == 3 {
                    continue;
                }
                if let Some(h) = from_triple(t) {
                    consider(h);
                }
            }
        }
    }
    best
}

/// Random separable set of `n` points in `[-5, 5]²`, labeled by a random
/// line; points within `gap` of the line are redrawn.
pub fn separable_set(rng: &mut impl rand::Rng, n: usize, gap: f64) -> Vec<LabeledExample> {
    use mobpred_core::svm::Label;
    loop {
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let normal = [theta.cos(), theta.sin()];
        let offset: f64 = rng.gen_range(-2.0..2.0);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let s = normal[0] * x[0] + normal[1] * x[1] + offset;
            if s.abs() < gap {
                continue;
            }
            let label = if s > 0.0 { Label::Positive } else { Label::Negative };
            out.push(LabeledExample::new(x.to_vec(), label));
        }
        let pos = out.iter().filter(|e| e.label == Label::Positive).count();
        if pos > 0 && pos < n {
            return out;
        }
    }
}
