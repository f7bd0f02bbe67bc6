use super::LabeledExample;

/// Per-feature standardization fitted on training data only.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Returns `None` for empty data. Zero-variance features keep unit scale.
    pub fn fit(data: &[LabeledExample]) -> Option<Self> {
        let d = data.first()?.dim();
        let n = data.len() as f64;
        let mut mean = vec![0.0; d];
        for e in data {
            for (m, v) in mean.iter_mut().zip(&e.features) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for e in data {
            for ((s, v), m) in var.iter_mut().zip(&e.features).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > super::NUMERIC_FLOOR {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Some(Self { mean, std })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn transform_examples(&self, data: &[LabeledExample]) -> Vec<LabeledExample> {
        data.iter()
            .map(|e| LabeledExample::new(self.transform(&e.features), e.label))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::Label;

    #[test]
    fn standardized_training_data_has_zero_mean_unit_variance() {
        let data: Vec<_> = [(1.0, 10.0), (3.0, 10.0), (5.0, 10.0)]
            .iter()
            .map(|&(a, b)| LabeledExample::new(vec![a, b], Label::Positive))
            .collect();
        let s = Standardizer::fit(&data).unwrap();
        assert_eq!(s.mean, vec![3.0, 10.0]);
        assert_eq!(s.std[1], 1.0);
        let t = s.transform_examples(&data);
        let m: f64 = t.iter().map(|e| e.features[0]).sum::<f64>() / 3.0;
        let v: f64 = t.iter().map(|e| e.features[0].powi(2)).sum::<f64>() / 3.0;
        assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
        assert!(Standardizer::fit(&[]).is_none());
    }
}
