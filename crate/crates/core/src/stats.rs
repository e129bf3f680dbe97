use serde::Serialize;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MeanEstimate {
    /// Summed in slice order, so the result does not depend on how the
    /// values were produced.
    pub fn from_values(values: &[f64]) -> Self {
        let samples = values.len();
        if samples == 0 {
            return MeanEstimate { mean: f64::NAN, stderr: f64::NAN, samples };
        }
        let mean = values.iter().sum::<f64>() / samples as f64;
        let stderr = if samples > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
            (var / samples as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate { mean, stderr, samples }
    }

    /// Bernoulli proportion `hits / samples`.
    pub fn from_proportion(hits: u64, samples: usize) -> Self {
        let p = hits as f64 / samples as f64;
        let stderr = if samples > 1 {
            (p * (1.0 - p) / samples as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate { mean: p, stderr, samples }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_values_have_zero_error() {
        let e = MeanEstimate::from_values(&[2.0, 2.0, 2.0]);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn proportion() {
        let e = MeanEstimate::from_proportion(25, 100);
        assert_eq!(e.mean, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }
}
