use serde::{Deserialize, Serialize};

use super::MetricError;

/// Mean, population standard deviation and range of a set of scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn aggregate(scores: &[f64]) -> Result<SummaryStats, MetricError> {
    if scores.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        // rounding can push the mean a hair outside the range for constant input
        mean: mean.clamp(min, max),
        std: var.sqrt(),
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton() {
        let s = aggregate(&[0.5]).unwrap();
        assert_eq!(
            s,
            SummaryStats {
                mean: 0.5,
                std: 0.0,
                min: 0.5,
                max: 0.5
            }
        );
    }

    #[test]
    fn two_points() {
        let s = aggregate(&[0.0, 1.0]).unwrap();
        assert_eq!(
            s,
            SummaryStats {
                mean: 0.5,
                std: 0.5,
                min: 0.0,
                max: 1.0
            }
        );
    }

    #[test]
    fn five_seed_means() {
        let seeds = [0.44, 0.58, 0.51, 0.49, 0.53];
        let s = aggregate(&seeds).unwrap();
        // spreadsheet: AVERAGE = 0.51, STDEV.P = 0.046043...
        assert!((s.mean - 0.51).abs() < 1e-12);
        assert!((s.std - 0.002_12_f64.sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.max), (0.44, 0.58));
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(aggregate(&[]), Err(MetricError::EmptyInput));
    }
}
