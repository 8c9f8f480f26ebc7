use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample standard deviation; 0 for a single value.
    pub stddev: f64,
    /// `mean ± 1.96 stddev / sqrt(count)`.
    pub ci95: [f64; 2],
}

pub fn summarize(values: &[f64]) -> Result<Summary, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::Usage("cannot summarize an empty sequence".into()));
    }
    // Sorting first makes the result independent of input order.
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len();
    let mean = incpath_core::cyclestats::neumaier_sum(sorted.iter().copied()) / count as f64;
    let stddev = if count > 1 {
        let ss = incpath_core::cyclestats::neumaier_sum(sorted.iter().map(|x| (x - mean) * (x - mean)));
        (ss / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    let half = 1.96 * stddev / (count as f64).sqrt();
    Ok(Summary { count, mean, stddev, ci95: [mean - half, mean + half] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub toolkit: String,
    pub version: String,
    pub prng: String,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<Vec<f64>>,
    pub results: serde_json::Value,
    pub wall_clock_seconds: f64,
    /// Tabular export for commands that have one.
    #[serde(skip)]
    pub csv: Option<String>,
    /// Extension trace of trial 0 (kgreedy-sim only).
    #[serde(skip)]
    pub trace_csv: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall-clock field zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.wall_clock_seconds = 0.0;
        copy.to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_values() {
        let s = summarize(&[2.5, 2.5, 2.5]).unwrap();
        assert_eq!((s.count, s.mean, s.stddev), (3, 2.5, 0.0));
        assert_eq!(s.ci95, [2.5, 2.5]);
    }

    #[test]
    fn two_values() {
        let s = summarize(&[0.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.5);
        assert!((s.stddev - 0.5f64.sqrt()).abs() < 1e-15);
        let half = 1.96 * 0.5f64.sqrt() / 2f64.sqrt();
        assert!((s.ci95[0] - (0.5 - half)).abs() < 1e-15);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn single_value() {
        let s = summarize(&[7.0]).unwrap();
        assert_eq!((s.mean, s.stddev), (7.0, 0.0));
    }

    #[test]
    fn order_does_not_matter() {
        let xs = [0.1, 5.0, -3.25, 1e-9, 7.5, 0.3];
        let mut ys = xs;
        ys.reverse();
        ys.swap(1, 4);
        assert_eq!(summarize(&xs).unwrap(), summarize(&ys).unwrap());
    }
}
