//! Trimmed-mean runtime statistics.

use std::time::Duration;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("trimmed mean needs at least 3 samples, got {0}")]
pub struct TooFewRuns(pub usize);

/// Mean after removing exactly one maximal and one minimal element
/// (one instance each under ties).
pub fn trimmed_mean(values: &[f64]) -> Result<f64, TooFewRuns> {
    if values.len() < 3 {
        return Err(TooFewRuns(values.len()));
    }
    let min_idx = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty")
        .0;
    let max_idx = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != min_idx)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("len >= 3")
        .0;
    let sum: f64 = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != min_idx && *i != max_idx)
        .map(|(_, v)| v)
        .sum();
    Ok(sum / (values.len() - 2) as f64)
}

/// Per-sweep-point runtime summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub trimmed_mean_ns: f64,
    pub min_ns: u64,
    pub max_ns: u64,
    pub runs_ns: Vec<u64>,
}

impl Summary {
    pub fn from_runs(runs: &[Duration]) -> Result<Self, TooFewRuns> {
        let ns: Vec<u64> = runs.iter().map(|d| d.as_nanos() as u64).collect();
        let as_f64: Vec<f64> = ns.iter().map(|&v| v as f64).collect();
        let trimmed_mean_ns = trimmed_mean(&as_f64)?;
        Ok(Summary {
            trimmed_mean_ns,
            min_ns: ns.iter().copied().min().expect("non-empty"),
            max_ns: ns.iter().copied().max().expect("non-empty"),
            runs_ns: ns,
        })
    }

    pub fn trimmed_mean(&self) -> Duration {
        Duration::from_nanos(self.trimmed_mean_ns.round() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_one_max_and_one_min() {
        assert_eq!(trimmed_mean(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap(), 3.0);
    }

    #[test]
    fn ties_remove_one_instance_each() {
        assert_eq!(trimmed_mean(&[5.0, 5.0, 5.0]).unwrap(), 5.0);
    }

    #[test]
    fn fractional_mean() {
        assert_eq!(
            trimmed_mean(&[2.0, 9.0, 4.0, 4.0, 1.0]).unwrap(),
            10.0 / 3.0
        );
    }

    #[test]
    fn too_few_runs_is_an_error() {
        assert_eq!(trimmed_mean(&[1.0, 2.0]), Err(TooFewRuns(2)));
    }

    #[test]
    fn permutation_invariant() {
        let base = [7.0, 1.0, 9.0, 3.0, 3.0, 12.0];
        let expected = trimmed_mean(&base).unwrap();
        let mut rotated = base.to_vec();
        for _ in 0..base.len() {
            rotated.rotate_left(1);
            assert_eq!(trimmed_mean(&rotated).unwrap(), expected);
        }
        let mut reversed = base.to_vec();
        reversed.reverse();
        assert_eq!(trimmed_mean(&reversed).unwrap(), expected);
    }

    #[test]
    fn summary_from_durations() {
        let runs: Vec<Duration> = [5, 1, 3].iter().map(|&ms| Duration::from_millis(ms)).collect();
        let s = Summary::from_runs(&runs).unwrap();
        assert_eq!(s.min_ns, 1_000_000);
        assert_eq!(s.max_ns, 5_000_000);
        assert_eq!(s.trimmed_mean_ns, 3_000_000.0);
    }
}
