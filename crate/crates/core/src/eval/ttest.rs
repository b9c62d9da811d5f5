use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EvalResult;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    /// Two-sided p-value.
    pub p_two_sided: f64,
    pub n: usize,
    pub mean_diff: f64,
}

impl TTestResult {
    pub fn degrees_of_freedom(&self) -> usize {
        self.n - 1
    }
}

/// Paired Student t-test on `a[i] - b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::Precondition(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "paired t-test needs at least 2 pairs, got {n}"
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().all(|&d| d == diffs[0]) {
        return Err(Error::DegenerateTest(
            "differences have zero variance".into(),
        ));
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let t = mean / (var.sqrt() / nf.sqrt());
    let dist =
        StudentsT::new(0.0, 1.0, nf - 1.0).map_err(|e| Error::DegenerateTest(e.to_string()))?;
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(TTestResult {
        t,
        p_two_sided: p,
        n,
        mean_diff: mean,
    })
}

/// Paired test over two evaluations of the same query set.
pub fn paired_t_test_results(a: &EvalResult, b: &EvalResult) -> Result<TTestResult> {
    if !a.per_query.keys().eq(b.per_query.keys()) {
        return Err(Error::Precondition(
            "evaluations cover different query sets".into(),
        ));
    }
    let xs: Vec<f64> = a.per_query.values().copied().collect();
    let ys: Vec<f64> = b.per_query.values().copied().collect();
    paired_t_test(&xs, &ys)
}
