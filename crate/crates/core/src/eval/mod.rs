//! Evaluation: per-query metrics and their means, recall curves, paired
//! significance tests, run pooling and qrels derived from reranker scores.

mod curve;
mod derive;
mod metrics;
mod pool;
mod scores;
mod ttest;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

pub use curve::{recall_curve, write_curve_table, RecallCurve, DEFAULT_CUTOFFS};
pub use derive::{derive_qrels_duo, derive_qrels_top1, DUO_DEPTH};
pub use metrics::{
    f_measure, metrics, parse_metric, AveragePrecision, CumulativeGain, Dcg, DcgVariant, FMeasure,
    Metric, MetricFactory, Ndcg, Precision, Recall, ReciprocalRank,
};
pub use pool::{pool_runs, write_pool, Pool, PoolEntry};
pub use scores::{load_scores, read_scores, write_scores, ScoredRanking};
pub use ttest::{paired_t_test, paired_t_test_results, TTestResult};

use crate::corpus_io::Qrels;
use crate::runs::Run;
use crate::Result;

/// Per-query values of one metric and their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub metric: String,
    pub per_query: BTreeMap<String, f64>,
    /// Mean over `per_query`; 0 when no query was evaluated.
    pub mean: f64,
    /// Queries left out: judged without any relevant document, or present in
    /// the run but not in the qrels.
    pub skipped: usize,
}

/// Scores every query that has at least one relevant judgment. A judged
/// query missing from the run is scored against an empty ranking.
pub fn evaluate(run: &Run, qrels: &Qrels, metric: &dyn Metric) -> EvalResult {
    let judged: Vec<(&str, &BTreeMap<String, u32>)> = qrels
        .query_ids()
        .filter_map(|q| qrels.judged(q).map(|j| (q, j)))
        .collect();
    let no_relevant = judged
        .iter()
        .filter(|(_, j)| !j.values().any(|&g| g >= 1))
        .count();
    let unjudged = run.query_ids().filter(|q| !qrels.contains_query(q)).count();

    let per_query: BTreeMap<String, f64> = judged
        .par_iter()
        .filter(|(_, j)| j.values().any(|&g| g >= 1))
        .map(|(q, j)| {
            let ranking = run.ranking(q).unwrap_or(&[]);
            (q.to_string(), metric.score(ranking, j))
        })
        .collect();
    let mean = if per_query.is_empty() {
        0.0
    } else {
        per_query.values().sum::<f64>() / per_query.len() as f64
    };
    EvalResult {
        metric: metric.name(),
        per_query,
        mean,
        skipped: no_relevant + unjudged,
    }
}

/// `metric<TAB>qid-or-all<TAB>value` lines, per-query lines first when asked.
pub fn write_eval<W: Write>(mut out: W, result: &EvalResult, per_query: bool) -> Result<()> {
    if per_query {
        for (q, v) in &result.per_query {
            writeln!(out, "{}\t{q}\t{v:.4}", result.metric)?;
        }
    }
    writeln!(out, "{}\tall\t{:.4}", result.metric, result.mean)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runs::tests::run;

    #[test]
    fn mean_over_judged_queries() {
        let r = run(
            "t",
            &[
                ("q1", &["a", "r1"]),
                ("q2", &["x", "y", "z", "r2"]),
                ("q9", &["a"]),
            ],
        );
        let mut q = Qrels::new();
        q.insert("q1", "r1", 1);
        q.insert("q2", "r2", 1);
        q.insert("q3", "n", 0);
        let res = evaluate(&r, &q, parse_metric("mrr@10").unwrap().as_ref());
        assert_eq!(res.per_query.len(), 2);
        assert_eq!(res.mean, (0.5 + 0.25) / 2.0);
        assert_eq!(res.mean, 0.375);
        assert_eq!(res.skipped, 2);
    }

    #[test]
    fn judged_query_missing_from_run_scores_zero() {
        let r = run("t", &[("q1", &["r1"])]);
        let mut q = Qrels::new();
        q.insert("q1", "r1", 1);
        q.insert("q2", "r2", 1);
        let res = evaluate(&r, &q, parse_metric("recall@1000").unwrap().as_ref());
        assert_eq!(res.per_query["q2"], 0.0);
        assert_eq!(res.mean, 0.5);
    }

    #[test]
    fn output_shape() {
        let r = run("t", &[("q1", &["r1"])]);
        let mut q = Qrels::new();
        q.insert("q1", "r1", 1);
        let res = evaluate(&r, &q, parse_metric("recall@1000").unwrap().as_ref());
        let mut buf = Vec::new();
        write_eval(&mut buf, &res, true).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "recall@1000\tq1\t1.0000\nrecall@1000\tall\t1.0000\n"
        );
    }
}
