use std::collections::HashMap;

use rayon::prelude::*;

use super::{combined_tag, union_query_ids, Run};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RrfParams {
    pub k_constant: u32,
    /// Output depth per query.
    pub depth: usize,
}

impl Default for RrfParams {
    fn default() -> Self {
        RrfParams {
            k_constant: 60,
            depth: 1000,
        }
    }
}

impl RrfParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_constant == 0 || self.depth == 0 {
            return Err(Error::Config("RRF k and depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Reciprocal rank fusion: each document scores `Σ 1 / (k + rank)` over the
/// runs that contain it. Ties go to the smaller document id.
pub fn rrf_fuse(runs: &[Run], params: &RrfParams) -> Result<Run> {
    if runs.is_empty() {
        return Err(Error::Contract("RRF needs at least one run".into()));
    }
    params.validate()?;
    let k = f64::from(params.k_constant);
    let queries: Vec<String> = union_query_ids(runs).into_iter().collect();
    let fused: Vec<(String, Vec<(String, f64)>)> = queries
        .into_par_iter()
        .map(|qid| {
            let mut scores: HashMap<&str, f64> = HashMap::new();
            for run in runs {
                for (pos, (doc, _)) in run.ranking(&qid).unwrap_or(&[]).iter().enumerate() {
                    *scores.entry(doc.as_str()).or_insert(0.0) += 1.0 / (k + (pos + 1) as f64);
                }
            }
            let mut list: Vec<(String, f64)> = scores
                .into_iter()
                .map(|(d, s)| (d.to_string(), s))
                .collect();
            list.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            list.truncate(params.depth);
            (qid, list)
        })
        .collect();

    let mut out = Run::new(combined_tag("rrf", runs));
    for (qid, list) in fused {
        out.set_ranking(&qid, list);
    }
    Ok(out)
}
