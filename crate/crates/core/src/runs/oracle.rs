use std::collections::BTreeMap;

use super::{combined_tag, union_query_ids, Run};
use crate::corpus_io::Qrels;
use crate::{Error, Result};

/// Training label for the run selector: the index of the run (0 = no
/// entities, 1 = entities, 2 = hashed entities) an oracle would pick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorLabel {
    pub query_id: String,
    pub label: u8,
}

/// Per query, the index of the run ranking a relevant document highest.
///
/// Ties on rank go to the earliest run; queries where no run retrieves a
/// relevant document go to run 0. Covers every query of the runs and every
/// query with judgments.
pub fn oracle_choices(runs: &[Run], qrels: &Qrels) -> Result<BTreeMap<String, usize>> {
    if runs.is_empty() {
        return Err(Error::Contract("oracle needs at least one run".into()));
    }
    let mut queries = union_query_ids(runs);
    for qid in qrels.query_ids() {
        if !queries.contains(qid) {
            log::warn!("oracle: judged query {qid} is absent from every run");
            queries.insert(qid.to_string());
        }
    }
    let choices = queries
        .into_iter()
        .map(|qid| {
            let mut best: Option<(usize, usize)> = None; // (rank, run index)
            for (i, run) in runs.iter().enumerate() {
                if let Some(rank) = run.first_rank_where(&qid, |d| qrels.is_relevant(&qid, d)) {
                    if best.is_none_or(|(r, _)| rank < r) {
                        best = Some((rank, i));
                    }
                }
            }
            let choice = best.map_or(0, |(_, i)| i);
            (qid, choice)
        })
        .collect();
    Ok(choices)
}

/// The run assembled from each query's oracle choice.
pub fn oracle_run(runs: &[Run], qrels: &Qrels) -> Result<Run> {
    let choices = oracle_choices(runs, qrels)?;
    let mut out = Run::new(combined_tag("oracle", runs));
    for (qid, i) in choices {
        if let Some(list) = runs[i].ranking(&qid) {
            out.set_ranking(&qid, list.to_vec());
        }
    }
    Ok(out)
}

/// Oracle labels over the fixed triple (no entities, entities, hashed).
pub fn selector_labels(run_triple: &[Run], qrels: &Qrels) -> Result<Vec<SelectorLabel>> {
    if run_triple.len() != 3 {
        return Err(Error::Contract(format!(
            "selector labels need exactly 3 runs, got {}",
            run_triple.len()
        )));
    }
    Ok(oracle_choices(run_triple, qrels)?
        .into_iter()
        .map(|(query_id, i)| SelectorLabel {
            query_id,
            label: i as u8,
        })
        .collect())
}
