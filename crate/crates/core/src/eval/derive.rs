use std::cmp::Ordering;

use super::ScoredRanking;
use crate::corpus_io::Qrels;
use crate::{Error, Result};

/// Candidates per query passed from the pointwise to the pairwise reranker.
pub const DUO_DEPTH: usize = 50;

fn by_score_then_id(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// One grade-1 judgment per query: the document with the highest reranker
/// score (ties to the smaller doc id).
pub fn derive_qrels_top1(scores: &ScoredRanking) -> Qrels {
    let mut qrels = Qrels::new();
    for (qid, docs) in &scores.scores {
        match docs.iter().min_by(|a, b| by_score_then_id(a, b)) {
            Some((doc, _)) => {
                qrels.insert(qid, doc, 1);
            }
            None => log::warn!("derived qrels: query {qid} has no scored documents"),
        }
    }
    qrels
}

/// Takes the top `depth` documents per query by stage-1 score and judges the
/// one with the highest stage-2 score relevant.
pub fn derive_qrels_duo(
    stage1: &ScoredRanking,
    stage2: &ScoredRanking,
    depth: usize,
) -> Result<Qrels> {
    if depth == 0 {
        return Err(Error::Config("candidate depth must be at least 1".into()));
    }
    let mut qrels = Qrels::new();
    let mut missing = Vec::new();
    for (qid, docs) in &stage1.scores {
        let mut top = docs.clone();
        top.sort_by(by_score_then_id);
        top.truncate(depth);
        let mut rescored = Vec::with_capacity(top.len());
        for (doc, _) in top {
            match stage2.score_of(qid, &doc) {
                Some(s) => rescored.push((doc, s)),
                None => missing.push((qid.clone(), doc)),
            }
        }
        if let Some((doc, _)) = rescored.iter().min_by(|a, b| by_score_then_id(a, b)) {
            qrels.insert(qid, doc, 1);
        } else if docs.is_empty() {
            log::warn!("derived qrels: query {qid} has no scored documents");
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }
    Ok(qrels)
}
