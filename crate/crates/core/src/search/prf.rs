use std::collections::{BTreeMap, HashSet};

use super::bm25::{retrieve_ordinals, Bm25Params};
use crate::index::Index;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrfParams {
    /// Feedback documents taken from the initial ranking.
    pub top_docs: usize,
    /// Expansion terms appended to the query.
    pub expansion_terms: usize,
}

impl Default for PrfParams {
    fn default() -> Self {
        PrfParams {
            top_docs: 10,
            expansion_terms: 20,
        }
    }
}

impl PrfParams {
    pub fn validate(&self) -> Result<()> {
        if self.top_docs == 0 || self.expansion_terms == 0 {
            return Err(Error::Config(
                "PRF needs at least one feedback document and one expansion term".into(),
            ));
        }
        Ok(())
    }
}

/// Robertson/Spärck Jones relevance weight of a term seen in `r` of `big_r`
/// feedback documents and in `n` of `big_n` collection documents.
pub fn relevance_weight(r: u32, n: u32, big_r: u32, big_n: usize) -> f64 {
    let (r, n, big_r, big_n) = (f64::from(r), f64::from(n), f64::from(big_r), big_n as f64);
    (((r + 0.5) * (big_n - n - big_r + r + 0.5)) / ((n - r + 0.5) * (big_r - r + 0.5))).ln()
}

/// `r · RW`.
pub fn offer_weight(r: u32, n: u32, big_r: u32, big_n: usize) -> f64 {
    f64::from(r) * relevance_weight(r, n, big_r, big_n)
}

/// Appends the `m` highest offer-weight terms from the top `R` documents of
/// an initial BM25 ranking. Terms already in the query are never added.
pub fn prf_expand_terms(
    query_terms: &[String],
    index: &Index,
    params: &Bm25Params,
    prf: &PrfParams,
) -> Result<Vec<String>> {
    prf.validate()?;
    let initial = retrieve_ordinals(query_terms, index, params, prf.top_docs)?;
    if initial.is_empty() {
        return Err(Error::PrfUnavailable);
    }
    let big_r = initial.len() as u32;

    // term id -> number of feedback docs containing it
    let mut seen_in: BTreeMap<u32, u32> = BTreeMap::new();
    for &(ord, _) in &initial {
        for &tid in index.doc_terms(ord) {
            *seen_in.entry(tid).or_default() += 1;
        }
    }

    let in_query: HashSet<&str> = query_terms.iter().map(String::as_str).collect();
    let mut candidates: Vec<(&str, f64)> = seen_in
        .into_iter()
        .map(|(tid, r)| (index.term(tid), r))
        .filter(|(t, _)| !in_query.contains(t))
        .map(|(t, r)| {
            let n = index.doc_frequency(t);
            (t, offer_weight(r, n, big_r, index.doc_count()))
        })
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut expanded = query_terms.to_vec();
    expanded.extend(
        candidates
            .into_iter()
            .take(prf.expansion_terms)
            .map(|(t, _)| t.to_string()),
    );
    Ok(expanded)
}
