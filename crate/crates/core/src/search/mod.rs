//! BM25 retrieval and Offer-Weight pseudo-relevance feedback, exposed as
//! interchangeable [`Retriever`] strategies.

mod bm25;
mod prf;

use rayon::prelude::*;

pub use bm25::{bm25_score, idf, retrieve_ordinals, retrieve_terms, term_score, Bm25Params};
pub use prf::{offer_weight, prf_expand_terms, relevance_weight, PrfParams};

use crate::analysis::terms;
use crate::corpus_io::Query;
use crate::index::Index;
use crate::registry::Registry;
use crate::runs::Run;
use crate::{Error, Result};

/// A first-stage ranking function over an [`Index`].
pub trait Retriever: Send + Sync {
    fn name(&self) -> &str;

    fn retrieve(&self, index: &Index, query: &Query, k: usize) -> Result<Vec<(String, f64)>>;
}

/// Plain BM25 over the tokenized query.
#[derive(Debug, Clone, Default)]
pub struct Bm25 {
    pub params: Bm25Params,
}

impl Retriever for Bm25 {
    fn name(&self) -> &str {
        "bm25"
    }

    fn retrieve(&self, index: &Index, query: &Query, k: usize) -> Result<Vec<(String, f64)>> {
        retrieve_topk(query, index, &self.params, k)
    }
}

/// BM25 over the query expanded with feedback terms. Queries whose initial
/// ranking is empty fall back to the unexpanded query.
#[derive(Debug, Clone, Default)]
pub struct Bm25Prf {
    pub params: Bm25Params,
    pub prf: PrfParams,
}

impl Retriever for Bm25Prf {
    fn name(&self) -> &str {
        "bm25-prf"
    }

    fn retrieve(&self, index: &Index, query: &Query, k: usize) -> Result<Vec<(String, f64)>> {
        let base = terms(&query.text);
        let expanded = match prf_expand_terms(&base, index, &self.params, &self.prf) {
            Ok(t) => t,
            Err(Error::PrfUnavailable) => base,
            Err(e) => return Err(e),
        };
        retrieve_terms(&expanded, index, &self.params, k)
    }
}

/// Retrieval settings a retriever factory may use.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchConfig {
    pub bm25: Bm25Params,
    pub prf: PrfParams,
}

pub type RetrieverFactory = fn(&SearchConfig) -> Result<Box<dyn Retriever>>;

pub fn retrievers() -> Registry<RetrieverFactory> {
    let mut r: Registry<RetrieverFactory> = Registry::new("retriever");
    r.register("bm25", |cfg| {
        cfg.bm25.validate()?;
        Ok(Box::new(Bm25 { params: cfg.bm25 }))
    });
    r.register("bm25-prf", |cfg| {
        cfg.bm25.validate()?;
        cfg.prf.validate()?;
        Ok(Box::new(Bm25Prf {
            params: cfg.bm25,
            prf: cfg.prf,
        }))
    });
    r
}

/// Top-`k` BM25 ranking for one query.
pub fn retrieve_topk(
    query: &Query,
    index: &Index,
    params: &Bm25Params,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    retrieve_terms(&terms(&query.text), index, params, k)
}

/// Runs `retriever` over every query (in parallel) and collects a run.
/// Queries without any hit are left out of the run.
pub fn search_run(
    index: &Index,
    queries: &[Query],
    retriever: &dyn Retriever,
    k: usize,
    tag: &str,
) -> Result<Run> {
    if index.doc_count() == 0 {
        return Err(Error::Retrieval("index is empty".into()));
    }
    let results: Vec<(String, Vec<(String, f64)>)> = queries
        .par_iter()
        .map(|q| Ok((q.id.clone(), retriever.retrieve(index, q, k)?)))
        .collect::<Result<_>>()?;
    let mut run = Run::new(tag);
    for (qid, ranking) in results {
        if !ranking.is_empty() {
            run.set_ranking(&qid, ranking);
        }
    }
    Ok(run)
}
