//! Runs (per-query ranked lists) and the strategies that combine several
//! runs into one: reciprocal rank fusion, the oracle selector and
//! externally assigned per-query selection.

mod oracle;
mod rrf;
mod selector;
mod trec;

use std::collections::{BTreeMap, BTreeSet, HashSet};

pub use oracle::{oracle_choices, oracle_run, selector_labels, SelectorLabel};
pub use rrf::{rrf_fuse, RrfParams};
pub use selector::{apply_selector, load_assignment, read_assignment, write_labels};
pub use trec::{load_run, read_run, save_run, write_run};

use crate::corpus_io::Qrels;
use crate::registry::Registry;
use crate::{Error, Result};

/// Ranked `(doc id, score)` lists per query. Rank is the 1-based position in
/// the list.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    tag: String,
    rankings: BTreeMap<String, Vec<(String, f64)>>,
}

impl Run {
    pub fn new(tag: impl Into<String>) -> Self {
        Run {
            tag: tag.into(),
            rankings: BTreeMap::new(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn set_tag(&mut self, tag: impl Into<String>) {
        self.tag = tag.into();
    }

    pub fn set_ranking(&mut self, qid: &str, ranking: Vec<(String, f64)>) {
        self.rankings.insert(qid.to_string(), ranking);
    }

    pub fn ranking(&self, qid: &str) -> Option<&[(String, f64)]> {
        self.rankings.get(qid).map(Vec::as_slice)
    }

    pub fn contains_query(&self, qid: &str) -> bool {
        self.rankings.contains_key(qid)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.rankings.keys().map(String::as_str)
    }

    pub fn num_queries(&self) -> usize {
        self.rankings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(String, f64)])> {
        self.rankings
            .iter()
            .map(|(q, r)| (q.as_str(), r.as_slice()))
    }

    /// 1-based rank of the first document in `qid`'s list accepted by `pred`.
    pub fn first_rank_where(&self, qid: &str, mut pred: impl FnMut(&str) -> bool) -> Option<usize> {
        self.ranking(qid)?
            .iter()
            .position(|(d, _)| pred(d))
            .map(|p| p + 1)
    }

    pub fn filter_queries(&self, mut keep: impl FnMut(&str) -> bool) -> Run {
        Run {
            tag: self.tag.clone(),
            rankings: self
                .rankings
                .iter()
                .filter(|(q, _)| keep(q))
                .map(|(q, r)| (q.clone(), r.clone()))
                .collect(),
        }
    }

    /// Checks per-query document uniqueness and non-increasing scores.
    pub fn validate(&self) -> Result<()> {
        for (qid, ranking) in &self.rankings {
            let mut seen = HashSet::with_capacity(ranking.len());
            for (doc, _) in ranking {
                if !seen.insert(doc.as_str()) {
                    return Err(Error::RunFormat(format!(
                        "query {qid}: document {doc} ranked twice"
                    )));
                }
            }
            if ranking.windows(2).any(|w| w[1].1 > w[0].1) {
                return Err(Error::RunFormat(format!(
                    "query {qid}: scores increase down the ranking"
                )));
            }
        }
        Ok(())
    }
}

/// Sorted union of the query ids of `runs`.
pub fn union_query_ids(runs: &[Run]) -> BTreeSet<String> {
    runs.iter()
        .flat_map(|r| r.query_ids().map(str::to_string))
        .collect()
}

/// Tag of a combined run: `prefix-` followed by the input tags joined by `+`.
pub(crate) fn combined_tag(prefix: &str, runs: &[Run]) -> String {
    let joined: Vec<&str> = runs.iter().map(Run::tag).collect();
    format!("{prefix}-{}", joined.join("+"))
}

/// Merges several runs into one.
pub trait RunCombiner: Send + Sync {
    fn name(&self) -> &str;

    fn combine(&self, runs: &[Run]) -> Result<Run>;
}

pub struct Rrf {
    pub params: RrfParams,
}

impl RunCombiner for Rrf {
    fn name(&self) -> &str {
        "rrf"
    }

    fn combine(&self, runs: &[Run]) -> Result<Run> {
        rrf_fuse(runs, &self.params)
    }
}

pub struct Oracle {
    pub qrels: Qrels,
}

impl RunCombiner for Oracle {
    fn name(&self) -> &str {
        "oracle"
    }

    fn combine(&self, runs: &[Run]) -> Result<Run> {
        oracle_run(runs, &self.qrels)
    }
}

/// Per-query selection imported from an external classifier.
pub struct Selector {
    pub assignment: BTreeMap<String, usize>,
}

impl RunCombiner for Selector {
    fn name(&self) -> &str {
        "select"
    }

    fn combine(&self, runs: &[Run]) -> Result<Run> {
        apply_selector(runs, &self.assignment)
    }
}

/// Inputs a combiner factory may need; strategies ignore what they don't use.
#[derive(Debug, Clone, Default)]
pub struct CombinerContext {
    pub rrf: RrfParams,
    pub qrels: Option<Qrels>,
    pub assignment: Option<BTreeMap<String, usize>>,
}

pub type CombinerFactory = fn(&CombinerContext) -> Result<Box<dyn RunCombiner>>;

pub fn combiners() -> Registry<CombinerFactory> {
    let mut r: Registry<CombinerFactory> = Registry::new("run combiner");
    r.register("rrf", |ctx| {
        ctx.rrf.validate()?;
        Ok(Box::new(Rrf { params: ctx.rrf }))
    });
    r.register("oracle", |ctx| {
        let qrels = ctx
            .qrels
            .clone()
            .ok_or_else(|| Error::Config("oracle needs qrels".into()))?;
        Ok(Box::new(Oracle { qrels }))
    });
    r.register("select", |ctx| {
        let assignment = ctx
            .assignment
            .clone()
            .ok_or_else(|| Error::Config("selector needs a run assignment".into()))?;
        Ok(Box::new(Selector { assignment }))
    });
    r
}
