use std::collections::BTreeMap;
use std::io::Write;

use crate::runs::{union_query_ids, Run};
use crate::{Error, Result};

/// Where a pooled document came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolEntry {
    /// Best (smallest) 1-based rank across the runs.
    pub best_rank: usize,
    /// Indices of the runs containing the document, ascending.
    pub runs: Vec<usize>,
}

/// query id → doc id → provenance.
pub type Pool = BTreeMap<String, BTreeMap<String, PoolEntry>>;

/// Per-query union of the documents of all runs.
pub fn pool_runs(runs: &[Run]) -> Result<Pool> {
    if runs.is_empty() {
        return Err(Error::Contract("pooling needs at least one run".into()));
    }
    let mut pool = Pool::new();
    for qid in union_query_ids(runs) {
        let mut docs: BTreeMap<String, PoolEntry> = BTreeMap::new();
        for (i, run) in runs.iter().enumerate() {
            for (pos, (doc, _)) in run.ranking(&qid).unwrap_or(&[]).iter().enumerate() {
                let rank = pos + 1;
                docs.entry(doc.clone())
                    .and_modify(|e| {
                        e.best_rank = e.best_rank.min(rank);
                        e.runs.push(i);
                    })
                    .or_insert(PoolEntry {
                        best_rank: rank,
                        runs: vec![i],
                    });
            }
        }
        pool.insert(qid, docs);
    }
    Ok(pool)
}

/// `qid<TAB>docid<TAB>best_rank<TAB>tag,tag,...` lines.
pub fn write_pool<W: Write>(mut out: W, pool: &Pool, runs: &[Run]) -> Result<()> {
    for (qid, docs) in pool {
        for (doc, e) in docs {
            let tags: Vec<&str> = e.runs.iter().map(|&i| runs[i].tag()).collect();
            writeln!(out, "{qid}\t{doc}\t{}\t{}", e.best_rank, tags.join(","))?;
        }
    }
    out.flush()?;
    Ok(())
}
