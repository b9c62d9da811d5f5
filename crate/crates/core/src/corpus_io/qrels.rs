use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{numbered_lines, open};
use crate::{Error, Result};

/// Relevance judgments: query id → doc id → grade. Grade 0 means judged
/// non-relevant; anything ≥ 1 counts as relevant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a judgment, returning the previous grade for the pair if any.
    pub fn insert(&mut self, qid: &str, doc_id: &str, grade: u32) -> Option<u32> {
        self.judgments
            .entry(qid.to_string())
            .or_default()
            .insert(doc_id.to_string(), grade)
    }

    pub fn grade(&self, qid: &str, doc_id: &str) -> Option<u32> {
        self.judgments.get(qid)?.get(doc_id).copied()
    }

    /// Grade used for gain computations; unjudged documents count as 0.
    pub fn gain(&self, qid: &str, doc_id: &str) -> u32 {
        self.grade(qid, doc_id).unwrap_or(0)
    }

    pub fn is_relevant(&self, qid: &str, doc_id: &str) -> bool {
        self.gain(qid, doc_id) >= 1
    }

    pub fn judged(&self, qid: &str) -> Option<&BTreeMap<String, u32>> {
        self.judgments.get(qid)
    }

    pub fn relevant<'a>(&'a self, qid: &str) -> impl Iterator<Item = &'a str> + 'a {
        self.judgments
            .get(qid)
            .into_iter()
            .flat_map(|m| m.iter().filter(|(_, &g)| g >= 1).map(|(d, _)| d.as_str()))
    }

    pub fn num_relevant(&self, qid: &str) -> usize {
        self.relevant(qid).count()
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn contains_query(&self, qid: &str) -> bool {
        self.judgments.contains_key(qid)
    }

    pub fn num_queries(&self) -> usize {
        self.judgments.len()
    }

    /// Total number of (query, doc) judgments.
    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.judgments
            .iter()
            .flat_map(|(q, docs)| docs.iter().map(move |(d, &g)| (q.as_str(), d.as_str(), g)))
    }

    /// Keeps only the queries accepted by `keep`.
    pub fn retain_queries(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.judgments.retain(|q, _| keep(q));
    }
}

/// Parsed qrels plus the number of (query, doc) pairs that were overwritten
/// by a later line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedQrels {
    pub qrels: Qrels,
    pub duplicates: usize,
}

/// Reads TREC qrels (`qid iter docid grade`, tab or space separated).
pub fn read_qrels<R: BufRead>(reader: R) -> Result<LoadedQrels> {
    let mut qrels = Qrels::new();
    let mut duplicates = 0;
    for item in numbered_lines(reader) {
        let (line_no, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [qid, _iter, doc_id, grade] = fields[..] else {
            return Err(Error::Malformed {
                line: line_no,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        };
        let grade: u32 = grade.parse().map_err(|_| Error::Parse {
            line: line_no,
            reason: format!("grade {grade:?} is not a non-negative integer"),
        })?;
        if qrels.insert(qid, doc_id, grade).is_some() {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        log::warn!("qrels: {duplicates} duplicate (query, doc) pairs, last one kept");
    }
    Ok(LoadedQrels { qrels, duplicates })
}

pub fn load_qrels(path: &Path) -> Result<LoadedQrels> {
    read_qrels(open(path)?)
}

pub fn write_qrels<W: Write>(mut out: W, qrels: &Qrels) -> Result<()> {
    for (q, d, g) in qrels.iter() {
        writeln!(out, "{q} 0 {d} {g}")?;
    }
    out.flush()?;
    Ok(())
}
