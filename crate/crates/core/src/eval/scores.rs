use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::corpus_io::{numbered_lines, open};
use crate::{Error, Result};

/// Reranker scores per query, as produced by an external cross-encoder.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredRanking {
    pub scores: BTreeMap<String, Vec<(String, f64)>>,
}

impl ScoredRanking {
    pub fn get(&self, qid: &str) -> Option<&[(String, f64)]> {
        self.scores.get(qid).map(Vec::as_slice)
    }

    pub fn score_of(&self, qid: &str, doc: &str) -> Option<f64> {
        self.get(qid)?
            .iter()
            .find(|(d, _)| d == doc)
            .map(|(_, s)| *s)
    }
}

/// Reads `qid<TAB>docid<TAB>score` lines.
pub fn read_scores<R: BufRead>(reader: R) -> Result<ScoredRanking> {
    let mut scores: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for item in numbered_lines(reader) {
        let (line_no, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [qid, doc, score] = fields[..] else {
            return Err(Error::Malformed {
                line: line_no,
                reason: "expected `qid<TAB>docid<TAB>score`".into(),
            });
        };
        let score: f64 = score
            .trim()
            .parse()
            .ok()
            .filter(|s: &f64| !s.is_nan())
            .ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("score {score:?} is not a number"),
            })?;
        if !seen.insert((qid.to_string(), doc.to_string())) {
            return Err(Error::DuplicateId {
                line: line_no,
                id: format!("{qid}/{doc}"),
            });
        }
        scores
            .entry(qid.to_string())
            .or_default()
            .push((doc.to_string(), score));
    }
    Ok(ScoredRanking { scores })
}

pub fn load_scores(path: &Path) -> Result<ScoredRanking> {
    read_scores(open(path)?)
}

pub fn write_scores<W: Write>(mut out: W, s: &ScoredRanking) -> Result<()> {
    for (q, docs) in &s.scores {
        for (d, score) in docs {
            writeln!(out, "{q}\t{d}\t{score}")?;
        }
    }
    out.flush()?;
    Ok(())
}
