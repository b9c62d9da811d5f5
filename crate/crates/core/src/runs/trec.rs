//! TREC run files: `qid Q0 docid rank score tag`.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use super::Run;
use crate::corpus_io::{create, numbered_lines, open};
use crate::{Error, Result};

/// Reads a run. Lines of one query may appear in any rank order; ranks must
/// form exactly `1..=n` and documents must be unique per query.
pub fn read_run<R: BufRead>(reader: R) -> Result<Run> {
    let mut tag: Option<String> = None;
    let mut rows: BTreeMap<String, Vec<(usize, String, f64)>> = BTreeMap::new();
    for item in numbered_lines(reader) {
        let (line_no, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [qid, _q0, doc, rank, score, run_tag] = fields[..] else {
            return Err(Error::Malformed {
                line: line_no,
                reason: format!("expected 6 fields, found {}", fields.len()),
            });
        };
        let rank: usize = rank
            .parse()
            .ok()
            .filter(|&r| r >= 1)
            .ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("rank {rank:?} is not a positive integer"),
            })?;
        let score: f64 = score
            .parse()
            .ok()
            .filter(|s: &f64| !s.is_nan())
            .ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("score {score:?} is not a number"),
            })?;
        match &tag {
            None => tag = Some(run_tag.to_string()),
            Some(t) if t != run_tag => {
                log::warn!(
                    "line {line_no}: run tag {run_tag:?} differs from {t:?}; keeping the first"
                )
            }
            Some(_) => {}
        }
        rows.entry(qid.to_string())
            .or_default()
            .push((rank, doc.to_string(), score));
    }

    let mut run = Run::new(tag.unwrap_or_default());
    for (qid, mut entries) in rows {
        entries.sort_by_key(|e| e.0);
        let mut seen = HashSet::with_capacity(entries.len());
        for (i, (rank, doc, _)) in entries.iter().enumerate() {
            if *rank != i + 1 {
                return Err(Error::RunFormat(format!(
                    "query {qid}: ranks are not 1..{} (found {rank} at position {})",
                    entries.len(),
                    i + 1
                )));
            }
            if !seen.insert(doc.as_str()) {
                return Err(Error::RunFormat(format!(
                    "query {qid}: document {doc} ranked twice"
                )));
            }
        }
        run.set_ranking(&qid, entries.into_iter().map(|(_, d, s)| (d, s)).collect());
    }
    Ok(run)
}

pub fn load_run(path: &Path) -> Result<Run> {
    read_run(open(path)?)
}

/// Writes a run ordered by query id then rank; ranks come from list order.
pub fn write_run<W: Write>(mut out: W, run: &Run) -> Result<()> {
    let tag = run.tag();
    if tag.is_empty() || tag.chars().any(char::is_whitespace) {
        return Err(Error::Contract(format!(
            "run tag {tag:?} must be non-empty and free of whitespace"
        )));
    }
    for (qid, ranking) in run.iter() {
        for (i, (doc, score)) in ranking.iter().enumerate() {
            writeln!(out, "{qid} Q0 {doc} {} {score} {tag}", i + 1)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_run(run: &Run, path: &Path) -> Result<()> {
    write_run(create(path)?, run)
}
