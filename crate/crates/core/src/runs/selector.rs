use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{combined_tag, union_query_ids, Run, SelectorLabel};
use crate::corpus_io::{numbered_lines, open};
use crate::{Error, Result};

/// Builds a run by taking, per query, the list of the assigned run. Queries
/// without an assignment use run 0; assignments for unknown queries are
/// ignored.
pub fn apply_selector(runs: &[Run], assignment: &BTreeMap<String, usize>) -> Result<Run> {
    if runs.is_empty() {
        return Err(Error::Contract("selection needs at least one run".into()));
    }
    if let Some((qid, &i)) = assignment.iter().find(|(_, &i)| i >= runs.len()) {
        return Err(Error::Contract(format!(
            "query {qid} assigned to run {i}, but only {} runs were given",
            runs.len()
        )));
    }
    let queries = union_query_ids(runs);
    let unknown = assignment.keys().filter(|q| !queries.contains(*q)).count();
    if unknown > 0 {
        log::warn!("selector: {unknown} assigned queries appear in no run; ignored");
    }
    let mut out = Run::new(combined_tag("select", runs));
    for qid in queries {
        let i = assignment.get(&qid).copied().unwrap_or(0);
        if let Some(list) = runs[i].ranking(&qid) {
            out.set_ranking(&qid, list.to_vec());
        }
    }
    Ok(out)
}

/// Reads `qid<TAB>run-index` lines.
pub fn read_assignment<R: BufRead>(reader: R) -> Result<BTreeMap<String, usize>> {
    let mut map = BTreeMap::new();
    for item in numbered_lines(reader) {
        let (line_no, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [qid, idx] = fields[..] else {
            return Err(Error::Malformed {
                line: line_no,
                reason: "expected `qid<TAB>label`".into(),
            });
        };
        let idx: usize = idx.parse().map_err(|_| Error::Parse {
            line: line_no,
            reason: format!("label {idx:?} is not a non-negative integer"),
        })?;
        map.insert(qid.to_string(), idx);
    }
    Ok(map)
}

pub fn load_assignment(path: &Path) -> Result<BTreeMap<String, usize>> {
    read_assignment(open(path)?)
}

pub fn write_labels<W: Write>(mut out: W, labels: &[SelectorLabel]) -> Result<()> {
    for l in labels {
        writeln!(out, "{}\t{}", l.query_id, l.label)?;
    }
    out.flush()?;
    Ok(())
}
