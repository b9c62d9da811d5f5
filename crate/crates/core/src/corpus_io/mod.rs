//! Readers and writers for every on-disk format the toolkit exchanges:
//! `id<TAB>text` collections and query sets, TREC qrels, entity-annotation
//! JSON lines and plain id lists.
//!
//! Every reader comes in two flavours: `read_*` over any [`BufRead`] and
//! `load_*` over a path. Line numbers in errors are 1-based.

mod annotations;
mod collection;
mod filter;
mod qrels;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub use annotations::{
    load_annotations, read_annotations, write_annotations, AnnotationMap, EntityAnnotationSet,
    EntityLink,
};
pub use collection::{
    load_collection, load_queries, read_collection, read_queries, write_tsv, CollectionReader,
    Document, Query,
};
pub use filter::{filter_by_ids, Filtered};
pub use qrels::{load_qrels, read_qrels, write_qrels, LoadedQrels, Qrels};

use crate::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Iterates `(1-based line number, line)` with any trailing `\r` removed.
pub(crate) fn numbered_lines<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().map(|(i, line)| {
        let mut line = line?;
        if line.ends_with('\r') {
            line.pop();
        }
        Ok((i + 1, line))
    })
}

/// Reads a newline-separated id list (blank lines ignored, order kept,
/// repeated ids collapsed).
pub fn read_id_list<R: BufRead>(reader: R) -> Result<Vec<String>> {
    let mut seen = std::collections::HashSet::new();
    let mut ids = Vec::new();
    for item in numbered_lines(reader) {
        let (_, line) = item?;
        let id = line.trim();
        if !id.is_empty() && seen.insert(id.to_string()) {
            ids.push(id.to_string());
        }
    }
    Ok(ids)
}

pub fn load_id_list(path: &Path) -> Result<Vec<String>> {
    read_id_list(open(path)?)
}

pub fn write_id_list<W: Write>(mut out: W, ids: &[String]) -> Result<()> {
    for id in ids {
        writeln!(out, "{id}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_list_tolerates_crlf_and_blanks() {
        let ids = read_id_list("1\r\n\r\n2\n1\n 3 \n".as_bytes()).unwrap();
        assert_eq!(ids, vec!["1", "2", "3"]);
    }
}
