use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{numbered_lines, open};
use crate::{Error, Result};

/// A passage of the collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub text: String,
}

impl From<Document> for Query {
    fn from(d: Document) -> Self {
        Query {
            id: d.id,
            text: d.text,
        }
    }
}

/// Streaming reader over an `id<TAB>text` file.
///
/// Blank lines are skipped. Ids must be non-empty, free of whitespace and
/// unique within the file.
pub struct CollectionReader {
    lines: Box<dyn Iterator<Item = Result<(usize, String)>>>,
    seen: HashSet<String>,
    skip_header: bool,
}

impl CollectionReader {
    fn new<R: BufRead + 'static>(reader: R, expect_header: bool) -> Self {
        CollectionReader {
            lines: Box::new(numbered_lines(reader)),
            seen: HashSet::new(),
            skip_header: expect_header,
        }
    }
}

impl Iterator for CollectionReader {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (line_no, line) = match self.lines.next()? {
                Ok(v) => v,
                Err(e) => return Some(Err(e)),
            };
            if std::mem::take(&mut self.skip_header) {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            return Some(parse_record(line_no, &line, &mut self.seen));
        }
    }
}

fn parse_record(line_no: usize, line: &str, seen: &mut HashSet<String>) -> Result<Document> {
    let Some((id, text)) = line.split_once('\t') else {
        return Err(Error::Malformed {
            line: line_no,
            reason: "expected `id<TAB>text`".into(),
        });
    };
    if id.is_empty() || id.chars().any(char::is_whitespace) {
        return Err(Error::Malformed {
            line: line_no,
            reason: format!("invalid id {id:?}"),
        });
    }
    if !seen.insert(id.to_string()) {
        return Err(Error::DuplicateId {
            line: line_no,
            id: id.to_string(),
        });
    }
    Ok(Document {
        id: id.to_string(),
        text: text.to_string(),
    })
}

pub fn read_collection<R: BufRead + 'static>(reader: R, expect_header: bool) -> CollectionReader {
    CollectionReader::new(reader, expect_header)
}

pub fn load_collection(path: &Path, expect_header: bool) -> Result<CollectionReader> {
    Ok(read_collection(open(path)?, expect_header))
}

pub fn read_queries<R: BufRead + 'static>(reader: R) -> Result<Vec<Query>> {
    read_collection(reader, false)
        .map(|d| d.map(Query::from))
        .collect()
}

pub fn load_queries(path: &Path) -> Result<Vec<Query>> {
    read_queries(open(path)?)
}

/// Writes `id<TAB>text` lines in the order given.
pub fn write_tsv<'a, W, I>(mut out: W, records: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    for (id, text) in records {
        writeln!(out, "{id}\t{text}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(input: &'static str) -> Result<Vec<Document>> {
        read_collection(input.as_bytes(), false).collect()
    }

    #[test]
    fn parses_passage_line() {
        let d = docs("7\tThe scratch of an eagle in a dream means a sickness.\n").unwrap();
        assert_eq!(
            d,
            vec![Document {
                id: "7".into(),
                text: "The scratch of an eagle in a dream means a sickness.".into()
            }]
        );
    }

    #[test]
    fn empty_file_is_empty_stream() {
        assert!(docs("").unwrap().is_empty());
    }

    #[test]
    fn missing_tab_reports_line() {
        match docs("9 no-tab-here\n") {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected malformed, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        match docs("a\tx\n\nb\ty\na\tz\n") {
            Err(Error::DuplicateId { line, id }) => {
                assert_eq!(line, 4);
                assert_eq!(id, "a");
            }
            other => panic!("expected duplicate, got {other:?}"),
        }
    }

    #[test]
    fn header_and_crlf() {
        let d: Vec<_> = read_collection("id\ttext\r\n1\tone\r\n2\ttwo\r\n".as_bytes(), true)
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].text, "two");
    }

    #[test]
    fn text_keeps_later_tabs() {
        let d = docs("1\ta\tb\n").unwrap();
        assert_eq!(d[0].text, "a\tb");
    }
}
