//! On-disk index layout (all integers LEB128 varints unless noted):
//!
//! ```text
//! magic        8 bytes  "SPEXIDX\0"
//! version      u32 little-endian
//! doc_count
//! per doc      id_len, id bytes, length
//! term_count
//! per term     term_len, term bytes, df, df × (ordinal delta, tf)
//! trailer      4 bytes  "END!"
//! ```
//!
//! Terms are written in sorted order and ordinal deltas are taken from the
//! previous posting (the first from 0), so the encoding of a given index is
//! unique.

use std::io::{Read, Write};
use std::path::Path;

use super::varint::{read_u64, write_u64};
use super::{Index, IndexStats, Posting};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SPEXIDX\0";
pub const FORMAT_VERSION: u32 = 1;
const TRAILER: &[u8; 4] = b"END!";

pub fn write_index<W: Write>(mut out: W, index: &Index) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let stats = index.stats();
    write_u64(&mut buf, stats.doc_count as u64);
    for (id, &len) in stats.doc_ids.iter().zip(&stats.doc_lengths) {
        write_str(&mut buf, id);
        write_u64(&mut buf, u64::from(len));
    }
    write_u64(&mut buf, index.terms.len() as u64);
    for (term, postings) in index.iter_terms() {
        write_str(&mut buf, term);
        write_u64(&mut buf, postings.len() as u64);
        let mut prev = 0u32;
        for p in postings {
            write_u64(&mut buf, u64::from(p.doc_ordinal - prev));
            write_u64(&mut buf, u64::from(p.term_frequency));
            prev = p.doc_ordinal;
        }
    }
    buf.extend_from_slice(TRAILER);
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn write_str(buf: &mut Vec<u8>, s: &str) {
    write_u64(buf, s.len() as u64);
    buf.extend_from_slice(s.as_bytes());
}

pub fn save_index(index: &Index, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_index(std::io::BufWriter::new(file), index)
}

pub fn read_index<R: Read>(mut input: R) -> Result<Index> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn load_index(path: &Path) -> Result<Index> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn truncated() -> Error {
    Error::CorruptIndex("unexpected end of file".into())
}

impl<'a> Cursor<'a> {
    fn varint(&mut self) -> Result<u64> {
        read_u64(self.buf, &mut self.pos).ok_or_else(truncated)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let v = self.varint()?;
        u32::try_from(v).map_err(|_| Error::CorruptIndex(format!("{what} {v} out of range")))
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or_else(truncated)?;
        let out = self.buf.get(self.pos..end).ok_or_else(truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn string(&mut self) -> Result<String> {
        let len = self.varint()? as usize;
        let raw = self.bytes(len)?;
        String::from_utf8(raw.to_vec())
            .map_err(|_| Error::CorruptIndex("string is not valid UTF-8".into()))
    }
}

fn decode(bytes: &[u8]) -> Result<Index> {
    if bytes.len() < MAGIC.len() {
        if MAGIC.starts_with(bytes) {
            return Err(truncated());
        }
        return Err(Error::IncompatibleIndex("not an index file".into()));
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::IncompatibleIndex("bad magic bytes".into()));
    }
    let mut cur = Cursor {
        buf: bytes,
        pos: MAGIC.len(),
    };
    let version = u32::from_le_bytes(cur.bytes(4)?.try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::IncompatibleIndex(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }

    let doc_count = cur.u32("document count")? as usize;
    let mut doc_ids = Vec::with_capacity(doc_count.min(bytes.len()));
    let mut doc_lengths = Vec::with_capacity(doc_count.min(bytes.len()));
    for _ in 0..doc_count {
        doc_ids.push(cur.string()?);
        doc_lengths.push(cur.u32("document length")?);
    }

    let term_count = cur.varint()? as usize;
    let mut terms: Vec<String> = Vec::with_capacity(term_count.min(bytes.len()));
    let mut postings = Vec::with_capacity(term_count.min(bytes.len()));
    for _ in 0..term_count {
        let term = cur.string()?;
        if terms.last().is_some_and(|prev| prev >= &term) {
            return Err(Error::CorruptIndex("term dictionary is not sorted".into()));
        }
        let df = cur.varint()? as usize;
        if df == 0 || df > doc_count {
            return Err(Error::CorruptIndex(format!(
                "document frequency {df} for {term:?} outside 1..={doc_count}"
            )));
        }
        let mut plist = Vec::with_capacity(df);
        let mut ordinal = 0u64;
        for i in 0..df {
            let delta = cur.varint()?;
            if i > 0 && delta == 0 {
                return Err(Error::CorruptIndex(
                    "postings not strictly increasing".into(),
                ));
            }
            ordinal += delta;
            if ordinal >= doc_count as u64 {
                return Err(Error::CorruptIndex(format!(
                    "ordinal {ordinal} out of range"
                )));
            }
            let tf = cur.u32("term frequency")?;
            if tf == 0 {
                return Err(Error::CorruptIndex("zero term frequency".into()));
            }
            plist.push(Posting {
                doc_ordinal: ordinal as u32,
                term_frequency: tf,
            });
        }
        terms.push(term);
        postings.push(plist);
    }
    if cur.bytes(TRAILER.len())? != TRAILER {
        return Err(Error::CorruptIndex("missing trailer".into()));
    }
    if cur.pos != bytes.len() {
        return Err(Error::CorruptIndex("trailing bytes after index".into()));
    }
    Ok(Index::from_parts(
        IndexStats::new(doc_ids, doc_lengths),
        terms,
        postings,
    ))
}
