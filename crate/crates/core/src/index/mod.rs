//! Inverted index with the collection statistics BM25 needs.
//!
//! Terms are kept in a sorted vector so that a term's position doubles as
//! its id; postings per term are sorted by document ordinal. No positions are
//! stored.

mod format;
mod varint;

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;

pub use format::{load_index, read_index, save_index, write_index, FORMAT_VERSION, MAGIC};

use crate::corpus_io::Document;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc_ordinal: u32,
    pub term_frequency: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexStats {
    pub doc_count: usize,
    pub doc_lengths: Vec<u32>,
    pub avg_doc_length: f64,
    pub doc_ids: Vec<String>,
}

impl IndexStats {
    fn new(doc_ids: Vec<String>, doc_lengths: Vec<u32>) -> Self {
        let doc_count = doc_ids.len();
        let total: u64 = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let avg_doc_length = if doc_count == 0 {
            0.0
        } else {
            total as f64 / doc_count as f64
        };
        IndexStats {
            doc_count,
            doc_lengths,
            avg_doc_length,
            doc_ids,
        }
    }
}

pub struct Index {
    stats: IndexStats,
    terms: Vec<String>,
    postings: Vec<Vec<Posting>>,
    forward: OnceLock<Vec<Vec<u32>>>,
}

impl PartialEq for Index {
    fn eq(&self, other: &Self) -> bool {
        self.stats == other.stats && self.terms == other.terms && self.postings == other.postings
    }
}

impl std::fmt::Debug for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Index")
            .field("doc_count", &self.stats.doc_count)
            .field("avg_doc_length", &self.stats.avg_doc_length)
            .field("vocabulary", &self.terms.len())
            .finish()
    }
}

impl Index {
    pub(crate) fn from_parts(
        stats: IndexStats,
        terms: Vec<String>,
        postings: Vec<Vec<Posting>>,
    ) -> Self {
        Index {
            stats,
            terms,
            postings,
            forward: OnceLock::new(),
        }
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }

    pub fn doc_count(&self) -> usize {
        self.stats.doc_count
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.stats.avg_doc_length
    }

    pub fn doc_id(&self, ordinal: u32) -> &str {
        &self.stats.doc_ids[ordinal as usize]
    }

    pub fn doc_len(&self, ordinal: u32) -> u32 {
        self.stats.doc_lengths[ordinal as usize]
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.terms
            .binary_search_by(|t| t.as_str().cmp(term))
            .ok()
            .map(|i| i as u32)
    }

    pub fn term(&self, term_id: u32) -> &str {
        &self.terms[term_id as usize]
    }

    /// Postings of `term`, empty when the term is unknown.
    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_id(term)
            .map(|id| self.postings[id as usize].as_slice())
            .unwrap_or(&[])
    }

    pub fn doc_frequency(&self, term: &str) -> u32 {
        self.postings(term).len() as u32
    }

    pub fn term_frequency(&self, term: &str, ordinal: u32) -> u32 {
        let p = self.postings(term);
        p.binary_search_by_key(&ordinal, |p| p.doc_ordinal)
            .map(|i| p[i].term_frequency)
            .unwrap_or(0)
    }

    /// `(term, postings)` pairs in term order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.terms
            .iter()
            .map(String::as_str)
            .zip(self.postings.iter().map(Vec::as_slice))
    }

    /// Distinct term ids of a document, built on first use from the postings.
    pub fn doc_terms(&self, ordinal: u32) -> &[u32] {
        let forward = self.forward.get_or_init(|| {
            let mut fwd = vec![Vec::new(); self.stats.doc_count];
            for (tid, plist) in self.postings.iter().enumerate() {
                for p in plist {
                    fwd[p.doc_ordinal as usize].push(tid as u32);
                }
            }
            fwd
        });
        &forward[ordinal as usize]
    }
}

/// Documents per shard in the parallel build.
const SHARD_SIZE: usize = 4096;

/// Document lengths and partial postings of one chunk of the collection.
type Shard = (Vec<u32>, BTreeMap<String, Vec<Posting>>);

/// Builds an index from documents using `tokenizer` to produce terms.
///
/// Shards are indexed in parallel and merged in shard order, so the result
/// does not depend on scheduling.
pub fn build_index<I, F>(documents: I, tokenizer: F) -> Result<Index>
where
    I: IntoIterator<Item = Document>,
    F: Fn(&str) -> Vec<String> + Sync,
{
    let docs: Vec<Document> = documents.into_iter().collect();
    let mut seen = HashSet::with_capacity(docs.len());
    for d in &docs {
        if !seen.insert(d.id.as_str()) {
            return Err(Error::DuplicateDocument(d.id.clone()));
        }
    }
    if docs.len() > u32::MAX as usize {
        return Err(Error::Contract("collection exceeds 2^32 documents".into()));
    }

    let shards: Vec<Shard> = docs
        .par_chunks(SHARD_SIZE)
        .enumerate()
        .map(|(shard, chunk)| {
            let base = (shard * SHARD_SIZE) as u32;
            let mut lengths = Vec::with_capacity(chunk.len());
            let mut partial: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
            for (offset, doc) in chunk.iter().enumerate() {
                let tokens = tokenizer(&doc.text);
                lengths.push(tokens.len() as u32);
                let mut tf: BTreeMap<String, u32> = BTreeMap::new();
                for t in tokens {
                    *tf.entry(t).or_default() += 1;
                }
                for (term, count) in tf {
                    partial.entry(term).or_default().push(Posting {
                        doc_ordinal: base + offset as u32,
                        term_frequency: count,
                    });
                }
            }
            (lengths, partial)
        })
        .collect();

    let mut doc_lengths = Vec::with_capacity(docs.len());
    let mut merged: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    for (lengths, partial) in shards {
        doc_lengths.extend(lengths);
        for (term, postings) in partial {
            merged.entry(term).or_default().extend(postings);
        }
    }
    let doc_ids = docs.into_iter().map(|d| d.id).collect();
    let (terms, postings) = merged.into_iter().unzip();
    Ok(Index::from_parts(
        IndexStats::new(doc_ids, doc_lengths),
        terms,
        postings,
    ))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::analysis::terms;
    use proptest::prelude::*;

    pub(crate) fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.into(),
            text: text.into(),
        }
    }

    pub(crate) fn toy() -> Index {
        build_index(
            vec![doc("d1", "a b a"), doc("d2", "b c"), doc("d3", "c c c")],
            terms,
        )
        .unwrap()
    }

    #[test]
    fn toy_statistics() {
        let idx = toy();
        assert_eq!(idx.doc_count(), 3);
        assert_eq!(idx.stats().doc_lengths, [3, 2, 3]);
        assert_eq!(idx.avg_doc_length(), 8.0 / 3.0);
        assert_eq!(idx.doc_frequency("a"), 1);
        assert_eq!(idx.doc_frequency("b"), 2);
        assert_eq!(idx.doc_frequency("c"), 2);
        assert_eq!(idx.term_frequency("a", 0), 2);
        assert_eq!(idx.term_frequency("a", 1), 0);
        assert_eq!(idx.doc_frequency("zzz"), 0);
    }

    #[test]
    fn empty_collection() {
        let idx = build_index(Vec::new(), terms).unwrap();
        assert_eq!(idx.doc_count(), 0);
        assert_eq!(idx.vocabulary_size(), 0);
    }

    #[test]
    fn single_document() {
        let idx = build_index(vec![doc("only", "x")], terms).unwrap();
        assert_eq!(idx.doc_frequency("x"), 1);
        assert_eq!(idx.avg_doc_length(), 1.0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = build_index(vec![doc("a", "x"), doc("a", "y")], terms);
        assert!(matches!(r, Err(Error::DuplicateDocument(_))));
    }

    #[test]
    fn forward_terms() {
        let idx = toy();
        let names: Vec<_> = idx.doc_terms(0).iter().map(|&t| idx.term(t)).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn sharded_build_matches_across_shard_boundary() {
        let docs: Vec<Document> = (0..(SHARD_SIZE + 37))
            .map(|i| doc(&format!("d{i}"), &format!("t{} common t{}", i % 7, i % 3)))
            .collect();
        let a = build_index(docs.clone(), terms).unwrap();
        let b = build_index(docs, terms).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.doc_frequency("common") as usize, SHARD_SIZE + 37);
        for (_, plist) in a.iter_terms() {
            assert!(plist
                .windows(2)
                .all(|w| w[0].doc_ordinal < w[1].doc_ordinal));
        }
    }

    fn corpus() -> impl Strategy<Value = Vec<Vec<u8>>> {
        proptest::collection::vec(proptest::collection::vec(0u8..15, 0..12), 1..20)
    }

    proptest! {
        #[test]
        fn counts_match_brute_force(corpus in corpus()) {
            let docs: Vec<Document> = corpus.iter().enumerate()
                .map(|(i, toks)| doc(&format!("d{i}"), &toks.iter().map(|t| format!("t{t}")).collect::<Vec<_>>().join(" ")))
                .collect();
            let idx = build_index(docs, terms).unwrap();

            let total_tf: u64 = idx.iter_terms().flat_map(|(_, p)| p).map(|p| u64::from(p.term_frequency)).sum();
            let total_len: u64 = idx.stats().doc_lengths.iter().map(|&l| u64::from(l)).sum();
            prop_assert_eq!(total_tf, total_len);

            for t in 0u8..15 {
                let term = format!("t{t}");
                let brute = corpus.iter().filter(|d| d.contains(&t)).count() as u32;
                prop_assert_eq!(idx.doc_frequency(&term), brute);
                for (i, d) in corpus.iter().enumerate() {
                    let tf = d.iter().filter(|&&x| x == t).count() as u32;
                    prop_assert_eq!(idx.term_frequency(&term, i as u32), tf);
                }
            }
        }
    }
}
