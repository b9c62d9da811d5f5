//! Entity-expanded sparse retrieval toolkit.
//!
//! The pipeline this crate supports:
//!
//! 1. [`annotate`] texts with entity links (a gazetteer stand-in, or links
//!    imported from an external linker through [`corpus_io`]),
//! 2. [`expand`] queries and passages with the linked entity names, either
//!    verbatim or MD5-hashed,
//! 3. build an inverted [`index`] and retrieve with BM25 ([`search`]),
//! 4. combine the resulting [`runs`] with reciprocal rank fusion, an oracle
//!    selector or externally supplied per-query run assignments,
//! 5. [`eval`]uate runs: recall curves, MRR, (N)DCG, paired t-tests and
//!    qrels derived from reranked run pools.
//!
//! Interchangeable algorithm families (metrics, retrievers, run combiners,
//! annotators) sit behind traits and are looked up by name in registries so
//! the command line can select them at runtime.

pub mod analysis;
pub mod annotate;
pub mod corpus_io;
pub mod error;
pub mod eval;
pub mod expand;
pub mod index;
pub mod registry;
pub mod runs;
pub mod search;

pub use error::{Error, Result};

/// Toolkit version reported by the command line.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
