//! Entity annotation: the [`Annotator`] contract, a dictionary-based
//! [`Gazetteer`] implementation, and the windowed wrapper that runs any
//! annotator over long passages and merges the per-window output.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{terms, window_ranges, WindowConfig};
use crate::corpus_io::{numbered_lines, open, EntityAnnotationSet, EntityLink};
use crate::registry::Registry;
use crate::{Error, Result};

/// Linker settings kept as provenance next to imported annotations. The
/// toolkit does not run the neural linker, so these are recorded, not used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotatorConfig {
    pub threshold: f64,
    pub num_cand_mentions: u32,
    pub num_cand_entities: u32,
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig {
            threshold: 4.5,
            num_cand_mentions: 10,
            num_cand_entities: 10,
        }
    }
}

impl AnnotatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(Error::Config("annotator threshold must be finite".into()));
        }
        if self.num_cand_mentions == 0 || self.num_cand_entities == 0 {
            return Err(Error::Config("candidate counts must be at least 1".into()));
        }
        Ok(())
    }

    /// Flat `key = value` rendering used for the `.meta` sidecar.
    pub fn write_meta<W: Write>(&self, mut out: W, window: &WindowConfig) -> Result<()> {
        writeln!(out, "threshold = {}", self.threshold)?;
        writeln!(out, "num_cand_mentions = {}", self.num_cand_mentions)?;
        writeln!(out, "num_cand_entities = {}", self.num_cand_entities)?;
        writeln!(out, "window_size = {}", window.window_size)?;
        writeln!(out, "overlap = {}", window.overlap)?;
        out.flush()?;
        Ok(())
    }
}

/// Finds entity links in one segment of lowercase tokens.
pub trait Annotator: Send + Sync {
    fn name(&self) -> &str;

    fn annotate(&self, tokens: &[String]) -> Result<Vec<EntityLink>>;
}

/// Surface-form dictionary matched greedily, longest surface first.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, String>,
    max_surface_tokens: usize,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry. The surface is normalized through the tokenizer, so
    /// "Spinal  Fusion" and "spinal fusion" are the same key.
    pub fn insert(&mut self, surface: &str, name: &str) -> Result<()> {
        let toks = terms(surface);
        if toks.is_empty() {
            return Err(Error::Contract(format!(
                "gazetteer surface {surface:?} has no tokens"
            )));
        }
        if name.is_empty() {
            return Err(Error::Contract("gazetteer entity name is empty".into()));
        }
        self.max_surface_tokens = self.max_surface_tokens.max(toks.len());
        self.entries.insert(toks.join(" "), name.to_string());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `surface<TAB>name` lines; a later duplicate surface replaces
    /// an earlier one.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut g = Gazetteer::new();
        for item in numbered_lines(reader) {
            let (line_no, line) = item?;
            if line.trim().is_empty() {
                continue;
            }
            let Some((surface, name)) = line.split_once('\t') else {
                return Err(Error::Malformed {
                    line: line_no,
                    reason: "expected `surface<TAB>name`".into(),
                });
            };
            g.insert(surface, name.trim())
                .map_err(|e| Error::Malformed {
                    line: line_no,
                    reason: e.to_string(),
                })?;
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(open(path)?)
    }
}

impl Annotator for Gazetteer {
    fn name(&self) -> &str {
        "gazetteer"
    }

    fn annotate(&self, tokens: &[String]) -> Result<Vec<EntityLink>> {
        Ok(annotate_segment(tokens, self))
    }
}

/// Greedy left-to-right longest match. Matched tokens are consumed.
pub fn annotate_segment(tokens: &[String], gazetteer: &Gazetteer) -> Vec<EntityLink> {
    let mut links = Vec::new();
    let mut i = 0;
    'scan: while i < tokens.len() {
        let longest = gazetteer.max_surface_tokens.min(tokens.len() - i);
        for len in (1..=longest).rev() {
            let surface = tokens[i..i + len].join(" ");
            if let Some(name) = gazetteer.entries.get(&surface) {
                links.push(EntityLink::new(surface, name.clone()));
                i += len;
                continue 'scan;
            }
        }
        i += 1;
    }
    links
}

/// Deduplicated links of a whole text, with the per-name mention counts
/// gathered before deduplication.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LongTextAnnotation {
    pub links: Vec<EntityLink>,
    pub counts: BTreeMap<String, u32>,
}

impl LongTextAnnotation {
    pub fn into_annotation_set(self, id: impl Into<String>) -> EntityAnnotationSet {
        EntityAnnotationSet {
            id: id.into(),
            links: self.links,
            counts: self.counts,
        }
    }
}

/// Tokenizes, windows, annotates every window, then keeps the first link of
/// each distinct entity name (case-sensitive) in window order.
pub fn annotate_long_text(
    text: &str,
    annotator: &dyn Annotator,
    cfg: &WindowConfig,
) -> Result<LongTextAnnotation> {
    let tokens = terms(text);
    let mut out = LongTextAnnotation::default();
    let mut seen = HashSet::new();
    for (window, (start, end)) in window_ranges(tokens.len(), cfg)?.into_iter().enumerate() {
        let links = annotator
            .annotate(&tokens[start..end])
            .map_err(|e| Error::Annotator {
                window,
                source: Box::new(e),
            })?;
        for link in links {
            *out.counts.entry(link.name.clone()).or_default() += 1;
            if seen.insert(link.name.clone()) {
                out.links.push(link);
            }
        }
    }
    Ok(out)
}

/// What an annotator factory may draw on.
#[derive(Debug, Clone, Default)]
pub struct AnnotatorSpec {
    pub resource: Option<PathBuf>,
    pub config: AnnotatorConfig,
}

pub type AnnotatorFactory = fn(&AnnotatorSpec) -> Result<Box<dyn Annotator>>;

pub fn annotators() -> Registry<AnnotatorFactory> {
    let mut r: Registry<AnnotatorFactory> = Registry::new("annotator");
    r.register("gazetteer", |spec| {
        spec.config.validate()?;
        let path = spec
            .resource
            .as_deref()
            .ok_or_else(|| Error::Config("gazetteer annotator needs a gazetteer file".into()))?;
        Ok(Box::new(Gazetteer::load(path)?))
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        terms(s)
    }

    fn gaz(entries: &[(&str, &str)]) -> Gazetteer {
        let mut g = Gazetteer::new();
        for (s, n) in entries {
            g.insert(s, n).unwrap();
        }
        g
    }

    #[test]
    fn eagles_query() {
        let g = gaz(&[("eagles", "Eagles (band)")]);
        let links = annotate_segment(&toks("who are in the eagles"), &g);
        assert_eq!(links, vec![EntityLink::new("eagles", "Eagles (band)")]);
    }

    #[test]
    fn empty_gazetteer_finds_nothing() {
        assert!(annotate_segment(&toks("who are in the eagles"), &Gazetteer::new()).is_empty());
    }

    #[test]
    fn longest_match_wins() {
        let g = gaz(&[("fusion", "B"), ("spinal fusion", "A")]);
        let links = annotate_segment(&toks("spinal fusion"), &g);
        assert_eq!(links, vec![EntityLink::new("spinal fusion", "A")]);
    }

    #[test]
    fn matched_tokens_are_consumed() {
        let g = gaz(&[
            ("new york", "New York City"),
            ("york times", "The New York Times"),
        ]);
        let links = annotate_segment(&toks("new york times"), &g);
        assert_eq!(links, vec![EntityLink::new("new york", "New York City")]);
    }

    #[test]
    fn gazetteer_file_parsing() {
        let g = Gazetteer::read(
            "Eagles\tEagles (band)\r\nSpinal  Fusion\tSpinal fusion\n\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        let links = annotate_segment(&toks("a spinal fusion"), &g);
        assert_eq!(links[0].name, "Spinal fusion");
        assert!(Gazetteer::read("no tab\n".as_bytes()).is_err());
        assert!(Gazetteer::read("!!\tX\n".as_bytes()).is_err());
    }

    #[test]
    fn long_text_dedups_across_windows() {
        // token 100 sits in windows [0,128) and [86,214)
        let mut words = vec!["w"; 300];
        words[100] = "eagle";
        let text = words.join(" ");
        let g = gaz(&[("eagle", "Eagle")]);
        let out = annotate_long_text(&text, &g, &WindowConfig::default()).unwrap();
        assert_eq!(out.links, vec![EntityLink::new("eagle", "Eagle")]);
        assert_eq!(out.counts["Eagle"], 2);
    }

    #[test]
    fn short_text_equals_single_segment() {
        let g = gaz(&[("eagle", "Eagle"), ("dream", "Dream")]);
        let text = "The eagle in a dream, an eagle";
        let out = annotate_long_text(text, &g, &WindowConfig::default()).unwrap();
        let raw = annotate_segment(&toks(text), &g);
        assert_eq!(raw.len(), 3);
        let names: Vec<_> = out.links.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, ["Eagle", "Dream"]);
        assert_eq!(out.counts["Eagle"], 2);
    }

    #[test]
    fn annotator_returning_nothing() {
        let out = annotate_long_text(
            &"x ".repeat(500),
            &Gazetteer::new(),
            &WindowConfig::default(),
        )
        .unwrap();
        assert!(out.links.is_empty());
        assert!(out.counts.is_empty());
    }

    struct FailsOn(usize, std::sync::atomic::AtomicUsize);

    impl Annotator for FailsOn {
        fn name(&self) -> &str {
            "fails"
        }

        fn annotate(&self, _tokens: &[String]) -> Result<Vec<EntityLink>> {
            let n = self.1.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            if n == self.0 {
                Err(Error::Contract("boom".into()))
            } else {
                Ok(vec![])
            }
        }
    }

    #[test]
    fn annotator_failure_carries_window() {
        let a = FailsOn(1, Default::default());
        match annotate_long_text(&"x ".repeat(300), &a, &WindowConfig::default()) {
            Err(Error::Annotator { window, .. }) => assert_eq!(window, 1),
            other => panic!("expected annotator error, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_output() {
        let g = gaz(&[
            ("eagle", "Eagle"),
            ("dream", "Dream"),
            ("midwife", "Midwife"),
        ]);
        let text = "eagle dream midwife ".repeat(120);
        let a = annotate_long_text(&text, &g, &WindowConfig::default()).unwrap();
        let b = annotate_long_text(&text, &g, &WindowConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn registry_builds_gazetteer() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "eagles\tEagles (band)\n").unwrap();
        let spec = AnnotatorSpec {
            resource: Some(path),
            config: AnnotatorConfig::default(),
        };
        let a = (annotators().get("gazetteer").unwrap())(&spec).unwrap();
        assert_eq!(a.annotate(&toks("the eagles")).unwrap().len(), 1);
        assert!(annotators().get("elq").is_err());
    }
}
