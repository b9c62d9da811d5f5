use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{numbered_lines, open};
use crate::{Error, Result};

/// One detected entity: the surface span and the knowledge-base entry it
/// resolves to.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityLink {
    pub mention: String,
    pub name: String,
    pub score: Option<f64>,
}

impl EntityLink {
    pub fn new(mention: impl Into<String>, name: impl Into<String>) -> Self {
        EntityLink {
            mention: mention.into(),
            name: name.into(),
            score: None,
        }
    }
}

/// Links found in one text unit, in detection order.
///
/// `counts` holds explicit mention counts carried by the file (written by
/// the long-text annotator after deduplication). Names without an explicit
/// count fall back to their number of occurrences in `links`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntityAnnotationSet {
    pub id: String,
    pub links: Vec<EntityLink>,
    pub counts: BTreeMap<String, u32>,
}

impl EntityAnnotationSet {
    pub fn new(id: impl Into<String>) -> Self {
        EntityAnnotationSet {
            id: id.into(),
            ..Default::default()
        }
    }

    /// Links with repeated names removed, first occurrence kept.
    pub fn unique_links(&self) -> Vec<EntityLink> {
        let mut seen = std::collections::HashSet::new();
        self.links
            .iter()
            .filter(|l| seen.insert(l.name.as_str()))
            .cloned()
            .collect()
    }

    /// Mention count per entity name.
    pub fn mention_counts(&self) -> BTreeMap<String, u32> {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for link in &self.links {
            if !self.counts.contains_key(&link.name) {
                *counts.entry(link.name.clone()).or_default() += 1;
            }
        }
        counts.extend(self.counts.iter().map(|(k, v)| (k.clone(), *v)));
        counts
    }
}

pub type AnnotationMap = BTreeMap<String, EntityAnnotationSet>;

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    entities: Vec<EntityRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntityRecord {
    #[serde(default)]
    mention: String,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<u32>,
}

/// Reads annotation JSON lines. Repeated ids are merged: links concatenated
/// in file order, explicit counts summed.
pub fn read_annotations<R: BufRead>(reader: R) -> Result<AnnotationMap> {
    let mut map = AnnotationMap::new();
    for item in numbered_lines(reader) {
        let (line_no, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        let record: Record = serde_json::from_value(value).map_err(|e| Error::Schema {
            line: line_no,
            reason: e.to_string(),
        })?;
        let set = map
            .entry(record.id.clone())
            .or_insert_with(|| EntityAnnotationSet::new(record.id));
        // explicit counts are per record; sum them across repeated records
        let mut record_counts: BTreeMap<String, u32> = BTreeMap::new();
        for e in record.entities {
            if e.name.is_empty() {
                return Err(Error::Schema {
                    line: line_no,
                    reason: "entity name is empty".into(),
                });
            }
            if let Some(c) = e.count {
                record_counts.insert(e.name.clone(), c);
            }
            set.links.push(EntityLink {
                mention: e.mention,
                name: e.name,
                score: e.score,
            });
        }
        for (name, c) in record_counts {
            *set.counts.entry(name).or_default() += c;
        }
    }
    Ok(map)
}

pub fn load_annotations(path: &Path) -> Result<AnnotationMap> {
    read_annotations(open(path)?)
}

/// Writes one JSON line per annotation set, in map order.
pub fn write_annotations<'a, W, I>(mut out: W, sets: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a EntityAnnotationSet>,
{
    for set in sets {
        let record = Record {
            id: set.id.clone(),
            entities: set
                .links
                .iter()
                .map(|l| EntityRecord {
                    mention: l.mention.clone(),
                    name: l.name.clone(),
                    score: l.score,
                    count: set.counts.get(&l.name).copied(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eagles_query_link() {
        let map = read_annotations(
            r#"{"id":"q1","entities":[{"mention":"eagles","name":"Eagles (band)"}]}"#.as_bytes(),
        )
        .unwrap();
        let q1 = &map["q1"];
        assert_eq!(q1.links, vec![EntityLink::new("eagles", "Eagles (band)")]);
    }

    #[test]
    fn empty_entity_list() {
        let map = read_annotations(r#"{"id":"d1","entities":[]}"#.as_bytes()).unwrap();
        assert!(map["d1"].links.is_empty());
    }

    #[test]
    fn repeated_id_concatenates() {
        let input = concat!(
            r#"{"id":"d1","entities":[{"name":"A","score":4.9}]}"#,
            "\n",
            r#"{"id":"d2","entities":[{"name":"C"}]}"#,
            "\n",
            r#"{"id":"d1","entities":[{"name":"B"},{"name":"A"}]}"#,
            "\n"
        );
        let map = read_annotations(input.as_bytes()).unwrap();
        let names: Vec<_> = map["d1"].links.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, ["A", "B", "A"]);
        assert_eq!(map["d1"].links[0].score, Some(4.9));
        assert_eq!(map["d1"].mention_counts()["A"], 2);
        assert_eq!(map["d1"].unique_links().len(), 2);
    }

    #[test]
    fn malformed_json_reports_line() {
        let input = "{\"id\":\"a\",\"entities\":[]}\n{not json\n";
        assert!(matches!(
            read_annotations(input.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_name_is_schema_error() {
        let input = r#"{"id":"a","entities":[{"mention":"x"}]}"#;
        assert!(matches!(
            read_annotations(input.as_bytes()),
            Err(Error::Schema { line: 1, .. })
        ));
    }

    #[test]
    fn explicit_counts_override_occurrences() {
        let input = r#"{"id":"a","entities":[{"name":"X","count":3},{"name":"Y"}]}"#;
        let map = read_annotations(input.as_bytes()).unwrap();
        let counts = map["a"].mention_counts();
        assert_eq!(counts["X"], 3);
        assert_eq!(counts["Y"], 1);
    }
}
