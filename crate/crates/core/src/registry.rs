use std::collections::BTreeMap;

use crate::{Error, Result};

/// Name-keyed table of strategy constructors.
///
/// `F` is the factory signature for one family (metrics, retrievers, ...).
pub struct Registry<F> {
    kind: &'static str,
    entries: BTreeMap<&'static str, F>,
}

impl<F> Registry<F> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: F) -> &mut Self {
        self.entries.insert(name, factory);
        self
    }

    pub fn get(&self, name: &str) -> Result<&F> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_lists_available() {
        let mut r: Registry<fn() -> u8> = Registry::new("widget");
        r.register("a", || 1).register("b", || 2);
        assert_eq!((r.get("b").unwrap())(), 2);
        let err = r.get("c").err().unwrap().to_string();
        assert!(err.contains("widget") && err.contains("a, b"), "{err}");
    }
}
