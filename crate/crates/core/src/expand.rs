//! Appending linked entity names to queries and passages, verbatim or as
//! MD5 digests.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use md5::{Digest, Md5};

use crate::corpus_io::EntityLink;
use crate::{Error, Result};

/// Lowercase hex MD5 of the UTF-8 bytes of `name`.
pub fn md5_hex(name: &str) -> String {
    let digest = Md5::digest(name.as_bytes());
    let mut hex = String::with_capacity(32);
    for byte in digest.iter() {
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    hex
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionForm {
    Explicit,
    Hashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Single,
    Constant(u32),
    /// One copy per mention occurrence.
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionPolicy {
    pub form: ExpansionForm,
    pub multiplicity: Multiplicity,
}

impl ExpansionPolicy {
    pub fn new(form: ExpansionForm, multiplicity: Multiplicity) -> Result<Self> {
        if multiplicity == Multiplicity::Constant(0) {
            return Err(Error::Config("constant expansion needs k >= 1".into()));
        }
        Ok(ExpansionPolicy { form, multiplicity })
    }

    fn term(&self, name: &str) -> String {
        match self.form {
            ExpansionForm::Explicit => name.to_string(),
            ExpansionForm::Hashed => md5_hex(name),
        }
    }
}

impl Default for ExpansionPolicy {
    fn default() -> Self {
        ExpansionPolicy {
            form: ExpansionForm::Explicit,
            multiplicity: Multiplicity::Single,
        }
    }
}

impl FromStr for ExpansionForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(ExpansionForm::Explicit),
            "hashed" => Ok(ExpansionForm::Hashed),
            other => Err(Error::Config(format!(
                "unknown expansion form {other:?} (expected explicit or hashed)"
            ))),
        }
    }
}

/// Accepts `single`, `weighted` and `constant:K`.
impl FromStr for Multiplicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Multiplicity::Single),
            "weighted" => Ok(Multiplicity::Weighted),
            _ => {
                let k = s
                    .strip_prefix("constant:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "unknown multiplicity {s:?} (expected single, weighted or constant:K with K >= 1)"
                        ))
                    })?;
                Ok(Multiplicity::Constant(k))
            }
        }
    }
}

impl fmt::Display for ExpansionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpansionForm::Explicit => "explicit",
            ExpansionForm::Hashed => "hashed",
        })
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Single => f.write_str("single"),
            Multiplicity::Weighted => f.write_str("weighted"),
            Multiplicity::Constant(k) => write!(f, "constant:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedText {
    pub original: String,
    pub appended_terms: Vec<String>,
    pub rendered: String,
}

/// Appends entity terms at the end of `text` in link order.
///
/// `links` is expected to be deduplicated already; `counts` is only read
/// under [`Multiplicity::Weighted`].
pub fn expand_text(
    text: &str,
    links: &[EntityLink],
    counts: &BTreeMap<String, u32>,
    policy: &ExpansionPolicy,
) -> Result<ExpandedText> {
    let mut appended = Vec::new();
    for link in links {
        let copies = match policy.multiplicity {
            Multiplicity::Single => 1,
            Multiplicity::Constant(k) => k,
            Multiplicity::Weighted => match counts.get(&link.name) {
                Some(&c) if c >= 1 => c,
                _ => {
                    return Err(Error::Contract(format!(
                        "weighted expansion has no mention count for {:?}",
                        link.name
                    )))
                }
            },
        };
        let term = policy.term(&link.name);
        appended.extend(std::iter::repeat_n(term, copies as usize));
    }
    let rendered = if appended.is_empty() {
        text.to_string()
    } else {
        format!("{text} {}", appended.join(" "))
    };
    Ok(ExpandedText {
        original: text.to_string(),
        appended_terms: appended,
        rendered,
    })
}
