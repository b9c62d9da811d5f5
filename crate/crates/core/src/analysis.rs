//! Tokenization and the sliding-window segmentation that lets a linker
//! built for short questions run over whole passages.

use crate::{Error, Result};

/// A token plus its byte range in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSpan {
    pub token: String,
    pub start_offset: usize,
    pub end_offset: usize,
}

/// Splits on every non-alphanumeric character and lowercases ASCII letters.
/// Non-ASCII letters are kept as they are.
pub fn tokenize(text: &str) -> Vec<TokenSpan> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                spans.push(span(text, s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push(span(text, s, text.len()));
    }
    spans
}

fn span(text: &str, start: usize, end: usize) -> TokenSpan {
    TokenSpan {
        token: text[start..end].to_ascii_lowercase(),
        start_offset: start,
        end_offset: end,
    }
}

/// Tokens only, without offsets.
pub fn terms(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.token).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    pub window_size: usize,
    pub overlap: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window_size: 128,
            overlap: 42,
        }
    }
}

impl WindowConfig {
    pub fn new(window_size: usize, overlap: usize) -> Result<Self> {
        let cfg = WindowConfig {
            window_size,
            overlap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.overlap == 0 || self.overlap >= self.window_size {
            return Err(Error::Config(format!(
                "window overlap must satisfy 0 < overlap < window_size (got overlap {} with window {})",
                self.overlap, self.window_size
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> usize {
        self.window_size - self.overlap
    }
}

/// Index ranges `[start, end)` of the windows over `token_count` tokens.
///
/// Windows start at 0 and advance by `window_size - overlap`; the last one is
/// truncated at the final token instead of being padded.
pub fn window_ranges(token_count: usize, cfg: &WindowConfig) -> Result<Vec<(usize, usize)>> {
    cfg.validate()?;
    let mut ranges = Vec::new();
    let mut start = 0;
    while start < token_count {
        let end = (start + cfg.window_size).min(token_count);
        ranges.push((start, end));
        if end == token_count {
            break;
        }
        start += cfg.step();
    }
    Ok(ranges)
}

/// Slices `tokens` into overlapping windows, each tagged with its start index.
pub fn windows<'a, T>(tokens: &'a [T], cfg: &WindowConfig) -> Result<Vec<(usize, &'a [T])>> {
    Ok(window_ranges(tokens.len(), cfg)?
        .into_iter()
        .map(|(s, e)| (s, &tokens[s..e]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entity_name_tokens() {
        assert_eq!(terms("Eagles (band)"), ["eagles", "band"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ,.; ").is_empty());
    }

    #[test]
    fn md5_digest_is_one_token() {
        let t = terms("457e38cd8f6a6c4145a2038dc309f9e8");
        assert_eq!(t, ["457e38cd8f6a6c4145a2038dc309f9e8"]);
    }

    #[test]
    fn offsets_point_into_source() {
        let text = "Who are in the Eagles?";
        for s in tokenize(text) {
            assert_eq!(
                text[s.start_offset..s.end_offset].to_ascii_lowercase(),
                s.token
            );
        }
    }

    #[test]
    fn non_ascii_kept() {
        assert_eq!(terms("Öl-Straße café"), ["Öl", "straße", "café"]);
    }

    #[test]
    fn one_full_window() {
        let r = window_ranges(128, &WindowConfig::default()).unwrap();
        assert_eq!(r, [(0, 128)]);
    }

    #[test]
    fn three_hundred_tokens() {
        let r = window_ranges(300, &WindowConfig::default()).unwrap();
        assert_eq!(r, [(0, 128), (86, 214), (172, 300)]);
    }

    #[test]
    fn truncated_final_window() {
        let r = window_ranges(200, &WindowConfig::default()).unwrap();
        assert_eq!(r, [(0, 128), (86, 200)]);
    }

    #[test]
    fn zero_tokens_zero_windows() {
        assert!(window_ranges(0, &WindowConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn invalid_configs() {
        assert!(WindowConfig::new(128, 0).is_err());
        assert!(WindowConfig::new(128, 128).is_err());
        assert!(WindowConfig::new(10, 3).is_ok());
        let bad = WindowConfig {
            window_size: 4,
            overlap: 9,
        };
        assert!(window_ranges(10, &bad).is_err());
    }

    #[test]
    fn slices_follow_ranges() {
        let toks: Vec<usize> = (0..200).collect();
        let w = windows(&toks, &WindowConfig::default()).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[1].0, 86);
        assert_eq!(w[1].1.first(), Some(&86));
        assert_eq!(w[1].1.last(), Some(&199));
    }

    proptest! {
        #[test]
        fn tokenize_is_a_fixpoint(text in "\\PC{0,80}") {
            let once = terms(&text);
            let again = terms(&once.join(" "));
            prop_assert_eq!(once, again);
        }

        #[test]
        fn windows_cover_with_exact_overlap(n in 1usize..3000, size in 2usize..200, overlap_frac in 0.01f64..0.99) {
            let overlap = ((size as f64 * overlap_frac) as usize).clamp(1, size - 1);
            let cfg = WindowConfig::new(size, overlap).unwrap();
            let r = window_ranges(n, &cfg).unwrap();
            prop_assert_eq!(r[0].0, 0);
            prop_assert_eq!(r.last().unwrap().1, n);
            for pair in r.windows(2) {
                prop_assert_eq!(pair[1].0 - pair[0].0, cfg.step());
                prop_assert_eq!(pair[0].1 - pair[0].0, size);
                prop_assert_eq!(pair[0].1 - pair[1].0, overlap);
            }
        }
    }
}
