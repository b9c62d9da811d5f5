use std::io::Write;

use super::{evaluate, Recall};
use crate::corpus_io::Qrels;
use crate::runs::Run;
use crate::{Error, Result};

/// Cutoffs of the published recall-curve tables.
pub const DEFAULT_CUTOFFS: [usize; 15] = [
    0, 50, 55, 60, 75, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000,
];

#[derive(Debug, Clone, PartialEq)]
pub struct RecallCurve {
    pub cutoffs: Vec<usize>,
    pub values: Vec<f64>,
}

/// Mean recall at each cutoff; cutoff 0 is 0 by definition.
pub fn recall_curve(run: &Run, qrels: &Qrels, cutoffs: &[usize]) -> Result<RecallCurve> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "recall cutoffs must be strictly ascending".into(),
        ));
    }
    let values = cutoffs
        .iter()
        .map(|&k| {
            if k == 0 {
                0.0
            } else {
                evaluate(run, qrels, &Recall { k }).mean
            }
        })
        .collect();
    Ok(RecallCurve {
        cutoffs: cutoffs.to_vec(),
        values,
    })
}

/// Table with one column per run and one row per cutoff:
///
/// ```text
/// recall  bm25    rrf-...
/// 0       0.0000  0.0000
/// 50      0.5923  0.6125
/// ```
pub fn write_curve_table<W: Write>(mut out: W, curves: &[(String, RecallCurve)]) -> Result<()> {
    let Some((_, first)) = curves.first() else {
        return Ok(());
    };
    if curves.iter().any(|(_, c)| c.cutoffs != first.cutoffs) {
        return Err(Error::Contract("curves use different cutoffs".into()));
    }
    write!(out, "recall")?;
    for (name, _) in curves {
        write!(out, "\t{name}")?;
    }
    writeln!(out)?;
    for (row, k) in first.cutoffs.iter().enumerate() {
        write!(out, "{k}")?;
        for (_, c) in curves {
            write!(out, "\t{:.4}", c.values[row])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
