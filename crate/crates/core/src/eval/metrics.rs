//! Ranking metrics. Each metric scores one query's ranking against that
//! query's judgments; [`super::evaluate`] handles averaging.

use std::collections::BTreeMap;

use crate::registry::Registry;
use crate::{Error, Result};

pub trait Metric: Send + Sync {
    /// Canonical name, e.g. `recall@1000`.
    fn name(&self) -> String;

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64;
}

fn grade(judged: &BTreeMap<String, u32>, doc: &str) -> u32 {
    judged.get(doc).copied().unwrap_or(0)
}

fn num_relevant(judged: &BTreeMap<String, u32>) -> usize {
    judged.values().filter(|&&g| g >= 1).count()
}

fn relevant_in_top(ranking: &[(String, f64)], judged: &BTreeMap<String, u32>, k: usize) -> usize {
    ranking
        .iter()
        .take(k)
        .filter(|(d, _)| grade(judged, d) >= 1)
        .count()
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub struct Recall {
    pub k: usize,
}

impl Metric for Recall {
    fn name(&self) -> String {
        format!("recall@{}", self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        relevant_in_top(ranking, judged, self.k) as f64 / num_relevant(judged) as f64
    }
}

/// Precision with `k` as the denominator, however short the ranking.
pub struct Precision {
    pub k: usize,
}

impl Metric for Precision {
    fn name(&self) -> String {
        format!("P@{}", self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        relevant_in_top(ranking, judged, self.k) as f64 / self.k as f64
    }
}

pub struct FMeasure {
    pub k: usize,
}

impl Metric for FMeasure {
    fn name(&self) -> String {
        format!("f1@{}", self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        f_measure(
            Precision { k: self.k }.score(ranking, judged),
            Recall { k: self.k }.score(ranking, judged),
        )
    }
}

/// Average precision: sum of P@i at every relevant rank i, over the number
/// of relevant documents. `k` limits the ranks considered.
pub struct AveragePrecision {
    pub k: Option<usize>,
}

impl Metric for AveragePrecision {
    fn name(&self) -> String {
        match self.k {
            Some(k) => format!("map@{k}"),
            None => "map".into(),
        }
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        let depth = self.k.unwrap_or(usize::MAX);
        let mut hits = 0usize;
        let mut sum = 0.0;
        for (i, (d, _)) in ranking.iter().take(depth).enumerate() {
            if grade(judged, d) >= 1 {
                hits += 1;
                sum += hits as f64 / (i + 1) as f64;
            }
        }
        sum / num_relevant(judged) as f64
    }
}

pub struct ReciprocalRank {
    pub k: usize,
}

impl Metric for ReciprocalRank {
    fn name(&self) -> String {
        format!("mrr@{}", self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        ranking
            .iter()
            .take(self.k)
            .position(|(d, _)| grade(judged, d) >= 1)
            .map_or(0.0, |p| 1.0 / (p + 1) as f64)
    }
}

/// Gain function for discounted cumulative gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcgVariant {
    /// `rel / log2(i + 1)`
    LogDiscount,
    /// `(2^rel - 1) / log2(i + 1)`
    ExpGain,
}

impl DcgVariant {
    fn gain(self, rel: u32) -> f64 {
        match self {
            DcgVariant::LogDiscount => f64::from(rel),
            DcgVariant::ExpGain => 2f64.powi(rel as i32) - 1.0,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            DcgVariant::LogDiscount => "",
            DcgVariant::ExpGain => "_exp",
        }
    }
}

fn dcg_of_grades(grades: impl Iterator<Item = u32>, variant: DcgVariant) -> f64 {
    grades
        .enumerate()
        .map(|(i, rel)| variant.gain(rel) / ((i + 2) as f64).log2())
        .sum()
}

/// Cumulative gain: plain sum of grades in the top `k`.
pub struct CumulativeGain {
    pub k: usize,
}

impl Metric for CumulativeGain {
    fn name(&self) -> String {
        format!("cg@{}", self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        ranking
            .iter()
            .take(self.k)
            .map(|(d, _)| f64::from(grade(judged, d)))
            .sum()
    }
}

pub struct Dcg {
    pub k: usize,
    pub variant: DcgVariant,
}

impl Metric for Dcg {
    fn name(&self) -> String {
        format!("dcg{}@{}", self.variant.suffix(), self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        dcg_of_grades(
            ranking.iter().take(self.k).map(|(d, _)| grade(judged, d)),
            self.variant,
        )
    }
}

pub struct Ndcg {
    pub k: usize,
    pub variant: DcgVariant,
}

impl Metric for Ndcg {
    fn name(&self) -> String {
        format!("ndcg{}@{}", self.variant.suffix(), self.k)
    }

    fn score(&self, ranking: &[(String, f64)], judged: &BTreeMap<String, u32>) -> f64 {
        let mut ideal: Vec<u32> = judged.values().copied().filter(|&g| g > 0).collect();
        ideal.sort_unstable_by(|a, b| b.cmp(a));
        let idcg = dcg_of_grades(ideal.into_iter().take(self.k), self.variant);
        if idcg == 0.0 {
            return 0.0;
        }
        Dcg {
            k: self.k,
            variant: self.variant,
        }
        .score(ranking, judged)
            / idcg
    }
}

pub type MetricFactory = fn(Option<usize>) -> Result<Box<dyn Metric>>;

fn cutoff(k: Option<usize>, default: usize) -> Result<usize> {
    match k.unwrap_or(default) {
        0 => Err(Error::Config("metric cutoff must be at least 1".into())),
        k => Ok(k),
    }
}

/// All metrics by base name; the cutoff follows an `@` (see [`parse_metric`]).
pub fn metrics() -> Registry<MetricFactory> {
    let mut r: Registry<MetricFactory> = Registry::new("metric");
    r.register("recall", |k| {
        Ok(Box::new(Recall {
            k: cutoff(k, 1000)?,
        }))
    });
    r.register("P", |k| Ok(Box::new(Precision { k: cutoff(k, 10)? })));
    r.register("f1", |k| Ok(Box::new(FMeasure { k: cutoff(k, 10)? })));
    r.register("map", |k| {
        Ok(Box::new(AveragePrecision {
            k: k.map(|k| cutoff(Some(k), 1)).transpose()?,
        }))
    });
    r.register("mrr", |k| {
        Ok(Box::new(ReciprocalRank { k: cutoff(k, 10)? }))
    });
    r.register("cg", |k| Ok(Box::new(CumulativeGain { k: cutoff(k, 10)? })));
    r.register("dcg", |k| {
        Ok(Box::new(Dcg {
            k: cutoff(k, 10)?,
            variant: DcgVariant::LogDiscount,
        }))
    });
    r.register("dcg_exp", |k| {
        Ok(Box::new(Dcg {
            k: cutoff(k, 10)?,
            variant: DcgVariant::ExpGain,
        }))
    });
    r.register("ndcg", |k| {
        Ok(Box::new(Ndcg {
            k: cutoff(k, 10)?,
            variant: DcgVariant::LogDiscount,
        }))
    });
    r.register("ndcg_exp", |k| {
        Ok(Box::new(Ndcg {
            k: cutoff(k, 10)?,
            variant: DcgVariant::ExpGain,
        }))
    });
    r
}

/// Parses names such as `recall@1000`, `P@10`, `map`, `mrr@10`, `ndcg_exp@5`.
pub fn parse_metric(spec: &str) -> Result<Box<dyn Metric>> {
    let (base, k) = match spec.split_once('@') {
        Some((base, k)) => {
            let k = k
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad cutoff in metric {spec:?}")))?;
            (base, Some(k))
        }
        None => (spec, None),
    };
    let base = match base {
        "precision" => "P",
        "ap" => "map",
        "recip_rank" | "rr" => "mrr",
        other => other,
    };
    (metrics().get(base)?)(k)
}
