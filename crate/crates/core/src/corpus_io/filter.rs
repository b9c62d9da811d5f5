use std::collections::HashSet;

use super::{Qrels, Query};
use crate::runs::Run;
use crate::{Error, Result};

/// Output of [`filter_by_ids`].
#[derive(Debug, Clone)]
pub struct Filtered {
    pub queries: Vec<Query>,
    pub qrels: Qrels,
    pub runs: Vec<Run>,
    /// Requested ids found in none of the inputs.
    pub missing: Vec<String>,
}

/// Restricts queries, qrels and runs to a query-id subset (e.g. one of the
/// hard-query lists). Input order is preserved.
pub fn filter_by_ids(
    queries: &[Query],
    qrels: &Qrels,
    runs: &[Run],
    ids: &HashSet<String>,
) -> Result<Filtered> {
    if ids.is_empty() {
        return Err(Error::Precondition("id set is empty".into()));
    }
    let queries: Vec<Query> = queries
        .iter()
        .filter(|q| ids.contains(&q.id))
        .cloned()
        .collect();
    let mut kept_qrels = qrels.clone();
    kept_qrels.retain_queries(|q| ids.contains(q));
    let runs: Vec<Run> = runs
        .iter()
        .map(|r| r.filter_queries(|q| ids.contains(q)))
        .collect();

    let mut missing: Vec<String> = ids
        .iter()
        .filter(|id| {
            !queries.iter().any(|q| &q.id == *id)
                && !kept_qrels.contains_query(id)
                && !runs.iter().any(|r| r.contains_query(id))
        })
        .cloned()
        .collect();
    missing.sort();
    if !missing.is_empty() {
        log::warn!(
            "{} requested query ids not found in any input",
            missing.len()
        );
    }
    Ok(Filtered {
        queries,
        qrels: kept_qrels,
        runs,
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(id: &str) -> Query {
        Query {
            id: id.into(),
            text: format!("text {id}"),
        }
    }

    fn fixture() -> (Vec<Query>, Qrels, Vec<Run>) {
        let queries = vec![q("3"), q("1"), q("2")];
        let mut qrels = Qrels::new();
        qrels.insert("1", "d1", 1);
        qrels.insert("2", "d2", 1);
        let mut run = Run::new("bm25");
        run.set_ranking("1", vec![("d1".into(), 2.0)]);
        run.set_ranking("3", vec![("d3".into(), 1.0)]);
        (queries, qrels, vec![run])
    }

    #[test]
    fn keeps_order_and_subset() {
        let (queries, qrels, runs) = fixture();
        let ids: HashSet<String> = ["1", "3"].iter().map(|s| s.to_string()).collect();
        let f = filter_by_ids(&queries, &qrels, &runs, &ids).unwrap();
        let got: Vec<_> = f.queries.iter().map(|q| q.id.as_str()).collect();
        assert_eq!(got, ["3", "1"]);
        assert_eq!(f.qrels.num_queries(), 1);
        assert_eq!(f.runs[0].num_queries(), 2);
        assert!(f.missing.is_empty());
    }

    #[test]
    fn full_id_set_is_identity() {
        let (queries, qrels, runs) = fixture();
        let ids: HashSet<String> = ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
        let f = filter_by_ids(&queries, &qrels, &runs, &ids).unwrap();
        assert_eq!(f.queries, queries);
        assert_eq!(f.qrels, qrels);
        assert_eq!(f.runs, runs);
    }

    #[test]
    fn disjoint_ids_give_empty_outputs() {
        let (queries, qrels, runs) = fixture();
        let ids: HashSet<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let f = filter_by_ids(&queries, &qrels, &runs, &ids).unwrap();
        assert!(f.queries.is_empty());
        assert!(f.qrels.is_empty());
        assert_eq!(f.runs[0].num_queries(), 0);
        assert_eq!(f.missing, ["x", "y"]);
    }

    #[test]
    fn empty_id_set_rejected() {
        let (queries, qrels, runs) = fixture();
        assert!(filter_by_ids(&queries, &qrels, &runs, &HashSet::new()).is_err());
    }
}
