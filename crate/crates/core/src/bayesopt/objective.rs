use crate::error::Result;
use crate::evaluation::{evaluate_run, Qrels, RunFile};
use crate::hyperspace::ConfigPoint;
use crate::index::IndexSet;
use crate::retrieval::{search_topics, QueryField, Topic};
use crate::scalar::Scalar;

/// A black-box function to maximize.
pub trait Objective<F> {
    fn evaluate(&self, point: &ConfigPoint<F>) -> Result<F>;
}

impl<F, T> Objective<F> for T
where
    T: Fn(&ConfigPoint<F>) -> Result<F>,
{
    fn evaluate(&self, point: &ConfigPoint<F>) -> Result<F> {
        self(point)
    }
}

/// MAP of `point` on a topic set: picks the index variant named by the
/// point, ranks every topic, and evaluates against `qrels`.
pub fn objective_map<F: Scalar>(
    indexes: &IndexSet,
    topics: &[Topic],
    field: QueryField,
    qrels: &Qrels,
    point: &ConfigPoint<F>,
    depth: usize,
) -> Result<F> {
    let index = indexes.get(point.variant());
    let rankings = search_topics(index, topics, field, &point.retrieval, depth)?;
    let run = RunFile::from_rankings("objective", rankings);
    Ok(evaluate_run(&run, qrels)?.means.ap)
}

/// [`objective_map`] with its inputs bound.
pub struct RetrievalObjective<'a> {
    pub indexes: &'a IndexSet,
    pub topics: &'a [Topic],
    pub field: QueryField,
    pub qrels: &'a Qrels,
    pub depth: usize,
}

impl<F: Scalar> Objective<F> for RetrievalObjective<'_> {
    fn evaluate(&self, point: &ConfigPoint<F>) -> Result<F> {
        objective_map(self.indexes, self.topics, self.field, self.qrels, point, self.depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::parse_qrels;
    use crate::index::Document;
    use crate::retrieval::{parse_topics, RetrievalModel};

    fn setup() -> (IndexSet, Vec<Topic>, Qrels) {
        let docs = vec![
            Document::new("d1", "the bear ate the salmon"),
            Document::new("d2", "a bear cub in the river"),
            Document::new("d3", "bears and rivers and salmon"),
            Document::new("d4", "stock market report"),
        ];
        let topics = parse_topics("1\tbear\n2\tstock market\n").unwrap();
        let qrels = parse_qrels("1 0 d1 1\n1 0 d3 1\n2 0 d4 1\n").unwrap();
        (IndexSet::build(&docs).unwrap(), topics, qrels)
    }

    #[test]
    fn map_on_small_collection() {
        let (idx, topics, qrels) = setup();
        let objective = RetrievalObjective {
            indexes: &idx,
            topics: &topics,
            field: QueryField::Title,
            qrels: &qrels,
            depth: 1000,
        };
        // Without stemming "bear" misses d3: topic 1 AP = (1/2)(1/1) at best.
        let mut p = ConfigPoint::<f64>::default();
        p.retrieval.model = RetrievalModel::Bm25;
        let plain = objective.evaluate(&p).unwrap();
        p.stemmer = true;
        let stemmed = objective.evaluate(&p).unwrap();
        assert!(stemmed > plain);
        assert!(stemmed <= 1.0 && plain >= 0.0);
    }

    #[test]
    fn inactive_values_do_not_matter() {
        let (idx, topics, qrels) = setup();
        let a = ConfigPoint::<f64> {
            stemmer: true,
            ..Default::default()
        };
        let mut b = a;
        b.retrieval.bm25_k1 = 9.5;
        b.retrieval.fb_docs = 2;
        let f = |p| objective_map(&idx, &topics, QueryField::Title, &qrels, p, 1000).unwrap();
        assert_eq!(f(&a), f(&b));
    }
}
