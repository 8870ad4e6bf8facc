use std::fmt::Write as _;

use super::{evaluate_run, Measure, Qrels, RunFile};
use crate::error::Result;
use crate::retrieval::TopicId;
use crate::scalar::Scalar;

/// Per-topic differences `measure(run) - measure(baseline)`, one column per run.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable<F> {
    pub measure: Measure,
    pub tags: Vec<String>,
    pub rows: Vec<(TopicId, Vec<F>)>,
}

pub fn per_topic_delta<F: Scalar>(
    runs: &[RunFile<F>],
    baseline: &RunFile<F>,
    qrels: &Qrels,
    measure: Measure,
) -> Result<DeltaTable<F>> {
    let base = evaluate_run(baseline, qrels)?;
    let reports = runs.iter().map(|r| evaluate_run(r, qrels)).collect::<Result<Vec<_>>>()?;
    let rows = base
        .per_topic
        .iter()
        .map(|(topic, b)| {
            let deltas = reports
                .iter()
                .map(|r| r.per_topic[topic].get(measure) - b.get(measure))
                .collect();
            (topic.clone(), deltas)
        })
        .collect();
    Ok(DeltaTable {
        measure,
        tags: runs.iter().map(|r| r.tag.clone()).collect(),
        rows,
    })
}

impl<F: Scalar> DeltaTable<F> {
    /// Header `topic<TAB>tag...`, then `topic<TAB>delta...` rows, four decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("topic");
        for tag in &self.tags {
            out.push('\t');
            out.push_str(tag);
        }
        out.push('\n');
        for (topic, deltas) in &self.rows {
            out.push_str(topic.as_str());
            for d in deltas {
                let _ = write!(out, "\t{:.4}", d.as_f64());
            }
            out.push('\n');
        }
        out
    }
}
