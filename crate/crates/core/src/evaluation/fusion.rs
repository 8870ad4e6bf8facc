use std::collections::{BTreeSet, HashMap};

use super::RunFile;
use crate::error::{Error, Result};
use crate::retrieval::{Ranking, ScoredDoc, TopicId};
use crate::scalar::Scalar;

/// z-scores of one ranking (population standard deviation); all zero when
/// the scores do not vary.
fn standardize<F: Scalar>(ranking: &Ranking<F>) -> HashMap<&str, F> {
    let n = F::count(ranking.len());
    let scores = ranking.entries.iter().map(|e| e.score);
    let (lo, hi) = scores
        .clone()
        .fold((F::infinity(), F::neg_infinity()), |(lo, hi), s| (lo.min(s), hi.max(s)));
    let mean = scores.clone().sum::<F>() / n;
    let std = (scores.map(|s| (s - mean) * (s - mean)).sum::<F>() / n).sqrt();
    let flat = lo == hi || std == F::zero();
    ranking
        .entries
        .iter()
        .map(|e| {
            let z = if flat { F::zero() } else { (e.score - mean) / std };
            (e.docno.as_str(), z)
        })
        .collect()
}

/// Per topic, sums each run's z-scored scores over the union of retrieved
/// documents. A document missing from one run gets that run's minimum z for
/// the topic; a run without the topic contributes nothing. Output depth per
/// topic is the longer of the two input rankings.
pub fn zsum_fuse<F: Scalar>(run_a: &RunFile<F>, run_b: &RunFile<F>, tag: &str) -> Result<RunFile<F>> {
    if run_a.is_empty() || run_b.is_empty() {
        return Err(Error::EmptyRun);
    }
    let topics: BTreeSet<&TopicId> = run_a.rankings.keys().chain(run_b.rankings.keys()).collect();
    let mut fused = Vec::with_capacity(topics.len());
    for topic in topics {
        let parts: Vec<(HashMap<&str, F>, F)> = [run_a, run_b]
            .iter()
            .filter_map(|run| run.rankings.get(topic))
            .filter(|r| !r.is_empty())
            .map(|r| {
                let z = standardize(r);
                let min = z.values().copied().fold(F::infinity(), F::min);
                (z, min)
            })
            .collect();
        let docs: BTreeSet<&str> = parts.iter().flat_map(|(z, _)| z.keys().copied()).collect();
        let entries = docs
            .into_iter()
            .map(|d| ScoredDoc {
                docno: d.to_owned(),
                score: parts
                    .iter()
                    .map(|(z, min)| z.get(d).copied().unwrap_or(*min))
                    .fold(F::zero(), |acc, z| acc + z),
            })
            .collect();
        let depth = [run_a, run_b]
            .iter()
            .filter_map(|run| run.rankings.get(topic))
            .map(Ranking::len)
            .max()
            .unwrap_or(0);
        fused.push(Ranking::from_scored(topic.clone(), entries, depth));
    }
    Ok(RunFile::from_rankings(tag, fused))
}
