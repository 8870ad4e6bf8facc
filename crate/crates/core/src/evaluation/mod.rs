//! Relevance judgments, effectiveness measures, run fusion and per-topic
//! comparisons.

mod delta;
mod fusion;
mod trec;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

pub use delta::{per_topic_delta, DeltaTable};
pub use fusion::zsum_fuse;
pub use trec::{format_score, parse_qrels, parse_run, read_qrels, read_run, write_qrels, write_run};

use crate::error::{Error, Result};
use crate::retrieval::{Ranking, TopicId};
use crate::scalar::Scalar;

/// Graded judgments; a document is relevant iff its grade is positive.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Qrels {
    judgments: BTreeMap<TopicId, BTreeMap<String, i32>>,
}

impl Qrels {
    pub fn new(judgments: BTreeMap<TopicId, BTreeMap<String, i32>>) -> Self {
        Qrels { judgments }
    }

    pub fn judgments(&self) -> &BTreeMap<TopicId, BTreeMap<String, i32>> {
        &self.judgments
    }

    pub fn topics(&self) -> impl Iterator<Item = &TopicId> {
        self.judgments.keys()
    }

    pub fn grade(&self, topic: &TopicId, docno: &str) -> i32 {
        self.judgments
            .get(topic)
            .and_then(|d| d.get(docno))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_relevant(&self, topic: &TopicId, docno: &str) -> bool {
        self.grade(topic, docno) > 0
    }

    pub fn relevant_count(&self, topic: &TopicId) -> usize {
        self.judgments
            .get(topic)
            .map_or(0, |d| d.values().filter(|&&g| g > 0).count())
    }

    /// Topics with at least one relevant document.
    pub fn evaluable_topics(&self) -> impl Iterator<Item = &TopicId> {
        self.judgments
            .iter()
            .filter(|(_, d)| d.values().any(|&g| g > 0))
            .map(|(t, _)| t)
    }
}

/// A system's rankings for a set of topics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFile<F> {
    pub tag: String,
    pub rankings: BTreeMap<TopicId, Ranking<F>>,
}

impl<F: Scalar> RunFile<F> {
    pub fn from_rankings(tag: impl Into<String>, rankings: impl IntoIterator<Item = Ranking<F>>) -> Self {
        RunFile {
            tag: tag.into(),
            rankings: rankings.into_iter().map(|r| (r.topic.clone(), r)).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.values().all(Ranking::is_empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Map,
    Ndcg,
    P10,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Map, Measure::Ndcg, Measure::P10];

    /// Name as printed by trec_eval.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Map => "map",
            Measure::Ndcg => "ndcg",
            Measure::P10 => "P_10",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "map" | "ap" => Ok(Measure::Map),
            "ndcg" => Ok(Measure::Ndcg),
            "p_10" | "p10" | "p@10" => Ok(Measure::P10),
            _ => Err(Error::Invalid(format!("unknown measure {s:?} (expected map, ndcg or P_10)"))),
        }
    }
}

fn check_evaluable(qrels: &Qrels, topic: &TopicId) -> Result<usize> {
    match qrels.relevant_count(topic) {
        0 => Err(Error::NoRelevant(topic.to_string())),
        r => Ok(r),
    }
}

/// Average precision over the ranking as given. Relevant documents missing
/// from the ranking stay in the denominator.
pub fn average_precision<F: Scalar>(ranking: &Ranking<F>, qrels: &Qrels, topic: &TopicId) -> Result<F> {
    let r = check_evaluable(qrels, topic)?;
    let mut hits = 0usize;
    let mut sum = F::zero();
    for (k, docno) in ranking.docnos().enumerate() {
        if qrels.is_relevant(topic, docno) {
            hits += 1;
            sum = sum + F::count(hits) / F::count(k + 1);
        }
    }
    Ok(sum / F::count(r))
}

/// NDCG with linear gains (the grade) and a log2(rank + 1) discount; the
/// ideal ordering ranks every judged document by grade.
pub fn ndcg<F: Scalar>(ranking: &Ranking<F>, qrels: &Qrels, topic: &TopicId) -> Result<F> {
    check_evaluable(qrels, topic)?;
    let discount = |k: usize| F::count(k + 2).log2();
    let dcg: F = ranking
        .docnos()
        .enumerate()
        .map(|(k, d)| F::lit(f64::from(qrels.grade(topic, d).max(0))) / discount(k))
        .sum();
    let mut grades: Vec<i32> = qrels.judgments[topic].values().copied().filter(|&g| g > 0).collect();
    grades.sort_unstable_by(|a, b| b.cmp(a));
    let ideal: F = grades
        .iter()
        .enumerate()
        .map(|(k, &g)| F::lit(f64::from(g)) / discount(k))
        .sum();
    Ok(dcg / ideal)
}

/// Relevant documents among the first `k`, divided by `k` even when the
/// ranking is shorter.
pub fn precision_at_k<F: Scalar>(ranking: &Ranking<F>, qrels: &Qrels, topic: &TopicId, k: usize) -> Result<F> {
    check_evaluable(qrels, topic)?;
    let hits = ranking.docnos().take(k).filter(|d| qrels.is_relevant(topic, d)).count();
    Ok(F::count(hits) / F::count(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TopicMeasures<F> {
    pub ap: F,
    pub ndcg: F,
    pub p10: F,
}

impl<F: Scalar> TopicMeasures<F> {
    pub fn get(&self, measure: Measure) -> F {
        match measure {
            Measure::Map => self.ap,
            Measure::Ndcg => self.ndcg,
            Measure::P10 => self.p10,
        }
    }

    fn zero() -> Self {
        TopicMeasures {
            ap: F::zero(),
            ndcg: F::zero(),
            p10: F::zero(),
        }
    }
}

/// Per-topic measures and their means (MAP, mean NDCG, mean P@10).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport<F> {
    pub per_topic: BTreeMap<TopicId, TopicMeasures<F>>,
    pub means: TopicMeasures<F>,
}

/// Evaluates every topic with a relevant document. Judged topics missing from
/// the run score zero and count towards the means; topics without judgments
/// are ignored.
pub fn evaluate_run<F: Scalar>(run: &RunFile<F>, qrels: &Qrels) -> Result<MeasureReport<F>> {
    let topics: Vec<&TopicId> = qrels.evaluable_topics().collect();
    if !topics.iter().any(|t| run.rankings.contains_key(*t)) {
        return Err(Error::NoOverlap);
    }
    let mut per_topic = BTreeMap::new();
    for topic in &topics {
        let m = match run.rankings.get(*topic) {
            Some(r) => TopicMeasures {
                ap: average_precision(r, qrels, topic)?,
                ndcg: ndcg(r, qrels, topic)?,
                p10: precision_at_k(r, qrels, topic, 10)?,
            },
            None => TopicMeasures::zero(),
        };
        per_topic.insert((*topic).clone(), m);
    }
    let n = F::count(per_topic.len());
    let mean = |f: fn(&TopicMeasures<F>) -> F| per_topic.values().map(f).sum::<F>() / n;
    let means = TopicMeasures {
        ap: mean(|m| m.ap),
        ndcg: mean(|m| m.ndcg),
        p10: mean(|m| m.p10),
    };
    Ok(MeasureReport { per_topic, means })
}

/// `measure<TAB>topic|all<TAB>value` lines, four decimals, grouped by measure.
pub fn format_report<F: Scalar>(report: &MeasureReport<F>, measures: &[Measure], per_topic: bool) -> String {
    let mut out = String::new();
    for &m in measures {
        if per_topic {
            for (topic, tm) in &report.per_topic {
                let _ = writeln!(out, "{m}\t{topic}\t{:.4}", tm.get(m).as_f64());
            }
        }
        let _ = writeln!(out, "{m}\tall\t{:.4}", report.means.get(m).as_f64());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::ScoredDoc;

    fn ranking(topic: &str, docs: &[&str]) -> Ranking<f64> {
        let n = docs.len();
        let entries = docs
            .iter()
            .enumerate()
            .map(|(i, d)| ScoredDoc {
                docno: d.to_string(),
                score: (n - i) as f64,
            })
            .collect();
        Ranking::from_scored(topic.into(), entries, 1000)
    }

    fn qrels(text: &str) -> Qrels {
        parse_qrels(text).unwrap()
    }

    #[test]
    fn ap_hand_case() {
        let q = qrels("1 0 d1 1\n1 0 d3 1\n1 0 d2 0\n");
        let t = TopicId::from("1");
        let ap = average_precision(&ranking("1", &["d2", "d1", "d3"]), &q, &t).unwrap();
        assert!((ap - 0.5 * (0.5 + 2.0 / 3.0)).abs() < 1e-15);
        assert!((ap - 0.58333).abs() < 1e-5);
        let perfect = average_precision(&ranking("1", &["d1", "d3", "d2"]), &q, &t).unwrap();
        assert_eq!(perfect, 1.0);
        // d3 never retrieved: contributes nothing, still counted in R
        let partial = average_precision(&ranking("1", &["d1"]), &q, &t).unwrap();
        assert_eq!(partial, 0.5);
    }

    #[test]
    fn ndcg_hand_case() {
        let q = qrels("1 0 d1 1\n1 0 d3 1\n");
        let t = TopicId::from("1");
        let v = ndcg(&ranking("1", &["d2", "d1", "d3"]), &q, &t).unwrap();
        let expected = (1.0 / 3f64.log2() + 0.5) / (1.0 + 1.0 / 3f64.log2());
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.69342).abs() < 1e-5);
        assert_eq!(ndcg(&ranking("1", &["d1", "d3"]), &q, &t).unwrap(), 1.0);
        assert_eq!(ndcg(&ranking("1", &[]), &q, &t).unwrap(), 0.0);
    }

    #[test]
    fn precision_divides_by_k() {
        let q = qrels("1 0 a 1\n1 0 b 1\n1 0 c 1\n");
        let t = TopicId::from("1");
        let p = precision_at_k(&ranking("1", &["a", "x", "b", "y"]), &q, &t, 10).unwrap();
        assert_eq!(p, 0.2);
        let docs: Vec<String> = (0..12).map(|i| format!("n{i}")).collect();
        let mut refs: Vec<&str> = docs.iter().map(String::as_str).collect();
        refs[0] = "a";
        refs[4] = "b";
        refs[9] = "c";
        let p = precision_at_k(&ranking("1", &refs), &q, &t, 10).unwrap();
        assert!((p - 0.3).abs() < 1e-15);
    }

    #[test]
    fn no_relevant_is_an_error() {
        let q = qrels("1 0 a 0\n");
        let t = TopicId::from("1");
        assert!(matches!(
            average_precision(&ranking("1", &["a"]), &q, &t),
            Err(Error::NoRelevant(_))
        ));
        assert!(matches!(ndcg(&ranking("1", &["a"]), &q, &t), Err(Error::NoRelevant(_))));
    }

    #[test]
    fn evaluate_run_counts_missing_topics_as_zero() {
        let q = qrels("1 0 d1 1\n1 0 d3 1\n2 0 x 1\n3 0 y 0\n");
        let run = RunFile::from_rankings("t", [ranking("1", &["d2", "d1", "d3"])]);
        let report = evaluate_run(&run, &q).unwrap();
        assert_eq!(report.per_topic.len(), 2);
        assert_eq!(report.per_topic[&TopicId::from("2")], TopicMeasures::zero());
        assert!((report.means.ap - 0.58333 / 2.0).abs() < 1e-5);
    }

    #[test]
    fn evaluate_run_single_topic() {
        let q = qrels("1 0 d1 1\n1 0 d3 1\n");
        let run = RunFile::from_rankings("t", [ranking("1", &["d2", "d1", "d3"])]);
        assert!((evaluate_run(&run, &q).unwrap().means.ap - 0.583333).abs() < 1e-6);
        let perfect = RunFile::from_rankings("t", [ranking("1", &["d1", "d3"])]);
        let r = evaluate_run(&perfect, &q).unwrap();
        assert_eq!((r.means.ap, r.means.ndcg), (1.0, 1.0));
    }

    #[test]
    fn no_overlap() {
        let q = qrels("1 0 d1 1\n");
        let run = RunFile::from_rankings("t", [ranking("9", &["d1"])]);
        assert!(matches!(evaluate_run(&run, &q), Err(Error::NoOverlap)));
    }

    #[test]
    fn report_format() {
        let q = qrels("1 0 d1 1\n1 0 d3 1\n");
        let run = RunFile::from_rankings("t", [ranking("1", &["d2", "d1", "d3"])]);
        let report = evaluate_run(&run, &q).unwrap();
        let text = format_report(&report, &[Measure::Map], true);
        assert_eq!(text, "map\t1\t0.5833\nmap\tall\t0.5833\n");
    }

    #[test]
    fn measure_names() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("recall".parse::<Measure>().is_err());
    }
}
