//! Document scoring and ranking under any of the five retrieval models, with
//! optional pseudo-relevance feedback.

mod prf;
mod ranking;
mod scoring;
mod topics;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use prf::prf_expand;
pub use ranking::{canonical_order, Ranking, ScoredDoc, TopicId};
pub use scoring::{score_bm25, score_lm_dir, score_lm_jm, score_lm_ts, score_tfidf, PROB_FLOOR};
pub use topics::{parse_topics, read_topics, QueryField, Topic};

use crate::error::{Error, Result};
use crate::index::InvertedIndex;
use crate::scalar::Scalar;
use scoring::{QueryStats, Scorer};

pub const DEFAULT_DEPTH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RetrievalModel {
    Tfidf,
    Bm25,
    LmJm,
    LmDir,
    LmTs,
}

impl RetrievalModel {
    pub const ALL: [RetrievalModel; 5] = [
        RetrievalModel::Tfidf,
        RetrievalModel::Bm25,
        RetrievalModel::LmJm,
        RetrievalModel::LmDir,
        RetrievalModel::LmTs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RetrievalModel::Tfidf => "TFIDF",
            RetrievalModel::Bm25 => "BM25",
            RetrievalModel::LmJm => "LM_JM",
            RetrievalModel::LmDir => "LM_DIR",
            RetrievalModel::LmTs => "LM_TS",
        }
    }

    pub fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RetrievalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RetrievalModel {
    type Err = Error;

    /// Accepts the canonical names case-insensitively, with `-` for `_`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let norm = if norm == "TF_IDF" { "TFIDF".to_owned() } else { norm };
        Self::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::Invalid(format!("unknown retrieval model {s:?}")))
    }
}

/// Retrieval model choice and its parameters. Only the fields selected by
/// `model` (and by `prf`) are read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalConfig<F> {
    pub model: RetrievalModel,
    pub tfidf_k1: F,
    pub tfidf_b: F,
    pub bm25_k1: F,
    pub bm25_k3: F,
    pub bm25_b: F,
    pub lambda_doc: F,
    pub lambda_col: F,
    pub mu_dir: F,
    pub mu_ts: F,
    pub lambda_ts: F,
    pub prf: bool,
    pub fb_docs: u32,
    pub fb_terms: u32,
    pub fb_mu: F,
    pub fb_orig_weight: F,
}

impl<F: Scalar> Default for RetrievalConfig<F> {
    /// Query likelihood with Dirichlet smoothing, mu = 1000, no feedback.
    fn default() -> Self {
        RetrievalConfig {
            model: RetrievalModel::LmDir,
            tfidf_k1: F::lit(1.2),
            tfidf_b: F::lit(0.75),
            bm25_k1: F::lit(1.2),
            bm25_k3: F::lit(7.0),
            bm25_b: F::lit(0.75),
            lambda_doc: F::lit(0.4),
            lambda_col: F::lit(0.6),
            mu_dir: F::lit(1000.0),
            mu_ts: F::lit(1000.0),
            lambda_ts: F::lit(0.4),
            prf: false,
            fb_docs: 10,
            fb_terms: 10,
            fb_mu: F::lit(0.0),
            fb_orig_weight: F::lit(0.5),
        }
    }
}

/// Query as term weights: term frequencies for a raw query, a probability
/// mixture after feedback. `length` keeps the raw query's token count.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuery<F> {
    terms: BTreeMap<String, F>,
    length: F,
}

impl<F: Scalar> WeightedQuery<F> {
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let length = F::count(tokens.len());
        let mut terms = BTreeMap::new();
        for t in tokens {
            let w = terms.entry(t).or_insert_with(F::zero);
            *w = *w + F::one();
        }
        Ok(WeightedQuery { terms, length })
    }

    /// Analyzes `text` with the index's preprocessing variant.
    pub fn parse(index: &InvertedIndex, text: &str) -> Result<Self> {
        Self::from_tokens(index.variant().analyze(text))
    }

    pub fn from_weights(terms: BTreeMap<String, F>, length: F) -> Result<Self> {
        if terms.values().any(|&w| w < F::zero() || !w.is_finite()) {
            return Err(Error::Invalid("query weights must be finite and non-negative".into()));
        }
        if !terms.values().any(|&w| w > F::zero()) {
            return Err(Error::EmptyQuery);
        }
        Ok(WeightedQuery { terms, length })
    }

    pub fn terms(&self) -> &BTreeMap<String, F> {
        &self.terms
    }

    pub fn weight(&self, term: &str) -> F {
        self.terms.get(term).copied().unwrap_or_else(F::zero)
    }

    pub fn length(&self) -> F {
        self.length
    }

    pub fn total_weight(&self) -> F {
        self.terms.values().copied().sum()
    }

    /// Weights divided by their sum.
    pub fn normalized(&self) -> BTreeMap<String, F> {
        let total = self.total_weight();
        self.terms.iter().map(|(t, &w)| (t.clone(), w / total)).collect()
    }
}

/// Ranks documents containing at least one query term, applying feedback
/// expansion first when `config.prf` is set.
pub fn rank<F: Scalar>(
    index: &InvertedIndex,
    topic: TopicId,
    query: &WeightedQuery<F>,
    config: &RetrievalConfig<F>,
    depth: usize,
) -> Result<Ranking<F>> {
    let scorer = Scorer::from_config(config)?;
    if !config.prf {
        return rank_with(index, topic, query, scorer, depth);
    }
    let first = rank_with(index, topic.clone(), query, scorer, config.fb_docs.max(1) as usize)?;
    if first.is_empty() {
        return Ok(Ranking::empty(topic, depth));
    }
    let expanded = prf_expand(
        index,
        query,
        &first,
        config.fb_docs as usize,
        config.fb_terms as usize,
        config.fb_mu,
        config.fb_orig_weight,
    )?;
    rank_with(index, topic, &expanded, scorer, depth)
}

fn rank_with<F: Scalar>(
    index: &InvertedIndex,
    topic: TopicId,
    query: &WeightedQuery<F>,
    scorer: Scorer<F>,
    depth: usize,
) -> Result<Ranking<F>> {
    if query.total_weight() <= F::zero() {
        return Err(Error::EmptyQuery);
    }
    let stats = QueryStats::new(index, query)?;
    let mut candidates: HashMap<u32, Vec<F>> = HashMap::new();
    for (i, term) in stats.terms.iter().enumerate() {
        for p in index.postings(term) {
            candidates.entry(p.doc).or_insert_with(|| vec![F::zero(); stats.len()])[i] = F::lit(f64::from(p.tf));
        }
    }
    let entries = candidates
        .into_iter()
        .map(|(doc, tfs)| {
            let score = scorer.score(&stats, F::lit(f64::from(index.doc_len(doc))), &tfs)?;
            Ok(ScoredDoc {
                docno: index.docno(doc).to_owned(),
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ranking::from_scored(topic, entries, depth))
}

/// Ranks every topic in parallel. Topics whose query is empty after
/// preprocessing get an empty ranking.
pub fn search_topics<F: Scalar>(
    index: &InvertedIndex,
    topics: &[Topic],
    field: QueryField,
    config: &RetrievalConfig<F>,
    depth: usize,
) -> Result<Vec<Ranking<F>>> {
    let mut rankings = topics
        .par_iter()
        .map(|topic| match WeightedQuery::parse(index, &topic.query_text(field)) {
            Ok(q) => rank(index, topic.id.clone(), &q, config, depth),
            Err(Error::EmptyQuery) => Ok(Ranking::empty(topic.id.clone(), depth)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    rankings.sort_by(|a, b| a.topic.cmp(&b.topic));
    Ok(rankings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_index, Document, IndexVariant};

    fn fixture() -> InvertedIndex {
        let docs = vec![
            Document::new("d1", "bear bear cub"),
            Document::new("d2", "bear"),
            Document::new("d3", "river"),
        ];
        build_index(&docs, IndexVariant::new(false, false)).unwrap()
    }

    fn lm_dir(mu: f64) -> RetrievalConfig<f64> {
        RetrievalConfig {
            mu_dir: mu,
            ..RetrievalConfig::default()
        }
    }

    #[test]
    fn model_names_parse() {
        for m in RetrievalModel::ALL {
            assert_eq!(m.name().parse::<RetrievalModel>().unwrap(), m);
        }
        assert_eq!("lm-dir".parse::<RetrievalModel>().unwrap(), RetrievalModel::LmDir);
        assert_eq!("TF-IDF".parse::<RetrievalModel>().unwrap(), RetrievalModel::Tfidf);
        assert!("BM26".parse::<RetrievalModel>().is_err());
    }

    #[test]
    fn query_counts_term_frequency() {
        let q = WeightedQuery::<f64>::from_tokens(vec!["a".into(), "b".into(), "a".into()]).unwrap();
        assert_eq!(q.weight("a"), 2.0);
        assert_eq!(q.weight("b"), 1.0);
        assert_eq!(q.length(), 3.0);
        assert!(matches!(WeightedQuery::<f64>::from_tokens(vec![]), Err(Error::EmptyQuery)));
    }

    #[test]
    fn dirichlet_ranking_on_fixture() {
        let idx = fixture();
        let q = WeightedQuery::<f64>::parse(&idx, "bear").unwrap();
        let r = rank(&idx, "1".into(), &q, &lm_dir(10.0), 10).unwrap();
        assert_eq!(r.docnos().collect::<Vec<_>>(), ["d2", "d1"]);
        assert!((r.entries[0].score - (7.0f64 / 11.0).ln()).abs() < 1e-12);
        assert!((r.entries[1].score - (8.0f64 / 13.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn single_match_gives_singleton() {
        let idx = fixture();
        let q = WeightedQuery::<f64>::parse(&idx, "river").unwrap();
        let r = rank(&idx, "1".into(), &q, &RetrievalConfig::default(), 10).unwrap();
        assert_eq!(r.docnos().collect::<Vec<_>>(), ["d3"]);
    }

    #[test]
    fn identical_documents_tie_by_docno() {
        let docs = vec![
            Document::new("z", "bear cub"),
            Document::new("m", "river"),
            Document::new("a", "bear cub"),
        ];
        let idx = build_index(&docs, IndexVariant::new(false, false)).unwrap();
        let q = WeightedQuery::<f64>::parse(&idx, "bear").unwrap();
        for model in RetrievalModel::ALL {
            let config = RetrievalConfig {
                model,
                ..RetrievalConfig::default()
            };
            let r = rank(&idx, "1".into(), &q, &config, 10).unwrap();
            assert_eq!(r.docnos().collect::<Vec<_>>(), ["a", "z"], "{model}");
        }
    }

    #[test]
    fn depth_truncates() {
        let idx = fixture();
        let q = WeightedQuery::<f64>::parse(&idx, "bear river").unwrap();
        let r = rank(&idx, "1".into(), &q, &lm_dir(10.0), 1).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn empty_index_is_an_error() {
        let idx = build_index(&[], IndexVariant::new(false, false)).unwrap();
        let q = WeightedQuery::from_tokens(vec!["bear".to_string()]).unwrap();
        assert!(rank(&idx, "1".into(), &q, &lm_dir(10.0), 10).is_err());
    }

    #[test]
    fn prf_ranking_runs() {
        let idx = fixture();
        let q = WeightedQuery::parse(&idx, "cub").unwrap();
        let config = RetrievalConfig {
            prf: true,
            fb_docs: 1,
            fb_terms: 5,
            fb_orig_weight: 0.5,
            ..lm_dir(10.0)
        };
        // expansion pulls in "bear" from d1, so d2 becomes a candidate
        let r = rank(&idx, "1".into(), &q, &config, 10).unwrap();
        assert_eq!(r.docnos().collect::<Vec<_>>(), ["d1", "d2"]);
    }
}
