//! Term-weighting and smoothing formulas.
//!
//! Every model scores a document as a sum over query terms, including terms
//! the document lacks. Probabilities inside a logarithm are floored at
//! [`PROB_FLOOR`] so that zero smoothing mass never yields `-inf`.

use super::{RetrievalConfig, RetrievalModel, WeightedQuery};
use crate::error::{Error, Result};
use crate::index::InvertedIndex;
use crate::scalar::Scalar;

pub const PROB_FLOOR: f64 = 1e-12;

fn ln_floor<F: Scalar>(p: F) -> F {
    p.max(F::lit(PROB_FLOOR)).ln()
}

/// Model with its active parameters, ready to score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Scorer<F> {
    Tfidf { k1: F, b: F },
    Bm25 { k1: F, k3: F, b: F },
    /// Document-model weight, already normalized against the collection weight.
    LmJm { doc_weight: F },
    LmDir { mu: F },
    LmTs { mu: F, lambda: F },
}

impl<F: Scalar> Scorer<F> {
    pub(crate) fn from_config(config: &RetrievalConfig<F>) -> Result<Self> {
        Ok(match config.model {
            RetrievalModel::Tfidf => Scorer::Tfidf {
                k1: config.tfidf_k1,
                b: config.tfidf_b,
            },
            RetrievalModel::Bm25 => Scorer::Bm25 {
                k1: config.bm25_k1,
                k3: config.bm25_k3,
                b: config.bm25_b,
            },
            RetrievalModel::LmJm => Scorer::lm_jm(config.lambda_doc, config.lambda_col)?,
            RetrievalModel::LmDir => Scorer::LmDir { mu: config.mu_dir },
            RetrievalModel::LmTs => Scorer::LmTs {
                mu: config.mu_ts,
                lambda: config.lambda_ts,
            },
        })
    }

    pub(crate) fn lm_jm(lambda_doc: F, lambda_col: F) -> Result<Self> {
        let total = lambda_doc + lambda_col;
        if total <= F::zero() {
            return Err(Error::DegenerateSmoothing("lambda_doc + lambda_col must be positive"));
        }
        Ok(Scorer::LmJm {
            doc_weight: lambda_doc / total,
        })
    }
}

/// Per-query-term statistics shared by every document scored for one query.
#[derive(Debug, Clone)]
pub(crate) struct QueryStats<F> {
    pub terms: Vec<String>,
    pub weights: Vec<F>,
    /// Weights rescaled to the original query length, used as BM25's qtf.
    pub qtf: Vec<F>,
    pub df: Vec<F>,
    pub p_col: Vec<F>,
    pub n_docs: F,
    pub avdl: F,
}

impl<F: Scalar> QueryStats<F> {
    pub(crate) fn new(index: &InvertedIndex, query: &WeightedQuery<F>) -> Result<Self> {
        if index.n_docs() == 0 || index.total_terms() == 0 {
            return Err(Error::EmptyCollection);
        }
        let total_weight = query.total_weight();
        let mut stats = QueryStats {
            terms: Vec::new(),
            weights: Vec::new(),
            qtf: Vec::new(),
            df: Vec::new(),
            p_col: Vec::new(),
            n_docs: F::count(index.n_docs()),
            avdl: F::lit(index.avdl()),
        };
        for (term, &w) in query.terms() {
            stats.terms.push(term.clone());
            stats.weights.push(w);
            stats.qtf.push(w * query.length() / total_weight);
            stats.df.push(F::lit(f64::from(index.df(term))));
            stats.p_col.push(index.collection_prob(term)?);
        }
        Ok(stats)
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }
}

impl<F: Scalar> Scorer<F> {
    /// Scores one document given its length and the tf of each query term
    /// (aligned with `stats.terms`).
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn score(&self, stats: &QueryStats<F>, dl: F, tfs: &[F]) -> Result<F> {
        let zero = F::zero();
        let one = F::one();
        let mut total = zero;
        match *self {
            Scorer::Tfidf { k1, b } => {
                for i in 0..stats.len() {
                    let tf = tfs[i];
                    if tf == zero {
                        continue;
                    }
                    let tfn = k1 * tf / (tf + k1 * (one - b + b * dl / stats.avdl));
                    let idf = ((stats.n_docs + one) / (stats.df[i] + F::lit(0.5))).ln();
                    total = total + stats.weights[i] * tfn * idf * idf;
                }
            }
            Scorer::Bm25 { k1, k3, b } => {
                for i in 0..stats.len() {
                    let tf = tfs[i];
                    if tf == zero {
                        continue;
                    }
                    let df = stats.df[i];
                    let half = F::lit(0.5);
                    let idf = ((stats.n_docs - df + half) / (df + half)).ln().max(zero);
                    let tf_part = tf * (k1 + one) / (tf + k1 * (one - b + b * dl / stats.avdl));
                    let qtf = stats.qtf[i];
                    let qtf_part = qtf * (k3 + one) / (k3 + qtf);
                    total = total + idf * tf_part * qtf_part;
                }
            }
            Scorer::LmJm { doc_weight } => {
                let col_weight = one - doc_weight;
                for i in 0..stats.len() {
                    let p_doc = if dl > zero { tfs[i] / dl } else { zero };
                    total = total + stats.weights[i] * ln_floor(doc_weight * p_doc + col_weight * stats.p_col[i]);
                }
            }
            Scorer::LmDir { mu } => {
                if mu == zero && dl == zero {
                    return Err(Error::DegenerateSmoothing("mu = 0 on an empty document"));
                }
                for i in 0..stats.len() {
                    let p = (tfs[i] + mu * stats.p_col[i]) / (dl + mu);
                    total = total + stats.weights[i] * ln_floor(p);
                }
            }
            Scorer::LmTs { mu, lambda } => {
                if mu == zero && dl == zero {
                    return Err(Error::DegenerateSmoothing("mu_ts = 0 on an empty document"));
                }
                for i in 0..stats.len() {
                    let dir = (tfs[i] + mu * stats.p_col[i]) / (dl + mu);
                    let p = (one - lambda) * dir + lambda * stats.p_col[i];
                    total = total + stats.weights[i] * ln_floor(p);
                }
            }
        }
        Ok(total)
    }
}

fn score_doc<F: Scalar>(index: &InvertedIndex, query: &WeightedQuery<F>, doc: u32, scorer: Scorer<F>) -> Result<F> {
    let stats = QueryStats::new(index, query)?;
    let tfs: Vec<F> = stats
        .terms
        .iter()
        .map(|t| F::lit(f64::from(index.tf(t, doc))))
        .collect();
    scorer.score(&stats, F::lit(f64::from(index.doc_len(doc))), &tfs)
}

/// TF-IDF with Okapi tf normalization: Σ w·tfn·idf², idf = ln((N+1)/(df+0.5)).
pub fn score_tfidf<F: Scalar>(index: &InvertedIndex, query: &WeightedQuery<F>, doc: u32, k1: F, b: F) -> Result<F> {
    score_doc(index, query, doc, Scorer::Tfidf { k1, b })
}

/// Okapi BM25 with the idf floored at zero.
pub fn score_bm25<F: Scalar>(
    index: &InvertedIndex,
    query: &WeightedQuery<F>,
    doc: u32,
    k1: F,
    k3: F,
    b: F,
) -> Result<F> {
    score_doc(index, query, doc, Scorer::Bm25 { k1, k3, b })
}

/// Jelinek-Mercer smoothing with weights renormalized to sum to one.
pub fn score_lm_jm<F: Scalar>(
    index: &InvertedIndex,
    query: &WeightedQuery<F>,
    doc: u32,
    lambda_doc: F,
    lambda_col: F,
) -> Result<F> {
    score_doc(index, query, doc, Scorer::lm_jm(lambda_doc, lambda_col)?)
}

/// Query likelihood with Dirichlet-prior smoothing.
pub fn score_lm_dir<F: Scalar>(index: &InvertedIndex, query: &WeightedQuery<F>, doc: u32, mu: F) -> Result<F> {
    score_doc(index, query, doc, Scorer::LmDir { mu })
}

/// Two-stage smoothing: Dirichlet, then interpolation with the collection.
pub fn score_lm_ts<F: Scalar>(
    index: &InvertedIndex,
    query: &WeightedQuery<F>,
    doc: u32,
    mu: F,
    lambda: F,
) -> Result<F> {
    score_doc(index, query, doc, Scorer::LmTs { mu, lambda })
}
