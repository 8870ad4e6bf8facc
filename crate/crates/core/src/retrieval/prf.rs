use std::collections::BTreeMap;

use super::{Ranking, WeightedQuery};
use crate::error::{Error, Result};
use crate::index::InvertedIndex;
use crate::scalar::Scalar;

/// Relevance-model query expansion.
///
/// The top `fb_docs` documents of `first_pass` are weighted by a softmax of
/// their first-pass scores. Each contributes its Dirichlet-smoothed (`fb_mu`)
/// term distribution over the terms occurring in the feedback set. The
/// `fb_terms` most probable terms (ties by ascending term) are kept,
/// renormalized, and mixed with the normalized original query:
/// `fb_orig_weight * p_orig + (1 - fb_orig_weight) * p_rm`.
/// Zero-weight terms are dropped, so the output weights sum to one.
pub fn prf_expand<F: Scalar>(
    index: &InvertedIndex,
    original: &WeightedQuery<F>,
    first_pass: &Ranking<F>,
    fb_docs: usize,
    fb_terms: usize,
    fb_mu: F,
    fb_orig_weight: F,
) -> Result<WeightedQuery<F>> {
    if first_pass.is_empty() {
        return Err(Error::Invalid("feedback needs a non-empty first-pass ranking".into()));
    }
    if index.total_terms() == 0 {
        return Err(Error::EmptyCollection);
    }
    let top: Vec<_> = first_pass.entries.iter().take(fb_docs.max(1)).collect();
    let docs = top
        .iter()
        .map(|e| {
            index
                .doc_ordinal(&e.docno)
                .ok_or_else(|| Error::Invalid(format!("docno {} not in index", e.docno)))
        })
        .collect::<Result<Vec<_>>>()?;

    let max_score = top.iter().map(|e| e.score).fold(F::neg_infinity(), F::max);
    let raw: Vec<F> = top.iter().map(|e| (e.score - max_score).exp()).collect();
    let norm: F = raw.iter().copied().sum();
    let doc_weights: Vec<F> = raw.into_iter().map(|w| w / norm).collect();

    // p(t|R) = Σ_d w_d (tf + mu p_c) / (dl + mu)
    //        = Σ_d w_d tf / (dl + mu)  +  p_c Σ_d w_d mu / (dl + mu)
    let total_terms = F::lit(index.total_terms() as f64);
    let mut tf_mass: BTreeMap<u32, F> = BTreeMap::new();
    let mut smoothing_mass = F::zero();
    for (&doc, &w) in docs.iter().zip(&doc_weights) {
        let denom = F::lit(f64::from(index.doc_len(doc))) + fb_mu;
        if denom <= F::zero() {
            continue;
        }
        smoothing_mass = smoothing_mass + w * fb_mu / denom;
        for &(tid, tf) in index.doc_terms(doc) {
            let m = tf_mass.entry(tid).or_insert_with(F::zero);
            *m = *m + w * F::lit(f64::from(tf)) / denom;
        }
    }
    let mut model: Vec<(u32, F)> = tf_mass
        .into_iter()
        .map(|(tid, m)| {
            let p_col = F::lit(index.cf_by_id(tid) as f64) / total_terms;
            (tid, m + smoothing_mass * p_col)
        })
        .collect();
    // Term ids are in lexicographic order, so ascending id is ascending term.
    model.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    model.truncate(fb_terms.max(1));
    let kept: F = model.iter().map(|&(_, p)| p).sum();

    let mut mixed: BTreeMap<String, F> = original
        .normalized()
        .into_iter()
        .map(|(t, p)| (t, fb_orig_weight * p))
        .collect();
    if kept > F::zero() {
        for (tid, p) in model {
            let w = mixed.entry(index.term(tid).to_owned()).or_insert_with(F::zero);
            *w = *w + (F::one() - fb_orig_weight) * p / kept;
        }
    }
    mixed.retain(|_, w| *w > F::zero());
    let total: F = mixed.values().copied().sum();
    for w in mixed.values_mut() {
        *w = *w / total;
    }
    WeightedQuery::from_weights(mixed, original.length())
}
