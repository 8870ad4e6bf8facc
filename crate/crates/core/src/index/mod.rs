//! Corpus ingestion and inverted indexes, one per (stopper, stemmer) variant.

mod analysis;
mod corpus;
pub mod porter;
mod storage;

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

pub use analysis::{apply_stemmer, apply_stopper, tokenize, IndexVariant, Stoplist};
pub use corpus::{parse_corpus, read_corpus, Document};
pub use storage::{load_index_set, save_index_set};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Postings and collection statistics for one preprocessing variant.
///
/// Immutable once built. Term ids follow lexicographic term order and doc
/// ordinals follow corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    variant: IndexVariant,
    terms: Vec<String>,
    term_ids: HashMap<String, u32>,
    postings: Vec<Vec<Posting>>,
    cf: Vec<u64>,
    doc_terms: Vec<Vec<(u32, u32)>>,
    doc_lengths: Vec<u32>,
    docnos: Vec<String>,
    docno_ids: HashMap<String, u32>,
    total_terms: u64,
}

pub fn build_index(corpus: &[Document], variant: IndexVariant) -> Result<InvertedIndex> {
    let mut seen = HashSet::with_capacity(corpus.len());
    for d in corpus {
        if !seen.insert(d.docno.as_str()) {
            return Err(Error::DuplicateDocno(d.docno.clone()));
        }
    }
    let analyzed: Vec<Vec<String>> = corpus.par_iter().map(|d| variant.analyze(&d.text)).collect();

    let mut vocab: BTreeMap<&str, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(corpus.len());
    for (ord, tokens) in analyzed.iter().enumerate() {
        doc_lengths.push(tokens.len() as u32);
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t).or_default() += 1;
        }
        for (t, tf) in counts {
            vocab.entry(t).or_default().push(Posting { doc: ord as u32, tf });
        }
    }
    let (terms, postings): (Vec<String>, Vec<Vec<Posting>>) =
        vocab.into_iter().map(|(t, p)| (t.to_owned(), p)).unzip();
    let docnos = corpus.iter().map(|d| d.docno.clone()).collect();
    Ok(InvertedIndex::from_parts(variant, terms, postings, doc_lengths, docnos))
}

impl InvertedIndex {
    /// Assembles an index from sorted terms and their doc-ascending postings,
    /// deriving every statistic.
    pub(crate) fn from_parts(
        variant: IndexVariant,
        terms: Vec<String>,
        postings: Vec<Vec<Posting>>,
        doc_lengths: Vec<u32>,
        docnos: Vec<String>,
    ) -> Self {
        let term_ids = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let cf = postings
            .iter()
            .map(|p| p.iter().map(|x| u64::from(x.tf)).sum())
            .collect();
        let mut doc_terms = vec![Vec::new(); doc_lengths.len()];
        for (tid, plist) in postings.iter().enumerate() {
            for p in plist {
                doc_terms[p.doc as usize].push((tid as u32, p.tf));
            }
        }
        let total_terms = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let docno_ids = docnos.iter().enumerate().map(|(i, d)| (d.clone(), i as u32)).collect();
        InvertedIndex {
            variant,
            terms,
            term_ids,
            postings,
            cf,
            doc_terms,
            doc_lengths,
            docnos,
            docno_ids,
            total_terms,
        }
    }

    pub fn variant(&self) -> IndexVariant {
        self.variant
    }

    pub fn n_docs(&self) -> usize {
        self.docnos.len()
    }

    pub fn total_terms(&self) -> u64 {
        self.total_terms
    }

    /// Mean document length; zero for an empty collection.
    pub fn avdl(&self) -> f64 {
        if self.docnos.is_empty() {
            0.0
        } else {
            self.total_terms as f64 / self.docnos.len() as f64
        }
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.term_ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn docno(&self, doc: u32) -> &str {
        &self.docnos[doc as usize]
    }

    pub fn doc_ordinal(&self, docno: &str) -> Option<u32> {
        self.docno_ids.get(docno).copied()
    }

    pub fn docnos(&self) -> &[String] {
        &self.docnos
    }

    pub fn doc_len(&self, doc: u32) -> u32 {
        self.doc_lengths[doc as usize]
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_id(term).map_or(&[], |id| self.postings_by_id(id))
    }

    pub fn postings_by_id(&self, id: u32) -> &[Posting] {
        &self.postings[id as usize]
    }

    /// (term id, tf) pairs of a document, by ascending term id.
    pub fn doc_terms(&self, doc: u32) -> &[(u32, u32)] {
        &self.doc_terms[doc as usize]
    }

    pub fn df(&self, term: &str) -> u32 {
        self.postings(term).len() as u32
    }

    pub fn cf(&self, term: &str) -> u64 {
        self.term_id(term).map_or(0, |id| self.cf_by_id(id))
    }

    pub fn cf_by_id(&self, id: u32) -> u64 {
        self.cf[id as usize]
    }

    pub fn tf(&self, term: &str, doc: u32) -> u32 {
        let plist = self.postings(term);
        plist
            .binary_search_by_key(&doc, |p| p.doc)
            .map_or(0, |i| plist[i].tf)
    }

    /// p(term | collection) = cf / total_terms; zero for unseen terms.
    pub fn collection_prob<F: Scalar>(&self, term: &str) -> Result<F> {
        if self.total_terms == 0 {
            return Err(Error::EmptyCollection);
        }
        Ok(F::lit(self.cf(term) as f64 / self.total_terms as f64))
    }
}

/// The four preprocessing variants of one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    indexes: Vec<InvertedIndex>,
}

impl IndexSet {
    pub fn build(corpus: &[Document]) -> Result<Self> {
        let indexes = IndexVariant::ALL
            .into_iter()
            .map(|v| build_index(corpus, v))
            .collect::<Result<_>>()?;
        Ok(IndexSet { indexes })
    }

    pub(crate) fn from_indexes(mut indexes: Vec<InvertedIndex>) -> Result<Self> {
        indexes.sort_by_key(|i| i.variant());
        let variants: Vec<_> = indexes.iter().map(|i| i.variant()).collect();
        if variants != IndexVariant::ALL {
            return Err(Error::Invalid(format!("index set must hold all four variants, found {variants:?}")));
        }
        Ok(IndexSet { indexes })
    }

    pub fn get(&self, variant: IndexVariant) -> &InvertedIndex {
        self.indexes
            .iter()
            .find(|i| i.variant() == variant)
            .expect("index set holds every variant")
    }

    pub fn iter(&self) -> impl Iterator<Item = &InvertedIndex> {
        self.indexes.iter()
    }
}
