use std::cmp::Ordering;
use std::fmt;

use crate::scalar::Scalar;

/// Topic identifier. Orders numerically when both ids are integers, with
/// integers before non-integers, and lexicographically otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TopicId(String);

impl TopicId {
    pub fn new(id: impl Into<String>) -> Self {
        TopicId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric(&self) -> Option<u64> {
        self.0.parse().ok()
    }
}

impl Ord for TopicId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for TopicId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TopicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TopicId {
    fn from(s: &str) -> Self {
        TopicId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc<F> {
    pub docno: String,
    pub score: F,
}

/// Scored documents for one topic, in canonical order: score descending,
/// ties by ascending docno.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking<F> {
    pub topic: TopicId,
    pub entries: Vec<ScoredDoc<F>>,
    pub depth: usize,
}

/// Score descending, then docno ascending.
pub fn canonical_order<F: Scalar>(a: &ScoredDoc<F>, b: &ScoredDoc<F>) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.docno.cmp(&b.docno))
}

impl<F: Scalar> Ranking<F> {
    /// Sorts canonically and truncates to `depth`. Docnos must be unique.
    pub fn from_scored(topic: TopicId, mut entries: Vec<ScoredDoc<F>>, depth: usize) -> Self {
        entries.sort_by(canonical_order);
        entries.truncate(depth);
        Ranking { topic, entries, depth }
    }

    pub fn empty(topic: TopicId, depth: usize) -> Self {
        Ranking {
            topic,
            entries: Vec::new(),
            depth,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn docnos(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.docno.as_str())
    }
}
