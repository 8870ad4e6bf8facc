use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::index::IndexVariant;
use crate::retrieval::{RetrievalConfig, RetrievalModel};
use crate::scalar::Scalar;

use super::{Activation, SpaceDef};

/// One full assignment of the eighteen dimensions. Which values are read is
/// decided by `retrieval.model` and `retrieval.prf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigPoint<F> {
    pub stopper: bool,
    pub stemmer: bool,
    pub retrieval: RetrievalConfig<F>,
}

impl<F: Scalar> Default for ConfigPoint<F> {
    /// Full-text index, default retrieval configuration.
    fn default() -> Self {
        ConfigPoint {
            stopper: false,
            stemmer: false,
            retrieval: RetrievalConfig::default(),
        }
    }
}

/// A dimension's value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<F> {
    Bool(bool),
    Model(RetrievalModel),
    Int(u32),
    Real(F),
}

impl<F: Scalar> fmt::Display for Value<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Model(m) => write!(f, "{m}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{x}"),
        }
    }
}

impl<F: Scalar> ConfigPoint<F> {
    pub fn new(variant: IndexVariant, retrieval: RetrievalConfig<F>) -> Self {
        ConfigPoint {
            stopper: variant.stopper,
            stemmer: variant.stemmer,
            retrieval,
        }
    }

    pub fn variant(&self) -> IndexVariant {
        IndexVariant::new(self.stopper, self.stemmer)
    }

    /// Whether `name` is read under this point's model and feedback flag.
    /// Unknown names are inactive.
    pub fn is_active(&self, name: &str) -> bool {
        SpaceDef::standard()
            .dimension(name)
            .is_some_and(|d| d.activation.holds(self.retrieval.model, self.retrieval.prf))
    }

    pub fn is_active_in(&self, activation: Activation) -> bool {
        activation.holds(self.retrieval.model, self.retrieval.prf)
    }

    pub fn get(&self, name: &str) -> Option<Value<F>> {
        let r = &self.retrieval;
        Some(match name {
            "stopper" => Value::Bool(self.stopper),
            "stemmer" => Value::Bool(self.stemmer),
            "rm" => Value::Model(r.model),
            "prf" => Value::Bool(r.prf),
            "fbDocs" => Value::Int(r.fb_docs),
            "fbTerms" => Value::Int(r.fb_terms),
            _ => Value::Real(*self.real_ref(name)?),
        })
    }

    pub fn set(&mut self, name: &str, value: Value<F>) -> Result<()> {
        let mismatch = || Error::Invalid(format!("value {value} does not fit {name}"));
        match (name, value) {
            ("stopper", Value::Bool(b)) => self.stopper = b,
            ("stemmer", Value::Bool(b)) => self.stemmer = b,
            ("rm", Value::Model(m)) => self.retrieval.model = m,
            ("prf", Value::Bool(b)) => self.retrieval.prf = b,
            ("fbDocs", Value::Int(i)) => self.retrieval.fb_docs = i,
            ("fbTerms", Value::Int(i)) => self.retrieval.fb_terms = i,
            (_, Value::Real(x)) => *self.real_mut(name).ok_or_else(mismatch)? = x,
            _ => return Err(mismatch()),
        }
        Ok(())
    }

    /// Parses `raw` according to the type of dimension `name`.
    pub fn set_str(&mut self, name: &str, raw: &str) -> Result<()> {
        let raw = raw.trim();
        let bad = |what: &str| Error::Invalid(format!("{name}: expected {what}, found {raw:?}"));
        let value = match self.get(name) {
            None => return Err(Error::Invalid(format!("unknown key {name:?}"))),
            Some(Value::Bool(_)) => match raw.to_ascii_lowercase().as_str() {
                "true" | "1" => Value::Bool(true),
                "false" | "0" => Value::Bool(false),
                _ => return Err(bad("true or false")),
            },
            Some(Value::Model(_)) => Value::Model(raw.parse()?),
            Some(Value::Int(_)) => Value::Int(raw.parse().map_err(|_| bad("an integer"))?),
            Some(Value::Real(_)) => Value::Real(raw.parse().map_err(|_| bad("a number"))?),
        };
        self.set(name, value)
    }

    /// Numeric dimensions as `f64`, integers included.
    pub(crate) fn numeric(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            Value::Int(i) => Some(f64::from(i)),
            Value::Real(x) => Some(x.as_f64()),
            _ => None,
        }
    }

    pub(crate) fn set_numeric(&mut self, name: &str, v: f64) {
        match name {
            "fbDocs" => self.retrieval.fb_docs = v.round() as u32,
            "fbTerms" => self.retrieval.fb_terms = v.round() as u32,
            _ => *self.real_mut(name).expect("real dimension") = F::lit(v),
        }
    }

    fn real_ref(&self, name: &str) -> Option<&F> {
        let r = &self.retrieval;
        Some(match name {
            "tfidf_k1" => &r.tfidf_k1,
            "tfidf_b" => &r.tfidf_b,
            "bm25_k1" => &r.bm25_k1,
            "bm25_k3" => &r.bm25_k3,
            "bm25_b" => &r.bm25_b,
            "lambda_doc" => &r.lambda_doc,
            "lambda_col" => &r.lambda_col,
            "mu_dir" => &r.mu_dir,
            "mu_ts" => &r.mu_ts,
            "lambda_ts" => &r.lambda_ts,
            "fbMu" => &r.fb_mu,
            "fbOrigWeight" => &r.fb_orig_weight,
            _ => return None,
        })
    }

    fn real_mut(&mut self, name: &str) -> Option<&mut F> {
        let r = &mut self.retrieval;
        Some(match name {
            "tfidf_k1" => &mut r.tfidf_k1,
            "tfidf_b" => &mut r.tfidf_b,
            "bm25_k1" => &mut r.bm25_k1,
            "bm25_k3" => &mut r.bm25_k3,
            "bm25_b" => &mut r.bm25_b,
            "lambda_doc" => &mut r.lambda_doc,
            "lambda_col" => &mut r.lambda_col,
            "mu_dir" => &mut r.mu_dir,
            "mu_ts" => &mut r.mu_ts,
            "lambda_ts" => &mut r.lambda_ts,
            "fbMu" => &mut r.fb_mu,
            "fbOrigWeight" => &mut r.fb_orig_weight,
            _ => return None,
        })
    }

    fn pairs(&self) -> impl Iterator<Item = String> + '_ {
        SpaceDef::standard()
            .names()
            .map(|n| format!("{n}={}", self.get(n).expect("known dimension")))
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// All eighteen `key=value` lines in dimension order.
    pub fn to_kv(&self) -> String {
        self.pairs().map(|p| p + "\n").collect()
    }

    /// The same pairs on one line, comma separated.
    pub fn to_kv_inline(&self) -> String {
        self.pairs().collect::<Vec<_>>().join(",")
    }

    /// Reads `key=value` pairs separated by newlines or commas. `#` starts a
    /// comment. Keys not given keep their defaults; repeated keys are an
    /// error.
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut point = ConfigPoint::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            for pair in line.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| Error::parse(i + 1, format!("expected key=value, found {pair:?}")))?;
                let key = key.trim();
                if seen.contains(&key) {
                    return Err(Error::parse(i + 1, format!("duplicate key {key}")));
                }
                seen.push(key);
                point
                    .set_str(key, value)
                    .map_err(|e| Error::parse(i + 1, e.to_string()))?;
            }
        }
        Ok(point)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_kv(&text)
    }
}
