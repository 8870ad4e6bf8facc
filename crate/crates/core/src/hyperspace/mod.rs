//! The conditional configuration space searched by the optimizer: its
//! dimensions, validation, random sampling, and the numeric encoding fed to
//! the surrogate model.

mod point;

use std::fmt::Write as _;

use rand::Rng;

pub use point::{ConfigPoint, Value};

use crate::error::{Error, Result};
use crate::retrieval::{RetrievalConfig, RetrievalModel};
use crate::scalar::Scalar;

/// Length of an encoded point: two index booleans, a five-way one-hot model
/// block, the feedback flag, and fourteen scaled numeric slots.
pub const ENCODED_DIM: usize = 22;

/// Value given to numeric slots of inactive dimensions.
pub const INACTIVE_SLOT: f64 = 0.5;

const ONE_HOT_START: usize = 2;
const PRF_SLOT: usize = 7;
const NUMERIC_START: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimKind {
    Boolean,
    Categorical,
    Integer,
    Real,
}

impl DimKind {
    fn name(self) -> &'static str {
        match self {
            DimKind::Boolean => "boolean",
            DimKind::Categorical => "categorical",
            DimKind::Integer => "integer",
            DimKind::Real => "real",
        }
    }
}

/// When a dimension is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Always,
    Model(RetrievalModel),
    Prf,
}

impl Activation {
    pub fn holds(self, model: RetrievalModel, prf: bool) -> bool {
        match self {
            Activation::Always => true,
            Activation::Model(m) => m == model,
            Activation::Prf => prf,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: &'static str,
    pub kind: DimKind,
    /// Bounds for integer and real dimensions; unused otherwise.
    pub lo: f64,
    pub hi: f64,
    pub activation: Activation,
}

impl Dimension {
    const fn new(name: &'static str, kind: DimKind, lo: f64, hi: f64, activation: Activation) -> Self {
        Dimension {
            name,
            kind,
            lo,
            hi,
            activation,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, DimKind::Integer | DimKind::Real)
    }

    fn range_text(&self) -> String {
        match self.kind {
            DimKind::Boolean => "{false,true}".into(),
            DimKind::Categorical => {
                let names: Vec<_> = RetrievalModel::ALL.iter().map(|m| m.name()).collect();
                format!("{{{}}}", names.join(","))
            }
            DimKind::Integer => format!("{{{}..{}}}", self.lo, self.hi),
            DimKind::Real => format!("[{},{}]", self.lo, self.hi),
        }
    }

    fn activation_text(&self) -> String {
        match self.activation {
            Activation::Always => "always".into(),
            Activation::Model(m) => format!("rm={m}"),
            Activation::Prf => "prf=true".into(),
        }
    }

    /// Min-max scaling onto [0, 1]; a collapsed range maps to 0.
    fn scale(&self, v: f64) -> f64 {
        if self.hi > self.lo {
            (v - self.lo) / (self.hi - self.lo)
        } else {
            0.0
        }
    }

    fn midpoint(&self) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        match self.kind {
            DimKind::Integer => mid.floor(),
            _ => mid,
        }
    }
}

/// The fixed eighteen-dimensional space. Only numeric ranges can change.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDef {
    dims: Vec<Dimension>,
}

impl Default for SpaceDef {
    fn default() -> Self {
        Self::standard()
    }
}

impl SpaceDef {
    pub fn standard() -> Self {
        use Activation::{Always, Model, Prf};
        use DimKind::*;
        use RetrievalModel::*;
        let dims = vec![
            Dimension::new("stopper", Boolean, 0.0, 1.0, Always),
            Dimension::new("stemmer", Boolean, 0.0, 1.0, Always),
            Dimension::new("rm", Categorical, 0.0, 4.0, Always),
            Dimension::new("tfidf_k1", Real, 1.0, 2.0, Model(Tfidf)),
            Dimension::new("tfidf_b", Real, 0.0, 1.0, Model(Tfidf)),
            Dimension::new("bm25_k1", Real, 1.0, 10.0, Model(Bm25)),
            Dimension::new("bm25_k3", Real, 1.0, 10.0, Model(Bm25)),
            Dimension::new("bm25_b", Real, 0.0, 1.0, Model(Bm25)),
            Dimension::new("lambda_doc", Real, 0.0, 1.0, Model(LmJm)),
            Dimension::new("lambda_col", Real, 0.0, 1.0, Model(LmJm)),
            Dimension::new("mu_dir", Real, 0.0, 3000.0, Model(LmDir)),
            Dimension::new("mu_ts", Real, 0.0, 3000.0, Model(LmTs)),
            Dimension::new("lambda_ts", Real, 0.0, 1.0, Model(LmTs)),
            Dimension::new("prf", Boolean, 0.0, 1.0, Always),
            Dimension::new("fbDocs", Integer, 1.0, 50.0, Prf),
            Dimension::new("fbTerms", Integer, 1.0, 50.0, Prf),
            Dimension::new("fbMu", Real, 0.0, 3000.0, Prf),
            Dimension::new("fbOrigWeight", Real, 0.0, 1.0, Prf),
        ];
        SpaceDef { dims }
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dims.iter().find(|d| d.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.dims.iter().map(|d| d.name)
    }

    fn numeric(&self) -> impl Iterator<Item = &Dimension> {
        self.dims.iter().filter(|d| d.is_numeric())
    }

    /// Narrows or moves a numeric range. Integer bounds must be whole.
    pub fn set_range(&mut self, name: &str, lo: f64, hi: f64) -> Result<()> {
        let dim = self
            .dims
            .iter_mut()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Invalid(format!("unknown dimension {name:?}")))?;
        if !dim.is_numeric() {
            return Err(Error::Invalid(format!("{name} has no numeric range")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Invalid(format!("bad range [{lo},{hi}] for {name}")));
        }
        if dim.kind == DimKind::Integer && (lo.fract() != 0.0 || hi.fract() != 0.0 || lo < 1.0) {
            return Err(Error::Invalid(format!("{name} needs whole bounds >= 1")));
        }
        dim.lo = lo;
        dim.hi = hi;
        Ok(())
    }

    /// Applies `name=lo,hi` lines (`#` comments and blank lines allowed).
    pub fn with_ranges(mut self, text: &str) -> Result<Self> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::parse(i + 1, format!("expected name=lo,hi, found {line:?}"));
            let (name, range) = line.split_once('=').ok_or_else(bad)?;
            let (lo, hi) = range.split_once(',').ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            self.set_range(name.trim(), lo, hi)
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(self)
    }

    /// Reference listing: one `name<TAB>kind<TAB>range<TAB>active` row per
    /// dimension.
    pub fn describe(&self) -> String {
        let mut out = String::from("# name\tkind\trange\tactive\n");
        for d in &self.dims {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", d.name, d.kind.name(), d.range_text(), d.activation_text());
        }
        out
    }

    /// Every out-of-range active value, by dimension name. Inactive values
    /// are not checked.
    pub fn violations<F: Scalar>(&self, point: &ConfigPoint<F>) -> Vec<String> {
        let mut out = Vec::new();
        for d in self.numeric() {
            if !point.is_active(d.name) {
                continue;
            }
            let v = point.numeric(d.name).expect("numeric dimension");
            let inside = v >= d.lo && v <= d.hi;
            let whole = d.kind != DimKind::Integer || v.fract() == 0.0;
            if !inside || !whole {
                out.push(format!("{} out of {}", d.name, d.range_text()));
            }
        }
        out
    }

    pub fn validate<F: Scalar>(&self, point: &ConfigPoint<F>) -> Result<()> {
        let v = self.violations(point);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidPoint(v))
        }
    }

    /// Draws the model and feedback flag uniformly, then the index booleans,
    /// then each active numeric dimension uniformly over its range (integers
    /// uniformly over their values). Inactive dimensions sit at their range
    /// midpoints.
    pub fn sample_random<F: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> ConfigPoint<F> {
        let model = RetrievalModel::ALL[rng.random_range(0..RetrievalModel::ALL.len())];
        let prf = rng.random_bool(0.5);
        let stopper = rng.random_bool(0.5);
        let stemmer = rng.random_bool(0.5);
        let mut point = ConfigPoint {
            stopper,
            stemmer,
            retrieval: RetrievalConfig {
                model,
                prf,
                ..RetrievalConfig::default()
            },
        };
        for d in self.numeric() {
            let v = if !d.activation.holds(model, prf) {
                d.midpoint()
            } else {
                match d.kind {
                    DimKind::Integer => rng.random_range(d.lo as i64..=d.hi as i64) as f64,
                    _ if d.hi > d.lo => rng.random_range(d.lo..=d.hi),
                    _ => d.lo,
                }
            };
            point.set_numeric(d.name, v);
        }
        point
    }

    /// Maps a valid point into [0,1]^22: booleans to {0,1}, the model to a
    /// one-hot block, numeric values min-max scaled, inactive numeric slots
    /// to 0.5.
    pub fn encode<F: Scalar>(&self, point: &ConfigPoint<F>) -> Result<EncodedPoint<F>> {
        self.validate(point)?;
        let bit = |b: bool| if b { F::one() } else { F::zero() };
        let mut x = vec![F::zero(); ENCODED_DIM];
        x[0] = bit(point.stopper);
        x[1] = bit(point.stemmer);
        x[ONE_HOT_START + point.retrieval.model.ordinal()] = F::one();
        x[PRF_SLOT] = bit(point.retrieval.prf);
        for (slot, d) in x[NUMERIC_START..].iter_mut().zip(self.numeric()) {
            *slot = if point.is_active(d.name) {
                F::lit(d.scale(point.numeric(d.name).expect("numeric dimension")))
            } else {
                F::lit(INACTIVE_SLOT)
            };
        }
        Ok(EncodedPoint(x))
    }
}

/// A configuration as a point in the unit hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPoint<F>(Vec<F>);

impl<F> EncodedPoint<F> {
    pub fn as_slice(&self) -> &[F] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<F> {
        self.0
    }
}

impl<F> AsRef<[F]> for EncodedPoint<F> {
    fn as_ref(&self) -> &[F] {
        &self.0
    }
}
