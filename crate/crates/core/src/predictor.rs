//! The interpolating Nadaraya–Watson classifier
//!
//! ```text
//! ĥ_β(x) = yᵢ                          if x = xᵢ for some training point
//!        = sign(Σᵢ yᵢ · ‖x − xᵢ‖^{−β})  otherwise
//! ```
//!
//! Scores are always accumulated in log domain. Each class keeps its own
//! log-sum-exp of `−β·log‖x − xᵢ‖`, shifted by the class maximum, so β in the
//! hundreds neither overflows nor underflows. A 1-nearest-neighbour style
//! baseline ([`knn_predict`]) is provided for comparison.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math;

/// A binary class label, `−1` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    /// `−1` or `+1`.
    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Label {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }

    /// Parses `−1` / `+1`; anything else is rejected.
    pub fn from_value(v: i8) -> Option<Label> {
        match v {
            -1 => Some(Label::Neg),
            1 => Some(Label::Pos),
            _ => None,
        }
    }
}

/// A single training example.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: Label,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: Label) -> Self {
        LabeledPoint { x, y }
    }
}

/// An immutable-by-convention sample of labelled points in `dim` dimensions.
///
/// Coordinates are stored row-major in one flat buffer. Every coordinate is
/// checked to be finite when the point is added.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<Label>,
}

impl TrainingSet {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_capacity(dim, 0)
    }

    pub fn with_capacity(dim: usize, capacity: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(TrainingSet {
            dim,
            coords: Vec::with_capacity(dim * capacity),
            labels: Vec::with_capacity(capacity),
        })
    }

    pub fn from_points<I>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = LabeledPoint>,
    {
        let mut set = TrainingSet::new(dim)?;
        for p in points {
            set.push(&p.x, p.y)?;
        }
        Ok(set)
    }

    /// Builds a one-dimensional set from `(x, y)` pairs, `y` given as ±1.
    ///
    /// Panics if a label is not ±1; intended for tests and examples.
    pub fn from_1d(pairs: &[(f64, i8)]) -> Result<Self> {
        let mut set = TrainingSet::with_capacity(1, pairs.len())?;
        for &(x, y) in pairs {
            set.push(&[x], Label::from_value(y).expect("label must be ±1"))?;
        }
        Ok(set)
    }

    pub fn push(&mut self, x: &[f64], y: Label) -> Result<()> {
        validate_query(x, self.dim)?;
        self.coords.extend_from_slice(x);
        self.labels.push(y);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Flat row-major coordinate buffer.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], Label)> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .zip(self.labels.iter().copied())
    }

    /// Returns a copy with every label replaced by `f(index, label)`.
    pub fn map_labels(&self, mut f: impl FnMut(usize, Label) -> Label) -> TrainingSet {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, &y)| f(i, y))
            .collect();
        TrainingSet {
            dim: self.dim,
            coords: self.coords.clone(),
            labels,
        }
    }

    /// Returns a copy with every coordinate of point `i` rewritten by `f`.
    /// Fails if `f` produces a non-finite coordinate.
    pub fn map_coords(&self, mut f: impl FnMut(usize, &mut [f64])) -> Result<TrainingSet> {
        let mut coords = self.coords.clone();
        for (i, row) in coords.chunks_exact_mut(self.dim).enumerate() {
            f(i, row);
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate(j));
            }
        }
        Ok(TrainingSet {
            dim: self.dim,
            coords,
            labels: self.labels.clone(),
        })
    }

    /// The subset at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> TrainingSet {
        let mut out = TrainingSet {
            dim: self.dim,
            coords: Vec::with_capacity(indices.len() * self.dim),
            labels: Vec::with_capacity(indices.len()),
        };
        for &i in indices {
            out.coords.extend_from_slice(self.point(i));
            out.labels.push(self.labels[i]);
        }
        out
    }
}

/// How an exactly zero score is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    PlusOne,
    MinusOne,
}

impl TieBreak {
    #[inline]
    pub fn label(self) -> Label {
        match self {
            TieBreak::PlusOne => Label::Pos,
            TieBreak::MinusOne => Label::Neg,
        }
    }
}

/// Exponent and tie policy of the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub beta: f64,
    pub tie_break: TieBreak,
}

impl PredictorConfig {
    pub fn new(beta: f64) -> Result<Self> {
        validate_beta(beta)?;
        Ok(PredictorConfig {
            beta,
            tie_break: TieBreak::default(),
        })
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn label(self) -> Option<Label> {
        match self {
            Sign::Neg => Some(Label::Neg),
            Sign::Zero => None,
            Sign::Pos => Some(Label::Pos),
        }
    }
}

impl From<Label> for Sign {
    fn from(y: Label) -> Sign {
        match y {
            Label::Neg => Sign::Neg,
            Label::Pos => Sign::Pos,
        }
    }
}

/// Sign and log-magnitude of `Σᵢ yᵢ‖x − xᵢ‖^{−β}`.
///
/// `log_magnitude` is `+∞` on an exact hit and `−∞` on an exact tie.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreResult {
    pub sign: Sign,
    pub log_magnitude: f64,
    pub exact_hit: Option<usize>,
}

impl ScoreResult {
    /// Resolves the score to a label.
    pub fn resolve(&self, tie_break: TieBreak) -> Label {
        self.sign.label().unwrap_or(tie_break.label())
    }
}

pub(crate) fn validate_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

fn validate_query(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    match x.iter().position(|v| !v.is_finite()) {
        Some(j) => Err(Error::NonFiniteCoordinate(j)),
        None => Ok(()),
    }
}

fn validate(x: &[f64], set: &TrainingSet) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    validate_query(x, set.dim)
}

/// `log‖a − b‖`, computed from the squared sum without a square root.
///
/// Falls back to a rescaled sum when the squared sum underflows or
/// overflows, so any two distinct finite points get a finite log-distance.
#[inline]
pub(crate) fn log_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sumsq = 0.0;
    for (u, v) in a.iter().zip(b) {
        let t = u - v;
        sumsq += t * t;
    }
    if sumsq.is_normal() {
        0.5 * math::ln(sumsq)
    } else {
        log_distance_rescaled(a, b, sumsq)
    }
}

#[cold]
fn log_distance_rescaled(a: &[f64], b: &[f64], sumsq: f64) -> f64 {
    // On the overflow side differences are taken on halved coordinates so
    // they stay finite; on the underflow side they are exact.
    let halve = sumsq.is_infinite();
    let diff = |u: f64, v: f64| if halve { 0.5 * u - 0.5 * v } else { u - v };
    let scale = a
        .iter()
        .zip(b)
        .map(|(&u, &v)| diff(u, v).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(&u, &v)| {
            let t = diff(u, v) / scale;
            t * t
        })
        .sum();
    let shift = if halve { core::f64::consts::LN_2 } else { 0.0 };
    shift + math::ln(scale) + 0.5 * math::ln(sum)
}

/// Per-class log-distances from one query to every training point.
///
/// Built once per query and then scored for any number of exponents, which is
/// how the experiment harness evaluates a whole β grid on a shared sample.
#[derive(Debug, Clone, Default)]
pub(crate) struct QueryDistances {
    pos: Vec<f64>,
    neg: Vec<f64>,
    pos_min: f64,
    neg_min: f64,
    hit: Option<(usize, Label)>,
}

impl QueryDistances {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Recomputes for query `x`; inputs must already be validated.
    pub(crate) fn fill(&mut self, x: &[f64], set: &TrainingSet) {
        self.pos.clear();
        self.neg.clear();
        self.pos_min = f64::INFINITY;
        self.neg_min = f64::INFINITY;
        self.hit = set
            .iter()
            .position(|(p, _)| bitwise_eq(p, x))
            .map(|i| (i, set.label(i)));
        if self.hit.is_some() {
            return;
        }
        for (i, (p, y)) in set.iter().enumerate() {
            let ld = log_distance(x, p);
            if ld == f64::NEG_INFINITY {
                // only reachable for coordinates differing in the sign of zero
                self.hit = Some((i, y));
                return;
            }
            match y {
                Label::Pos => {
                    self.pos.push(ld);
                    self.pos_min = self.pos_min.min(ld);
                }
                Label::Neg => {
                    self.neg.push(ld);
                    self.neg_min = self.neg_min.min(ld);
                }
            }
        }
    }

    pub(crate) fn score(&self, beta: f64) -> ScoreResult {
        if let Some((i, y)) = self.hit {
            return ScoreResult {
                sign: y.into(),
                log_magnitude: f64::INFINITY,
                exact_hit: Some(i),
            };
        }
        let lp = class_log_sum(&self.pos, self.pos_min, beta);
        let ln = class_log_sum(&self.neg, self.neg_min, beta);
        let (sign, hi, lo) = match lp.partial_cmp(&ln) {
            Some(Ordering::Greater) => (Sign::Pos, lp, ln),
            Some(Ordering::Less) => (Sign::Neg, ln, lp),
            _ => {
                return ScoreResult {
                    sign: Sign::Zero,
                    log_magnitude: f64::NEG_INFINITY,
                    exact_hit: None,
                }
            }
        };
        ScoreResult {
            sign,
            log_magnitude: hi + math::ln_1p(-math::exp(lo - hi)),
            exact_hit: None,
        }
    }
}

/// `log Σ exp(−β·ldᵢ)`, shifted by the class maximum `−β·min ld`.
#[inline]
fn class_log_sum(log_dists: &[f64], min: f64, beta: f64) -> f64 {
    if log_dists.is_empty() {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &ld in log_dists {
        acc += math::exp(-beta * (ld - min));
    }
    -beta * min + math::ln(acc)
}

#[inline]
fn bitwise_eq(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| u.to_bits() == v.to_bits())
}

/// Sign and log-magnitude of the kernel score at `x`.
pub fn raw_score(x: &[f64], set: &TrainingSet, beta: f64) -> Result<ScoreResult> {
    validate(x, set)?;
    validate_beta(beta)?;
    let mut qd = QueryDistances::new();
    qd.fill(x, set);
    Ok(qd.score(beta))
}

/// Classifies `x`; exact training inputs return their own label.
pub fn predict(x: &[f64], set: &TrainingSet, cfg: &PredictorConfig) -> Result<Label> {
    Ok(raw_score(x, set, cfg.beta)?.resolve(cfg.tie_break))
}

/// [`predict`] over a list of queries. The first invalid query fails the
/// whole batch and is reported by index.
pub fn predict_batch<Q: AsRef<[f64]>>(
    queries: &[Q],
    set: &TrainingSet,
    cfg: &PredictorConfig,
) -> Result<Vec<Label>> {
    validate_beta(cfg.beta)?;
    if queries.is_empty() {
        return Ok(Vec::new());
    }
    let mut qd = QueryDistances::new();
    queries
        .iter()
        .enumerate()
        .map(|(index, q)| {
            let q = q.as_ref();
            validate(q, set).map_err(|e| Error::Query {
                index,
                source: Box::new(e),
            })?;
            qd.fill(q, set);
            Ok(qd.score(cfg.beta).resolve(cfg.tie_break))
        })
        .collect()
}

/// Majority vote of the `k` nearest training labels.
///
/// Equal distances are ordered by training index; a split vote goes to `+1`.
pub fn knn_predict(x: &[f64], set: &TrainingSet, k: usize) -> Result<Label> {
    validate(x, set)?;
    if k == 0 || k > set.len() {
        return Err(Error::KOutOfRange { k, len: set.len() });
    }
    let mut dist: Vec<(f64, usize)> = set
        .iter()
        .enumerate()
        .map(|(i, (p, _))| {
            let d2: f64 = p.iter().zip(x).map(|(u, v)| (u - v) * (u - v)).sum();
            (d2, i)
        })
        .collect();
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, by_dist);
    }
    let vote: i64 = dist[..k]
        .iter()
        .map(|&(_, i)| i64::from(set.label(i).value()))
        .sum();
    Ok(if vote >= 0 { Label::Pos } else { Label::Neg })
}
