use alloc::boxed::Box;

/// Errors reported by the predictor, samplers and verifiers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("coordinate {0} is not finite")]
    NonFiniteCoordinate(usize),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("k = {k} is out of range 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("index {index} is out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("query {index}: {source}")]
    Query { index: usize, source: Box<Error> },
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("construction requires R > 3r (r = {r}, R = {outer})")]
    AnnulusTooNarrow { r: f64, outer: f64 },
    #[error("bound only defined for beta < d (beta = {beta}, d = {dim})")]
    BetaNotBelowDim { beta: f64, dim: usize },
    #[error("{0} must not be empty")]
    EmptyGrid(&'static str),
    #[error("interpolation self-check failed for repetition {rep}: {mismatches} training points mispredicted")]
    SelfCheck { rep: usize, mismatches: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
