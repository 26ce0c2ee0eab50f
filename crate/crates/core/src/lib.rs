//! Interpolating Nadaraya–Watson classification with the singular kernel
//! `‖x − xᵢ‖^{−β}`.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the predictor
//! itself, samplers for the synthetic distributions used to study its
//! overfitting behaviour, the closed-form reference constants, a handful of
//! distributional verifiers and a single-threaded Monte Carlo harness. IO,
//! parallel execution and the command-line front end live in `nw-lab`.
//!
//! Enable the `std` feature (default) to use the platform math library, or
//! `libm` for bare `no_std` targets.
#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("nw-core requires either the `std` or the `libm` feature");

mod error;
pub(crate) mod math;

pub mod constants;
pub mod harness;
pub mod ks;
pub mod predictor;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use harness::{
    beta_sweep, clean_error_estimate, noisy_input_sweep, profile_classification, CurveRow,
    ErrorCurve, ExperimentConfig, OverfittingProfile, Sequential, TaskRunner,
};
pub use predictor::{
    knn_predict, predict, predict_batch, raw_score, Label, LabeledPoint, PredictorConfig,
    ScoreResult, Sign, TieBreak, TrainingSet,
};
pub use rng::{Stream, StreamRng, StreamTag};
pub use sampling::{DistributionSpec, GroundTruth, NoiseSpec};
