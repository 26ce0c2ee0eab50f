//! The MNIST two-digit task: subset extraction and the β sweep on it.

use nw_core::harness::{aggregate_curve, score_test_set, RepOutcome};
use nw_core::rng::{Stream, StreamTag};
use nw_core::sampling::flip_labels;
use nw_core::{ErrorCurve, Label, NoiseSpec, TaskRunner, TieBreak, TrainingSet};
use rand::Rng;

use crate::idx::IdxTensor;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MnistError {
    #[error("digits must be distinct values in 0..=9 (got {0} and {1})")]
    BadDigits(u8, u8),
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("label tensor must be one-dimensional, found dims {0:?}")]
    LabelShape(Vec<usize>),
    #[error("digit {0} does not occur in the label file")]
    DigitAbsent(u8),
    #[error("sample size m = {m} exceeds the {available} available examples")]
    NotEnoughExamples { m: usize, available: usize },
    #[error("no held-out examples left for testing")]
    EmptyTestPool,
    #[error(transparent)]
    Core(#[from] nw_core::Error),
}

/// Keeps the examples labelled `digit_neg` (mapped to −1) or `digit_pos`
/// (+1), flattening each image and scaling pixels to `[0, 1]` by 1/255.
/// File order is preserved.
pub fn mnist_binary_subset(
    images: &IdxTensor,
    labels: &IdxTensor,
    digit_neg: u8,
    digit_pos: u8,
) -> Result<TrainingSet, MnistError> {
    if digit_neg == digit_pos || digit_neg > 9 || digit_pos > 9 {
        return Err(MnistError::BadDigits(digit_neg, digit_pos));
    }
    if labels.dims.len() != 1 {
        return Err(MnistError::LabelShape(labels.dims.clone()));
    }
    if images.len() != labels.len() {
        return Err(MnistError::CountMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }
    for digit in [digit_neg, digit_pos] {
        if !labels.data.contains(&digit) {
            return Err(MnistError::DigitAbsent(digit));
        }
    }
    let dim = images.item_size();
    let mut set = TrainingSet::new(dim)?;
    let mut row = vec![0.0; dim];
    for (i, &digit) in labels.data.iter().enumerate() {
        let y = if digit == digit_neg {
            Label::Neg
        } else if digit == digit_pos {
            Label::Pos
        } else {
            continue;
        };
        for (v, &px) in row.iter_mut().zip(images.item(i)) {
            *v = f64::from(px) / 255.0;
        }
        set.push(&row, y)?;
    }
    Ok(set)
}

/// Where clean test points come from.
#[derive(Debug, Clone, Copy)]
pub enum TestPool<'a> {
    /// A separate labelled split, such as the official test files.
    Separate(&'a TrainingSet),
    /// The training-pool examples not drawn into the repetition's sample.
    Holdout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MnistSweepConfig {
    pub m: usize,
    pub p_values: Vec<f64>,
    pub betas: Vec<f64>,
    pub reps: usize,
    pub n_test: usize,
    pub base_seed: u64,
    pub tie_break: TieBreak,
}

/// `k` distinct indices out of `0..n` (partial Fisher–Yates); all of them,
/// in order, when `k ≥ n`.
fn choose_indices<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    if k >= n {
        return idx;
    }
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Clean test error of the kernel classifier on the two-digit task.
///
/// Each repetition subsamples `m` training examples (all of them when `m`
/// equals the pool size), flips labels with probability `p` and scores up to
/// `n_test` clean test examples for every β.
pub fn mnist_sweep<R: TaskRunner>(
    pool: &TrainingSet,
    test_pool: TestPool<'_>,
    cfg: &MnistSweepConfig,
    runner: &R,
) -> Result<ErrorCurve, MnistError> {
    if cfg.m == 0 || cfg.m > pool.len() {
        return Err(MnistError::NotEnoughExamples {
            m: cfg.m,
            available: pool.len(),
        });
    }
    if matches!(test_pool, TestPool::Holdout) && cfg.m == pool.len() {
        return Err(MnistError::EmptyTestPool);
    }
    let noise: Vec<NoiseSpec> = cfg
        .p_values
        .iter()
        .map(|&p| NoiseSpec::new(p))
        .collect::<Result<_, _>>()?;
    for &b in &cfg.betas {
        nw_core::PredictorConfig::new(b)?;
    }
    if cfg.reps == 0 || cfg.n_test == 0 || cfg.betas.is_empty() || noise.is_empty() {
        return Err(nw_core::Error::EmptyGrid("reps, n_test, betas and p_values").into());
    }

    let reps = cfg.reps;
    let run_one = |task: usize| -> RepOutcome {
        let (pi, rep) = (task / reps, task % reps);
        let stream = |tag| Stream::new(cfg.base_seed, tag, rep as u64).rng();
        let chosen = choose_indices(pool.len(), pool.len(), &mut stream(StreamTag::Subsample));
        let (train_idx, rest) = chosen.split_at(cfg.m);
        let clean = pool.select(train_idx);
        let train = flip_labels(&clean, noise[pi], &mut stream(StreamTag::LabelFlips));
        let test = match test_pool {
            TestPool::Separate(t) => {
                let idx = choose_indices(t.len(), cfg.n_test, &mut stream(StreamTag::TestInputs));
                t.select(&idx)
            }
            TestPool::Holdout => {
                let take = cfg.n_test.min(rest.len());
                pool.select(&rest[..take])
            }
        };
        let scored = score_test_set(&train, &test, &cfg.betas, cfg.tie_break);
        let n = test.len() as f64;
        RepOutcome {
            errors: scored.errors.iter().map(|&e| e as f64 / n).collect(),
            ties: scored.ties,
            flip_rate: nw_core::sampling::label_disagreement(&clean, &train),
        }
    };
    let outcomes = runner.run(cfg.p_values.len() * reps, run_one);
    Ok(aggregate_curve(
        &cfg.betas,
        &cfg.p_values,
        cfg.m,
        reps,
        cfg.base_seed,
        &outcomes,
    ))
}
