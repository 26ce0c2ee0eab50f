//! Monte Carlo estimation of the clean classification error across a grid of
//! exponents and label-noise levels.
//!
//! One repetition draws a training sample, optionally jitters its inputs,
//! flips labels and scores a fresh clean test sample for every β on the
//! grid. The training sample of repetition `r` is shared by all β and p (p
//! only changes the flip threshold applied to a shared stream), so
//! differences along the grid are not drowned in sampling noise.
//!
//! Repetitions are independent tasks dispatched through a [`TaskRunner`].
//! Results are gathered by task index, so the curve does not depend on the
//! runner or its thread count.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_param, Error, Result};
use crate::math;
use crate::predictor::{validate_beta, Label, QueryDistances, TieBreak, TrainingSet};
use crate::rng::{Stream, StreamTag};
use crate::sampling::{add_gaussian_input_noise, flip_with_probability, DistributionSpec};

/// One sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    /// Training sample size.
    pub m: usize,
    pub p_values: Vec<f64>,
    pub betas: Vec<f64>,
    pub reps: usize,
    pub n_test: usize,
    pub base_seed: u64,
    /// Standard deviation of Gaussian jitter added to every input coordinate.
    pub input_noise_sigma: f64,
    /// Whether test inputs are jittered as well. Their labels always come
    /// from the unjittered point.
    pub noisy_test_inputs: bool,
    pub tie_break: TieBreak,
}

impl ExperimentConfig {
    /// A config with 50 repetitions, 1000 test points, seed 0 and no input
    /// noise.
    pub fn new(
        distribution: DistributionSpec,
        m: usize,
        p_values: Vec<f64>,
        betas: Vec<f64>,
    ) -> Self {
        ExperimentConfig {
            distribution,
            m,
            p_values,
            betas,
            reps: 50,
            n_test: 1000,
            base_seed: 0,
            input_noise_sigma: 0.0,
            noisy_test_inputs: false,
            tie_break: TieBreak::PlusOne,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        check_param("m", self.m as f64, self.m >= 1, "a positive sample size")?;
        check_param("reps", self.reps as f64, self.reps >= 1, "a positive count")?;
        check_param(
            "n_test",
            self.n_test as f64,
            self.n_test >= 1,
            "a positive count",
        )?;
        check_param(
            "input_noise_sigma",
            self.input_noise_sigma,
            self.input_noise_sigma.is_finite() && self.input_noise_sigma >= 0.0,
            "a nonnegative standard deviation",
        )?;
        if self.p_values.is_empty() {
            return Err(Error::EmptyGrid("p_values"));
        }
        if self.betas.is_empty() {
            return Err(Error::EmptyGrid("betas"));
        }
        for &p in &self.p_values {
            check_param(
                "p",
                p,
                p > 0.0 && p < 0.49,
                "a flip probability in (0, 0.49)",
            )?;
        }
        for &b in &self.betas {
            validate_beta(b)?;
        }
        Ok(())
    }

    /// Every stream a repetition draws from, for auditing.
    pub fn streams(&self, rep: usize) -> [Stream; 5] {
        let s = |tag| Stream::new(self.base_seed, tag, rep as u64);
        [
            s(StreamTag::TrainInputs),
            s(StreamTag::TrainInputNoise),
            s(StreamTag::LabelFlips),
            s(StreamTag::TestInputs),
            s(StreamTag::TestInputNoise),
        ]
    }
}

/// Runs `n` independent tasks and returns their results by task index.
pub trait TaskRunner {
    fn run<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs tasks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl TaskRunner for Sequential {
    fn run<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(task).collect()
    }
}

/// Per-β results of one repetition at one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOutcome {
    pub errors: Vec<f64>,
    pub ties: Vec<u64>,
    /// Fraction of training labels flipped in this repetition.
    pub flip_rate: f64,
}

/// The noisy training sample of a repetition together with its clean labels.
#[derive(Debug, Clone)]
pub struct RepSample {
    pub train: TrainingSet,
    pub clean_labels: Vec<Label>,
    /// Test inputs with their clean labels.
    pub test: TrainingSet,
}

/// Draws the training and test samples of repetition `rep` at noise level `p`.
pub fn draw_rep(cfg: &ExperimentConfig, p: f64, rep: usize) -> Result<RepSample> {
    let [train_s, train_noise_s, flip_s, test_s, test_noise_s] = cfg.streams(rep);
    let dist = &cfg.distribution;
    let clean = dist.sample(cfg.m, &mut train_s.rng())?;
    let jittered =
        add_gaussian_input_noise(&clean, cfg.input_noise_sigma, &mut train_noise_s.rng())?;
    let train = flip_with_probability(&jittered, p, &mut flip_s.rng());
    let mut test = dist.sample(cfg.n_test, &mut test_s.rng())?;
    if cfg.noisy_test_inputs {
        test = add_gaussian_input_noise(&test, cfg.input_noise_sigma, &mut test_noise_s.rng())?;
    }
    Ok(RepSample {
        train,
        clean_labels: clean.labels().to_vec(),
        test,
    })
}

/// Clean test error for every β of the config in one repetition.
pub fn evaluate_rep(cfg: &ExperimentConfig, p: f64, rep: usize) -> Result<RepOutcome> {
    let sample = draw_rep(cfg, p, rep)?;
    let flipped = interpolation_self_check(&sample.train, &sample.clean_labels)
        .map_err(|mismatches| Error::SelfCheck { rep, mismatches })?;
    let scored = score_test_set(&sample.train, &sample.test, &cfg.betas, cfg.tie_break);
    let n = sample.test.len() as f64;
    Ok(RepOutcome {
        errors: scored.errors.iter().map(|&e| e as f64 / n).collect(),
        ties: scored.ties,
        flip_rate: flipped as f64 / cfg.m as f64,
    })
}

/// Misclassification and tie counts per exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestScores {
    pub errors: Vec<usize>,
    pub ties: Vec<u64>,
}

/// Scores every test point against `train` for each β. Distances are computed
/// once per test point and shared across the exponents.
pub fn score_test_set(
    train: &TrainingSet,
    test: &TrainingSet,
    betas: &[f64],
    tie_break: TieBreak,
) -> TestScores {
    let mut errors = vec![0usize; betas.len()];
    let mut ties = vec![0u64; betas.len()];
    let mut qd = QueryDistances::new();
    for (x, truth) in test.iter() {
        qd.fill(x, train);
        for (b, &beta) in betas.iter().enumerate() {
            let score = qd.score(beta);
            if score.sign.label().is_none() {
                ties[b] += 1;
            }
            if score.resolve(tie_break) != truth {
                errors[b] += 1;
            }
        }
    }
    TestScores { errors, ties }
}

/// Predicting on the training inputs must reproduce the (noisy) training
/// labels, so the disagreement with the clean labels is exactly the number
/// of flips. Returns that number, or the count of training points whose own
/// label was not reproduced.
pub fn interpolation_self_check(
    train: &TrainingSet,
    clean_labels: &[Label],
) -> core::result::Result<usize, usize> {
    let mut qd = QueryDistances::new();
    let mut disagreements = 0;
    let mut mismatches = 0;
    let mut flipped = 0;
    for (i, (x, noisy)) in train.iter().enumerate() {
        qd.fill(x, train);
        // any exponent: the interpolation branch decides
        let y = qd.score(1.0).resolve(TieBreak::PlusOne);
        disagreements += usize::from(y != clean_labels[i]);
        mismatches += usize::from(y != noisy);
        flipped += usize::from(noisy != clean_labels[i]);
    }
    if mismatches > 0 || disagreements != flipped {
        return Err(mismatches.max(1));
    }
    Ok(flipped)
}

/// Clean classification error of the kernel classifier at a single `(β, p)`.
pub fn clean_error_estimate(cfg: &ExperimentConfig, beta: f64, p: f64, rep: usize) -> Result<f64> {
    let single = ExperimentConfig {
        betas: vec![beta],
        p_values: vec![p],
        ..cfg.clone()
    };
    single.validate()?;
    Ok(evaluate_rep(&single, p, rep)?.errors[0])
}

/// Clean error of an arbitrary classifier trained on the same repetition
/// sample the kernel classifier would see.
pub fn clean_error_with<F>(cfg: &ExperimentConfig, p: f64, rep: usize, classify: F) -> Result<f64>
where
    F: Fn(&TrainingSet, &[f64]) -> Label,
{
    let sample = draw_rep(cfg, p, rep)?;
    let wrong = sample
        .test
        .iter()
        .filter(|(x, truth)| classify(&sample.train, x) != *truth)
        .count();
    Ok(wrong as f64 / cfg.n_test as f64)
}

/// One `(β, p)` point of an error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub beta: f64,
    pub p: f64,
    pub m: usize,
    pub reps: usize,
    pub mean_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub tie_count: u64,
}

/// Mean clean error with 95% normal-approximation intervals, ordered by
/// `(p, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub rows: Vec<CurveRow>,
    pub base_seed: u64,
}

impl ErrorCurve {
    pub fn get(&self, beta: f64, p: f64) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.beta == beta && r.p == p)
    }

    /// Distinct noise levels in ascending order.
    pub fn p_values(&self) -> Vec<f64> {
        let mut ps: Vec<f64> = self.rows.iter().map(|r| r.p).collect();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        ps
    }

    /// The β with the smallest mean error at noise level `p`; the smallest β
    /// wins ties.
    pub fn argmin_beta(&self, p: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.p == p)
            .fold(None, |best: Option<&CurveRow>, r| match best {
                Some(b) if b.mean_error <= r.mean_error => Some(b),
                _ => Some(r),
            })
            .map(|r| r.beta)
    }
}

fn sorted_grid(values: &[f64]) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    v
}

/// Mean and clipped `mean ± 1.96·s/√n` interval; zero width for one sample.
pub fn mean_ci(samples: &[f64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, mean, mean);
    }
    let var = samples.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
    let half = 1.96 * math::sqrt(var) / math::sqrt(n);
    let mean = mean.clamp(0.0, 1.0);
    (
        mean,
        (mean - half).clamp(0.0, mean),
        (mean + half).clamp(mean, 1.0),
    )
}

/// Runs every `(p, repetition)` task and aggregates the β × p grid.
pub fn beta_sweep<R: TaskRunner>(cfg: &ExperimentConfig, runner: &R) -> Result<ErrorCurve> {
    cfg.validate()?;
    let reps = cfg.reps;
    let outcomes: Vec<Result<RepOutcome>> = runner.run(cfg.p_values.len() * reps, |task| {
        evaluate_rep(cfg, cfg.p_values[task / reps], task % reps)
    });
    let outcomes: Vec<RepOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    Ok(aggregate_curve(
        &cfg.betas,
        &cfg.p_values,
        cfg.m,
        reps,
        cfg.base_seed,
        &outcomes,
    ))
}

/// Builds the curve from outcomes laid out p-major: `outcomes[pi * reps + r]`
/// holds repetition `r` at `p_values[pi]`, with errors in `betas` order.
pub fn aggregate_curve(
    betas: &[f64],
    p_values: &[f64],
    m: usize,
    reps: usize,
    base_seed: u64,
    outcomes: &[RepOutcome],
) -> ErrorCurve {
    let mut rows = Vec::with_capacity(p_values.len() * betas.len());
    for (pi, p) in sorted_grid(p_values) {
        let per_p = &outcomes[pi * reps..(pi + 1) * reps];
        for (bi, beta) in sorted_grid(betas) {
            let errs: Vec<f64> = per_p.iter().map(|o| o.errors[bi]).collect();
            let (mean_error, ci_low, ci_high) = mean_ci(&errs);
            rows.push(CurveRow {
                beta,
                p,
                m,
                reps,
                mean_error,
                ci_low,
                ci_high,
                tie_count: per_p.iter().map(|o| o.ties[bi]).sum(),
            });
        }
    }
    ErrorCurve { rows, base_seed }
}

/// Error curve and minimising exponent at one input-noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaResult {
    pub sigma: f64,
    pub curve: ErrorCurve,
    /// `(p, argmin β)` for every noise level.
    pub best_betas: Vec<(f64, f64)>,
}

/// A [`beta_sweep`] per input-noise level, ordered by σ.
pub fn noisy_input_sweep<R: TaskRunner>(
    cfg: &ExperimentConfig,
    sigmas: &[f64],
    runner: &R,
) -> Result<Vec<SigmaResult>> {
    if sigmas.is_empty() {
        return Err(Error::EmptyGrid("sigmas"));
    }
    sorted_grid(sigmas)
        .into_iter()
        .map(|(_, sigma)| {
            let at = ExperimentConfig {
                input_noise_sigma: sigma,
                ..cfg.clone()
            };
            let curve = beta_sweep(&at, runner)?;
            let best_betas = curve
                .p_values()
                .into_iter()
                .filter_map(|p| curve.argmin_beta(p).map(|b| (p, b)))
                .collect();
            Ok(SigmaResult {
                sigma,
                curve,
                best_betas,
            })
        })
        .collect()
}

/// Finite-sample reading of the overfitting regime at one exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverfittingProfile {
    CatastrophicLike,
    TemperedLike,
    BenignLike,
}

impl OverfittingProfile {
    pub fn as_str(self) -> &'static str {
        match self {
            OverfittingProfile::CatastrophicLike => "catastrophic-like",
            OverfittingProfile::TemperedLike => "tempered-like",
            OverfittingProfile::BenignLike => "benign-like",
        }
    }
}

/// Tags each β of a curve:
///
/// * catastrophic-like: error at the smallest p is at least `0.8·inner_mass`
///   and moves by less than 25% (relative) up to the largest p;
/// * benign-like: error at the largest p is below `0.25·p`;
/// * tempered-like: anything else.
pub fn profile_classification(
    curve: &ErrorCurve,
    inner_mass: f64,
) -> Result<Vec<(f64, OverfittingProfile)>> {
    let mut betas: Vec<f64> = curve.rows.iter().map(|r| r.beta).collect();
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    betas
        .into_iter()
        .map(|beta| {
            let mut rows: Vec<&CurveRow> = curve.rows.iter().filter(|r| r.beta == beta).collect();
            rows.sort_by(|a, b| a.p.total_cmp(&b.p));
            rows.dedup_by(|a, b| a.p == b.p);
            if rows.len() < 2 {
                return Err(Error::InvalidParameter {
                    name: "distinct p values",
                    value: rows.len() as f64,
                    expected: "at least 2 per beta",
                });
            }
            let lo = rows[0];
            let hi = rows[rows.len() - 1];
            let rel_change = if lo.mean_error > 0.0 {
                (hi.mean_error - lo.mean_error).abs() / lo.mean_error
            } else {
                f64::INFINITY
            };
            let tag = if lo.mean_error >= 0.8 * inner_mass && rel_change < 0.25 {
                OverfittingProfile::CatastrophicLike
            } else if hi.mean_error < 0.25 * hi.p {
                OverfittingProfile::BenignLike
            } else {
                OverfittingProfile::TemperedLike
            };
            Ok((beta, tag))
        })
        .collect()
}
