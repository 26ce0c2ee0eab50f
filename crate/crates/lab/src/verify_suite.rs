//! The `nw verify` checks. Each prints as `name statistic op threshold
//! PASS|FAIL`.

use std::f64::consts::PI;
use std::fmt;

use anyhow::Result;
use nw_core::rng::{Stream, StreamTag};
use nw_core::verify::{
    exp_partial_sum_tail, knn_agreement, local_cdf_check, order_stat_representation_check,
    KnnAgreementConfig,
};
use nw_core::{predict_batch, DistributionSpec, Label, PredictorConfig, StreamRng, TrainingSet};
use rand::Rng;

/// Seed used by `nw verify` unless overridden.
pub const DEFAULT_VERIFY_SEED: u64 = 20_230_601;

pub const ORDER_STAT_PAIRS: [(usize, usize); 5] = [(1, 1), (10, 1), (10, 5), (100, 10), (100, 100)];
pub const TAIL_NS: [usize; 4] = [1, 5, 20, 100];
pub const INTERPOLATION_BETAS: [f64; 5] = [0.5, 1.0, 2.0, 8.0, 200.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    OrderStats,
    Tails,
    LocalCdf,
    KnnAgreement,
    Interpolation,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub statistic: f64,
    pub op: &'static str,
    pub threshold: f64,
    pub pass: bool,
}

fn num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.6}")
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.name,
            num(self.statistic),
            self.op,
            num(self.threshold),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn rng(seed: u64, index: u64) -> StreamRng {
    Stream::new(seed, StreamTag::Verify, index).rng()
}

/// KS comparison per `(m, i)` pair; a failing pair gets one retry on a
/// fresh stream.
pub fn order_stats(seed: u64) -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    for (k, &(m, i)) in ORDER_STAT_PAIRS.iter().enumerate() {
        let mut report =
            order_stat_representation_check(m, i, 10_000, &mut rng(seed, 2 * k as u64))?;
        let mut attempts = 1;
        if !report.pass {
            report =
                order_stat_representation_check(m, i, 10_000, &mut rng(seed, 2 * k as u64 + 1))?;
            attempts = 2;
        }
        lines.push(CheckLine {
            name: format!("order-stats[m={m},i={i},attempts={attempts}].ks"),
            statistic: report.statistic,
            op: "<",
            threshold: report.threshold,
            pass: report.pass,
        });
    }
    Ok(lines)
}

pub fn tails(seed: u64) -> Result<Vec<CheckLine>> {
    TAIL_NS
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let r = exp_partial_sum_tail(n, 100_000, &mut rng(seed, 100 + k as u64))?;
            Ok(CheckLine {
                name: format!("tails[n={n}].abs_error_vs_exact"),
                statistic: (r.empirical_prob - r.exact_prob).abs(),
                op: "<",
                threshold: r.band,
                pass: r.pass,
            })
        })
        .collect()
}

/// Balls of unit volume in d = 1, 2, 3, each at β ∈ {d/2, d, 2d}.
pub fn local_cdf(seed: u64) -> Result<Vec<CheckLine>> {
    let u_grid = [0.005, 0.01, 0.02, 0.05, 0.1];
    let mut lines = Vec::new();
    for d in 1..=3usize {
        let volume = [2.0, PI, 4.0 * PI / 3.0][d - 1];
        let r = f64::powf(volume, -1.0 / d as f64);
        let ball = DistributionSpec::BallAnnulus {
            r,
            outer_radius: 4.0 * r,
            inner_mass: 1.0,
            dim: d,
        };
        for (j, beta) in [0.5 * d as f64, d as f64, 2.0 * d as f64]
            .into_iter()
            .enumerate()
        {
            let report = local_cdf_check(
                &ball,
                beta,
                &u_grid,
                1_000_000,
                &mut rng(seed, 200 + 3 * d as u64 + j as u64),
            )?;
            let violations = report.points.iter().filter(|p| !p.pass).count();
            lines.push(CheckLine {
                name: format!("local-cdf[d={d},beta={beta}].violations"),
                statistic: violations as f64,
                op: "==",
                threshold: 0.0,
                pass: report.pass,
            });
        }
    }
    Ok(lines)
}

pub fn knn(seed: u64) -> Result<Vec<CheckLine>> {
    let d = 2;
    let base = KnnAgreementConfig {
        distribution: DistributionSpec::UnitCube { dim: d },
        beta: 200.0 * d as f64,
        m: 500,
        n_queries: 1000,
        k: 1,
        flip_prob: 0.5,
    };
    let r = knn_agreement(&base, &mut rng(seed, 300))?;
    let mut lines = vec![CheckLine {
        name: format!("knn-agreement[d={d},beta={},k=1].rate", base.beta),
        statistic: r.rate,
        op: ">=",
        threshold: 0.99,
        pass: r.rate >= 0.99,
    }];

    // agreement should grow with β in the local regime
    let mean_rate = |beta: f64| -> Result<f64> {
        let cfg = KnnAgreementConfig {
            beta,
            m: 200,
            n_queries: 200,
            ..base
        };
        let mut total = 0.0;
        for s in 0..20 {
            total += knn_agreement(&cfg, &mut rng(seed, 400 + s))?.rate;
        }
        Ok(total / 20.0)
    };
    let diff = mean_rate(4.0 * d as f64)? - mean_rate(1.1 * d as f64)?;
    lines.push(CheckLine {
        name: format!("knn-agreement[d={d}].rate(beta=4d)-rate(beta=1.1d)"),
        statistic: diff,
        op: ">=",
        threshold: 0.0,
        pass: diff >= 0.0,
    });
    Ok(lines)
}

/// A training set of `m` points uniform in `[0, 1]^dim` with fair-coin
/// labels.
pub fn random_training_set<R: Rng>(m: usize, dim: usize, rng: &mut R) -> Result<TrainingSet> {
    let mut set = TrainingSet::with_capacity(dim, m)?;
    let mut x = vec![0.0; dim];
    for _ in 0..m {
        x.iter_mut().for_each(|v| *v = rng.random());
        let y = if rng.random::<bool>() {
            Label::Pos
        } else {
            Label::Neg
        };
        set.push(&x, y)?;
    }
    Ok(set)
}

/// True when the classifier reproduces every training label at `beta`.
pub fn interpolates(set: &TrainingSet, beta: f64) -> Result<bool> {
    let points: Vec<&[f64]> = (0..set.len()).map(|i| set.point(i)).collect();
    let predicted = predict_batch(&points, set, &PredictorConfig::new(beta)?)?;
    Ok(predicted == set.labels())
}

/// `n_sets` random sets with d ∈ {1, 2, 3} and m ≤ 500, each checked at
/// every exponent of [`INTERPOLATION_BETAS`].
pub fn interpolation(seed: u64, n_sets: usize) -> Result<Vec<CheckLine>> {
    let mut passed = 0;
    for s in 0..n_sets {
        let mut r = rng(seed, 1000 + s as u64);
        let dim = r.random_range(1..=3);
        let m = r.random_range(1..=500);
        let set = random_training_set(m, dim, &mut r)?;
        let mut ok = true;
        for beta in INTERPOLATION_BETAS {
            ok &= interpolates(&set, beta)?;
        }
        passed += usize::from(ok);
    }
    Ok(vec![CheckLine {
        name: "interpolation.sets_reproduced".into(),
        statistic: passed as f64,
        op: "==",
        threshold: n_sets as f64,
        pass: passed == n_sets,
    }])
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckLine>> {
    Ok(match suite {
        Suite::OrderStats => order_stats(seed)?,
        Suite::Tails => tails(seed)?,
        Suite::LocalCdf => local_cdf(seed)?,
        Suite::KnnAgreement => knn(seed)?,
        Suite::Interpolation => interpolation(seed, 100)?,
        Suite::All => {
            let mut all = order_stats(seed)?;
            all.extend(tails(seed)?);
            all.extend(local_cdf(seed)?);
            all.extend(knn(seed)?);
            all.extend(interpolation(seed, 100)?);
            all
        }
    })
}
