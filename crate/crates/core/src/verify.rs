//! Monte Carlo checks of the distributional facts behind the regime analysis:
//! the exponential representation of uniform order statistics, concentration
//! of exponential partial sums, the local behaviour of the distance CDF and
//! the nearest-neighbour-like locality of the predictor for β > d.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{check_param, Error, Result};
use crate::ks::{ks_critical_1pct, ks_two_sample};
use crate::math;
use crate::predictor::{knn_predict, validate_beta, QueryDistances, TieBreak};
use crate::sampling::{flip_with_probability, DistributionSpec};
use crate::special::gamma_pq;

/// Outcome of a two-sample KS comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub n_trials: usize,
    pub threshold: f64,
    pub pass: bool,
}

/// Compares the `i`-th order statistic of `m` uniforms, drawn by sorting,
/// with `(E₁ + … + Eᵢ) / (E₁ + … + E_{m+1})` for i.i.d. standard
/// exponentials. Passes when the KS statistic is below the 1% critical value.
pub fn order_stat_representation_check<R: Rng + ?Sized>(
    m: usize,
    i: usize,
    n_trials: usize,
    rng: &mut R,
) -> Result<KsReport> {
    order_stat_check_with_denominator(m, i, n_trials, m + 1, rng)
}

/// Same as [`order_stat_representation_check`] with the number of
/// exponentials in the normalising sum made explicit.
pub(crate) fn order_stat_check_with_denominator<R: Rng + ?Sized>(
    m: usize,
    i: usize,
    n_trials: usize,
    denominator_terms: usize,
    rng: &mut R,
) -> Result<KsReport> {
    if m == 0 || i == 0 || i > m {
        return Err(Error::IndexOutOfRange { index: i, len: m });
    }
    check_param(
        "n_trials",
        n_trials as f64,
        n_trials >= 1000,
        "at least 1000 trials",
    )?;
    debug_assert!(denominator_terms >= i);

    let mut buf = vec![0.0; m];
    let sorted: Vec<f64> = (0..n_trials)
        .map(|_| {
            buf.iter_mut().for_each(|u| *u = rng.random());
            let (_, ith, _) = buf.select_nth_unstable_by(i - 1, f64::total_cmp);
            *ith
        })
        .collect();
    let spacings: Vec<f64> = (0..n_trials)
        .map(|_| {
            let mut partial = 0.0;
            let mut total = 0.0;
            for j in 1..=denominator_terms {
                let e: f64 = Exp1.sample(&mut *rng);
                total += e;
                if j == i {
                    partial = total;
                }
            }
            partial / total
        })
        .collect();

    let statistic = ks_two_sample(&sorted, &spacings);
    let threshold = ks_critical_1pct(n_trials, n_trials);
    Ok(KsReport {
        statistic,
        n_trials,
        threshold,
        pass: statistic < threshold,
    })
}

/// Monte Carlo vs exact probability that `E₁ + … + Eₙ` leaves `[n/2, 3n/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    pub n: usize,
    pub n_trials: usize,
    pub empirical_prob: f64,
    pub exact_prob: f64,
    /// Exact probability at `2n`, which must be smaller.
    pub exact_prob_doubled: f64,
    pub band: f64,
    pub pass: bool,
}

/// `P(n/2; n) + Q(3n/2; n)`: the Gamma(n, 1) mass outside `[n/2, 3n/2]`.
pub fn exact_tail_prob(n: usize) -> Result<f64> {
    check_param("n", n as f64, n >= 1, "a positive count")?;
    let a = n as f64;
    let (lower, _) = gamma_pq(a, 0.5 * a)?;
    let (_, upper) = gamma_pq(a, 1.5 * a)?;
    Ok(lower + upper)
}

/// Checks concentration of exponential partial sums against the exact
/// Gamma-law tail, and that the tail shrinks when `n` doubles.
pub fn exp_partial_sum_tail<R: Rng + ?Sized>(
    n: usize,
    n_trials: usize,
    rng: &mut R,
) -> Result<TailReport> {
    check_param(
        "n_trials",
        n_trials as f64,
        n_trials >= 1,
        "a positive count",
    )?;
    let exact_prob = exact_tail_prob(n)?;
    let exact_prob_doubled = exact_tail_prob(2 * n)?;
    let (lo, hi) = (0.5 * n as f64, 1.5 * n as f64);
    let outside = (0..n_trials)
        .filter(|_| {
            let s: f64 = (0..n).map(|_| -> f64 { Exp1.sample(&mut *rng) }).sum();
            s < lo || s > hi
        })
        .count();
    let empirical_prob = outside as f64 / n_trials as f64;
    let band = 4.0 * math::sqrt(exact_prob * (1.0 - exact_prob) / n_trials as f64) + 1e-4;
    let pass = (empirical_prob - exact_prob).abs() < band && exact_prob_doubled < exact_prob;
    Ok(TailReport {
        n,
        n_trials,
        empirical_prob,
        exact_prob,
        exact_prob_doubled,
        band,
        pass,
    })
}

/// One grid point of [`local_cdf_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCdfPoint {
    pub u: f64,
    pub empirical: f64,
    /// `(u/μ)^α`, the exact quantile for a uniform ball.
    pub exact: f64,
    /// `(2/(3μ))·u^α·(1 − ε)`.
    pub lower: f64,
    /// `(2/μ)·u^α·(1 + ε)`.
    pub upper: f64,
    /// Interval the empirical quantile must fall in for the exact identity,
    /// from the DKW inequality at confidence `1 − 10⁻⁶`.
    pub identity_range: (f64, f64),
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalCdfReport {
    pub density: f64,
    pub alpha: f64,
    pub points: Vec<LocalCdfPoint>,
    pub pass: bool,
}

const LOCAL_CDF_EPSILON: f64 = 0.05;

/// Quantiles of `W = V_d^α‖z‖^β` for `z` uniform on a ball centred at the
/// query (the origin), with `α = β/d`.
///
/// For every `u` the empirical quantile must lie in
/// `[(2/(3μ))u^α(1 − ε), (2/μ)u^α(1 + ε)]` with `ε = 0.05`, and must agree
/// with the exact `(u/μ)^α` up to quantile-estimation error.
pub fn local_cdf_check<R: Rng + ?Sized>(
    ball: &DistributionSpec,
    beta: f64,
    u_grid: &[f64],
    n_samples: usize,
    rng: &mut R,
) -> Result<LocalCdfReport> {
    let (r, dim) = match *ball {
        DistributionSpec::BallAnnulus {
            r,
            inner_mass: 1.0,
            dim,
            ..
        } => (r, dim),
        _ => {
            return Err(Error::InvalidParameter {
                name: "ball",
                value: ball.inner_mass(),
                expected: "a ball-annulus spec with inner mass 1",
            })
        }
    };
    ball.validate()?;
    validate_beta(beta)?;
    check_param(
        "n_samples",
        n_samples as f64,
        n_samples >= 1,
        "a positive count",
    )?;
    if u_grid.is_empty() {
        return Err(Error::EmptyGrid("u_grid"));
    }
    let d = dim as f64;
    let alpha = beta / d;
    let volume = math::unit_ball_volume(dim);
    let density = 1.0 / (volume * math::powf(r, d));
    let u_max = (math::powf(volume, alpha) * math::powf(r, beta)).min(1.0);
    for &u in u_grid {
        check_param(
            "u",
            u,
            (0.0..=u_max).contains(&u),
            "a level within the validity range",
        )?;
    }

    let v_alpha = math::powf(volume, alpha);
    let mut z = vec![0.0; dim];
    let mut w: Vec<f64> = (0..n_samples)
        .map(|_| {
            ball.sample_point(rng, &mut z);
            let n2: f64 = z.iter().map(|v| v * v).sum();
            v_alpha * math::powf(n2, 0.5 * beta)
        })
        .collect();
    w.sort_unstable_by(f64::total_cmp);

    // DKW at confidence 1 − 1e-6
    let eta = math::sqrt(math::ln(2.0e6) / (2.0 * n_samples as f64));
    let exact_quantile = |u: f64| math::powf(u.clamp(0.0, 1.0) / density, alpha);
    let points: Vec<LocalCdfPoint> = u_grid
        .iter()
        .map(|&u| {
            let empirical = empirical_quantile(&w, u);
            let exact = exact_quantile(u);
            let ua = math::powf(u, alpha);
            let lower = 2.0 / (3.0 * density) * ua * (1.0 - LOCAL_CDF_EPSILON);
            let upper = 2.0 / density * ua * (1.0 + LOCAL_CDF_EPSILON);
            let identity_range = if u == 0.0 {
                (0.0, 0.0)
            } else {
                (exact_quantile(u - eta), exact_quantile(u + eta))
            };
            let pass = empirical >= lower
                && empirical <= upper
                && empirical >= identity_range.0
                && empirical <= identity_range.1;
            LocalCdfPoint {
                u,
                empirical,
                exact,
                lower,
                upper,
                identity_range,
                pass,
            }
        })
        .collect();
    let pass = points.iter().all(|p| p.pass);
    Ok(LocalCdfReport {
        density,
        alpha,
        points,
        pass,
    })
}

/// `inf{w : F̂(w) ≥ u}` over a sorted sample; 0 at `u = 0`.
fn empirical_quantile(sorted: &[f64], u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let n = sorted.len();
    let k = math_ceil(u * n as f64).clamp(1, n);
    sorted[k - 1]
}

fn math_ceil(x: f64) -> usize {
    let t = x as usize;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

/// Parameters of a [`knn_agreement`] run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnAgreementConfig {
    pub distribution: DistributionSpec,
    pub beta: f64,
    pub m: usize,
    pub n_queries: usize,
    pub k: usize,
    /// Probability of flipping each training label, in `[0, 0.5]`.
    pub flip_prob: f64,
}

/// Agreement rate with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementReport {
    pub agreed: usize,
    pub n_queries: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Fraction of fresh queries on which the kernel classifier and the `k`-NN
/// vote agree, in the locality regime β > d.
pub fn knn_agreement<R: Rng + ?Sized>(
    cfg: &KnnAgreementConfig,
    rng: &mut R,
) -> Result<AgreementReport> {
    let dist = &cfg.distribution;
    dist.validate()?;
    validate_beta(cfg.beta)?;
    let d = dist.dim() as f64;
    check_param(
        "beta",
        cfg.beta,
        cfg.beta > d,
        "an exponent above the dimension",
    )?;
    check_param("m", cfg.m as f64, cfg.m >= 1, "a positive sample size")?;
    check_param(
        "n_queries",
        cfg.n_queries as f64,
        cfg.n_queries >= 1,
        "a positive count",
    )?;
    check_param(
        "flip_prob",
        cfg.flip_prob,
        (0.0..=0.5).contains(&cfg.flip_prob),
        "a probability in [0, 0.5]",
    )?;
    if cfg.k == 0 || cfg.k > cfg.m {
        return Err(Error::KOutOfRange {
            k: cfg.k,
            len: cfg.m,
        });
    }

    let clean = dist.sample(cfg.m, rng)?;
    let train = flip_with_probability(&clean, cfg.flip_prob, rng);
    let mut q = vec![0.0; dist.dim()];
    let mut qd = QueryDistances::new();
    let mut agreed = 0;
    for _ in 0..cfg.n_queries {
        dist.sample_point(rng, &mut q);
        qd.fill(&q, &train);
        let nw = qd.score(cfg.beta).resolve(TieBreak::PlusOne);
        if nw == knn_predict(&q, &train, cfg.k)? {
            agreed += 1;
        }
    }
    let (ci_low, ci_high) = wilson_interval(agreed, cfg.n_queries);
    Ok(AgreementReport {
        agreed,
        n_queries: cfg.n_queries,
        rate: agreed as f64 / cfg.n_queries as f64,
        ci_low,
        ci_high,
    })
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96;
    let n = n as f64;
    let phat = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * math::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Stream, StreamTag};

    fn rng(i: u64) -> crate::rng::StreamRng {
        Stream::new(20_240_601, StreamTag::Verify, i).rng()
    }

    #[test]
    fn order_stats_single_uniform() {
        let r = order_stat_representation_check(1, 1, 10_000, &mut rng(1)).unwrap();
        assert!(r.statistic < 0.023, "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn order_stats_m100_i10() {
        let r = order_stat_representation_check(100, 10, 10_000, &mut rng(2)).unwrap();
        assert!((r.threshold - 0.0231).abs() < 1e-4);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn order_stats_wrong_denominator_is_caught() {
        let r = order_stat_check_with_denominator(100, 10, 100_000, 100, &mut rng(3)).unwrap();
        assert!(!r.pass, "{r:?}");
    }

    #[test]
    fn order_stats_errors() {
        assert!(order_stat_representation_check(10, 0, 1000, &mut rng(4)).is_err());
        assert!(order_stat_representation_check(10, 11, 1000, &mut rng(4)).is_err());
        assert!(order_stat_representation_check(10, 3, 999, &mut rng(4)).is_err());
    }

    #[test]
    fn tail_n1_closed_form() {
        let exact = exact_tail_prob(1).unwrap();
        let closed = (1.0 - (-0.5f64).exp()) + (-1.5f64).exp();
        assert!((exact - closed).abs() < 1e-15);
        assert!((exact - 0.616_60).abs() < 1e-5);
    }

    #[test]
    fn tail_decays() {
        let t2 = exact_tail_prob(2).unwrap();
        let t20 = exact_tail_prob(20).unwrap();
        let t200 = exact_tail_prob(200).unwrap();
        assert!(t200 < t20 && t20 < t2);
    }

    #[test]
    fn local_cdf_unit_interval() {
        let ball = DistributionSpec::BallAnnulus {
            r: 1.0,
            outer_radius: 4.0,
            inner_mass: 1.0,
            dim: 1,
        };
        let rep = local_cdf_check(&ball, 1.0, &[0.0, 0.1], 1_000_000, &mut rng(5)).unwrap();
        assert_eq!(rep.density, 0.5);
        assert_eq!(rep.points[0].empirical, 0.0);
        assert!((rep.points[1].exact - 0.2).abs() < 1e-15);
        assert!((rep.points[1].empirical - 0.2).abs() < 0.01);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn local_cdf_rejects_bad_input() {
        let annulus = DistributionSpec::BallAnnulus {
            r: 1.0,
            outer_radius: 4.0,
            inner_mass: 0.5,
            dim: 1,
        };
        assert!(local_cdf_check(&annulus, 1.0, &[0.1], 100, &mut rng(6)).is_err());
        let ball = DistributionSpec::BallAnnulus {
            r: 0.1,
            outer_radius: 4.0,
            inner_mass: 1.0,
            dim: 1,
        };
        // validity range is 2·0.1 = 0.2
        assert!(local_cdf_check(&ball, 1.0, &[0.3], 100, &mut rng(6)).is_err());
        assert!(local_cdf_check(&ball, 1.0, &[], 100, &mut rng(6)).is_err());
    }

    #[test]
    fn knn_agreement_single_point() {
        let cfg = KnnAgreementConfig {
            distribution: DistributionSpec::UnitCube { dim: 2 },
            beta: 3.0,
            m: 1,
            n_queries: 200,
            k: 1,
            flip_prob: 0.5,
        };
        let r = knn_agreement(&cfg, &mut rng(7)).unwrap();
        assert_eq!(r.rate, 1.0);
    }

    #[test]
    fn knn_agreement_requires_locality_regime() {
        let cfg = KnnAgreementConfig {
            distribution: DistributionSpec::UnitCube { dim: 2 },
            beta: 2.0,
            m: 10,
            n_queries: 10,
            k: 1,
            flip_prob: 0.5,
        };
        assert!(knn_agreement(&cfg, &mut rng(8)).is_err());
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(990, 1000);
        assert!(lo < 0.99 && hi > 0.99 && lo > 0.98 && hi < 1.0);
        assert_eq!(wilson_interval(10, 10).1, 1.0);
    }
}
