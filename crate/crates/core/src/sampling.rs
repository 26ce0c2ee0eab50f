//! Data distributions, their target rules and the two noise channels.
//!
//! Each [`DistributionSpec`] is a two-component mixture: an inner region
//! labelled `−1` carrying a small mass, and an outer region labelled `+1`.
//! All samplers are exact and rejection-free apart from guards against
//! floating-point rounding at region boundaries.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

use crate::error::{check_param, Error, Result};
use crate::math;
use crate::predictor::{Label, TrainingSet};

/// Height of the default cap, `√3/2`.
pub const SQRT_3_OVER_2: f64 = 0.866_025_403_784_438_6;

/// The target rule `f*` paired with a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroundTruth {
    /// `−1` on the open interval `(lo, hi)` of the first coordinate.
    InnerInterval {
        lo: f64,
        hi: f64,
    },
    /// `−1` where the third coordinate exceeds `height`.
    SphereCap {
        height: f64,
    },
    /// `−1` on the closed ball of the given radius around the origin.
    InnerBall {
        radius: f64,
    },
    Constant(Label),
}

impl GroundTruth {
    pub fn label(&self, x: &[f64]) -> Label {
        let neg = match *self {
            GroundTruth::InnerInterval { lo, hi } => x[0] > lo && x[0] < hi,
            GroundTruth::SphereCap { height } => x[2] > height,
            GroundTruth::InnerBall { radius } => norm_sq(x) <= radius * radius,
            GroundTruth::Constant(y) => return y,
        };
        if neg {
            Label::Neg
        } else {
            Label::Pos
        }
    }
}

/// A sampleable input distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    /// `inner_mass·Unif(0, ¼) + (1 − inner_mass)·Unif(¾, 1)` on the line.
    OneDMixture { inner_mass: f64 },
    /// Mixture on the unit sphere `S² ⊂ ℝ³`: uniform on the cap
    /// `{x₃ > cap_height}` with probability `cap_mass`, uniform on the rest
    /// of the sphere otherwise.
    SphereCap { cap_mass: f64, cap_height: f64 },
    /// With probability `inner_mass` uniform on `B(0, r)`, otherwise uniform
    /// on the annulus `3r ≤ ‖x‖ ≤ outer_radius` in `dim` dimensions.
    BallAnnulus {
        r: f64,
        outer_radius: f64,
        inner_mass: f64,
        dim: usize,
    },
    /// Uniform on `[0, 1]^dim` with a constant `+1` target.
    UnitCube { dim: usize },
}

impl DistributionSpec {
    /// The one-dimensional mixture with a tenth of the mass on `(0, ¼)`.
    pub fn default_1d_mixture() -> Self {
        DistributionSpec::OneDMixture { inner_mass: 0.1 }
    }

    /// A tenth of the mass on the cap `x₃ > √3/2`.
    pub fn default_sphere_cap() -> Self {
        DistributionSpec::SphereCap {
            cap_mass: 0.1,
            cap_height: SQRT_3_OVER_2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        match *self {
            DistributionSpec::OneDMixture { inner_mass } => check_param(
                "inner_mass",
                inner_mass,
                in_unit(inner_mass),
                "a value in (0, 1)",
            ),
            DistributionSpec::SphereCap {
                cap_mass,
                cap_height,
            } => {
                check_param("cap_mass", cap_mass, in_unit(cap_mass), "a value in (0, 1)")?;
                check_param(
                    "cap_height",
                    cap_height,
                    in_unit(cap_height),
                    "a value in (0, 1)",
                )
            }
            DistributionSpec::BallAnnulus {
                r,
                outer_radius,
                inner_mass,
                dim,
            } => {
                if dim == 0 {
                    return Err(Error::ZeroDimension);
                }
                check_param("r", r, r.is_finite() && r > 0.0, "a positive radius")?;
                check_param(
                    "inner_mass",
                    inner_mass,
                    inner_mass > 0.0 && inner_mass <= 1.0,
                    "a value in (0, 1]",
                )?;
                if !(outer_radius.is_finite() && outer_radius > 3.0 * r) {
                    return Err(Error::AnnulusTooNarrow {
                        r,
                        outer: outer_radius,
                    });
                }
                Ok(())
            }
            DistributionSpec::UnitCube { dim } => {
                if dim == 0 {
                    Err(Error::ZeroDimension)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            DistributionSpec::OneDMixture { .. } => 1,
            DistributionSpec::SphereCap { .. } => 3,
            DistributionSpec::BallAnnulus { dim, .. } | DistributionSpec::UnitCube { dim } => dim,
        }
    }

    /// Mass of the `−1` region.
    pub fn inner_mass(&self) -> f64 {
        match *self {
            DistributionSpec::OneDMixture { inner_mass } => inner_mass,
            DistributionSpec::SphereCap { cap_mass, .. } => cap_mass,
            DistributionSpec::BallAnnulus { inner_mass, .. } => inner_mass,
            DistributionSpec::UnitCube { .. } => 0.0,
        }
    }

    pub fn ground_truth(&self) -> GroundTruth {
        match *self {
            DistributionSpec::OneDMixture { .. } => {
                GroundTruth::InnerInterval { lo: 0.0, hi: 0.25 }
            }
            DistributionSpec::SphereCap { cap_height, .. } => {
                GroundTruth::SphereCap { height: cap_height }
            }
            DistributionSpec::BallAnnulus { r, .. } => GroundTruth::InnerBall { radius: r },
            DistributionSpec::UnitCube { .. } => GroundTruth::Constant(Label::Pos),
        }
    }

    /// Whether `x` lies in the support of the distribution.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match *self {
            DistributionSpec::OneDMixture { .. } => {
                (x[0] > 0.0 && x[0] < 0.25) || (x[0] > 0.75 && x[0] < 1.0)
            }
            DistributionSpec::SphereCap { .. } => (math::sqrt(norm_sq(x)) - 1.0).abs() <= 1e-12,
            DistributionSpec::BallAnnulus {
                r, outer_radius, ..
            } => {
                let n2 = norm_sq(x);
                n2 <= r * r || (n2 >= 9.0 * r * r && n2 <= outer_radius * outer_radius)
            }
            DistributionSpec::UnitCube { .. } => x.iter().all(|&v| (0.0..=1.0).contains(&v)),
        }
    }

    /// Draws one point into `out` and returns its clean label. The spec must
    /// have been validated.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Label {
        match *self {
            DistributionSpec::OneDMixture { inner_mass } => {
                let inner = rng.random::<f64>() < inner_mass;
                let (lo, hi) = if inner { (0.0, 0.25) } else { (0.75, 1.0) };
                out[0] = loop {
                    let u: f64 = Open01.sample(rng);
                    let v = lo + (hi - lo) * u;
                    if v > lo && v < hi {
                        break v;
                    }
                };
                if inner {
                    Label::Neg
                } else {
                    Label::Pos
                }
            }
            DistributionSpec::SphereCap {
                cap_mass,
                cap_height,
            } => {
                let in_cap = rng.random::<f64>() < cap_mass;
                let z = if in_cap {
                    loop {
                        let u: f64 = Open01.sample(rng);
                        let z = cap_height + (1.0 - cap_height) * u;
                        if z > cap_height && z < 1.0 {
                            break z;
                        }
                    }
                } else {
                    let u: f64 = rng.random();
                    (-1.0 + (1.0 + cap_height) * u).min(cap_height)
                };
                let phi = 2.0 * core::f64::consts::PI * rng.random::<f64>();
                let s = math::sqrt((1.0 - z * z).max(0.0));
                let (sin, cos) = math::sin_cos(phi);
                out[0] = s * cos;
                out[1] = s * sin;
                out[2] = z;
                if in_cap {
                    Label::Neg
                } else {
                    Label::Pos
                }
            }
            DistributionSpec::BallAnnulus {
                r,
                outer_radius,
                inner_mass,
                dim,
            } => {
                let inner = rng.random::<f64>() < inner_mass;
                let d = dim as f64;
                if inner {
                    loop {
                        let u: f64 = rng.random();
                        let radius = r * math::powf(u, 1.0 / d);
                        random_direction(rng, out);
                        out.iter_mut().for_each(|v| *v *= radius);
                        if norm_sq(out) <= r * r {
                            break;
                        }
                    }
                    Label::Neg
                } else {
                    let lo = math::powf(3.0 * r, d);
                    let hi = math::powf(outer_radius, d);
                    loop {
                        let u: f64 = rng.random();
                        let radius = math::powf(lo + (hi - lo) * u, 1.0 / d);
                        random_direction(rng, out);
                        out.iter_mut().for_each(|v| *v *= radius);
                        let n2 = norm_sq(out);
                        if n2 >= 9.0 * r * r && n2 <= outer_radius * outer_radius {
                            break;
                        }
                    }
                    Label::Pos
                }
            }
            DistributionSpec::UnitCube { .. } => {
                out.iter_mut().for_each(|v| *v = rng.random());
                Label::Pos
            }
        }
    }

    /// Draws `m` points with clean labels.
    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<TrainingSet> {
        self.validate()?;
        let dim = self.dim();
        let mut set = TrainingSet::with_capacity(dim, m)?;
        let mut buf = vec![0.0; dim];
        for _ in 0..m {
            let y = self.sample_point(rng, &mut buf);
            set.push(&buf, y)?;
        }
        Ok(set)
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        out.iter_mut()
            .for_each(|v| *v = StandardNormal.sample(&mut *rng));
        let n = math::sqrt(norm_sq(out));
        if n > 1e-150 {
            out.iter_mut().for_each(|v| *v /= n);
            return;
        }
    }
}

#[inline]
pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Training points of the one-dimensional mixture.
pub fn sample_1d_mixture<R: Rng + ?Sized>(
    m: usize,
    inner_mass: f64,
    rng: &mut R,
) -> Result<TrainingSet> {
    DistributionSpec::OneDMixture { inner_mass }.sample(m, rng)
}

/// Training points of the spherical-cap mixture in ℝ³.
pub fn sample_sphere_cap<R: Rng + ?Sized>(
    m: usize,
    cap_mass: f64,
    cap_height: f64,
    rng: &mut R,
) -> Result<TrainingSet> {
    DistributionSpec::SphereCap {
        cap_mass,
        cap_height,
    }
    .sample(m, rng)
}

/// Training points of the ball-plus-annulus mixture.
pub fn sample_ball_annulus<R: Rng + ?Sized>(
    m: usize,
    r: f64,
    outer_radius: f64,
    inner_mass: f64,
    dim: usize,
    rng: &mut R,
) -> Result<TrainingSet> {
    DistributionSpec::BallAnnulus {
        r,
        outer_radius,
        inner_mass,
        dim,
    }
    .sample(m, rng)
}

/// Independent label-flip probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    p: f64,
}

impl NoiseSpec {
    pub fn new(p: f64) -> Result<Self> {
        check_param(
            "p",
            p,
            p > 0.0 && p < 0.49,
            "a flip probability in (0, 0.49)",
        )?;
        Ok(NoiseSpec { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Negates each label independently with probability `p`.
///
/// One uniform is drawn per point and the label flips when it falls below
/// `p`, so a shared stream yields nested flip sets across noise levels.
pub fn flip_labels<R: Rng + ?Sized>(
    set: &TrainingSet,
    noise: NoiseSpec,
    rng: &mut R,
) -> TrainingSet {
    flip_with_probability(set, noise.p, rng)
}

pub(crate) fn flip_with_probability<R: Rng + ?Sized>(
    set: &TrainingSet,
    p: f64,
    rng: &mut R,
) -> TrainingSet {
    set.map_labels(|_, y| {
        if rng.random::<f64>() < p {
            y.flipped()
        } else {
            y
        }
    })
}

/// Adds `N(0, σ²)` to every coordinate; labels are kept.
pub fn add_gaussian_input_noise<R: Rng + ?Sized>(
    set: &TrainingSet,
    sigma: f64,
    rng: &mut R,
) -> Result<TrainingSet> {
    check_param(
        "sigma",
        sigma,
        sigma.is_finite() && sigma >= 0.0,
        "a nonnegative standard deviation",
    )?;
    if sigma == 0.0 {
        return Ok(set.clone());
    }
    set.map_coords(|_, row| {
        for v in row.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut *rng);
            *v += sigma * z;
        }
    })
}

/// Fraction of labels that differ between two equally sized sets.
pub fn label_disagreement(a: &TrainingSet, b: &TrainingSet) -> f64 {
    let diff = a
        .labels()
        .iter()
        .zip(b.labels())
        .filter(|(x, y)| x != y)
        .count();
    diff as f64 / a.len().max(1) as f64
}

/// Coordinates of every point, copied out as separate vectors.
pub fn points_of(set: &TrainingSet) -> Vec<Vec<f64>> {
    set.iter().map(|(p, _)| p.to_vec()).collect()
}
