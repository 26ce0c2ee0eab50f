//! Closed-form reference constants of the overfitting regimes.

use crate::error::{check_param, Error, Result};
use crate::math;

/// Exponent `c(β/d) = (8·2^{β/d} / (β/d − 1))^{1/(β/d − 1)}` of the lower
/// bound `C₁·p^{c(β/d)}` on the clean error in the tempered regime β > d.
///
/// Diverges as the ratio approaches 1 from above.
pub fn tempered_constant(ratio: f64) -> Result<f64> {
    check_param(
        "beta/d",
        ratio,
        ratio.is_finite() && ratio > 1.0,
        "a ratio above 1",
    )?;
    let excess = ratio - 1.0;
    let base = 8.0 * math::powf(2.0, ratio) / excess;
    Ok(math::powf(base, 1.0 / excess))
}

/// Largest inner mass `c ≤ (1 − β/d) / (2400·(1 + R/r)^β)` for which the
/// ball-plus-annulus construction provably overfits catastrophically when
/// β < d.
pub fn catastrophic_mass_bound(beta: f64, dim: usize, r: f64, outer_radius: f64) -> Result<f64> {
    crate::predictor::validate_beta(beta)?;
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let d = dim as f64;
    if beta >= d {
        return Err(Error::BetaNotBelowDim { beta, dim });
    }
    check_param("r", r, r.is_finite() && r > 0.0, "a positive radius")?;
    if !(outer_radius.is_finite() && outer_radius > 3.0 * r) {
        return Err(Error::AnnulusTooNarrow {
            r,
            outer: outer_radius,
        });
    }
    Ok((1.0 - beta / d) / (2400.0 * math::powf(1.0 + outer_radius / r, beta)))
}
