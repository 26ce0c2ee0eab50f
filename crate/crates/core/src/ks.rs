//! Two-sample Kolmogorov–Smirnov statistic.

use alloc::vec::Vec;

/// `sup_t |F̂₁(t) − F̂₂(t)|` over the two empirical CDFs.
///
/// Ties within and across samples are stepped over together. Returns 0 when
/// either sample is empty. NaNs sort last.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut stat: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = if a[i].total_cmp(&b[j]).is_le() {
            a[i]
        } else {
            b[j]
        };
        while i < a.len() && a[i].total_cmp(&t).is_le() {
            i += 1;
        }
        while j < b.len() && b[j].total_cmp(&t).is_le() {
            j += 1;
        }
        stat = stat.max((i as f64 / na - j as f64 / nb).abs());
    }
    stat
}

/// Asymptotic two-sample critical value at the 1% level,
/// `1.63·√((n₁ + n₂)/(n₁·n₂))`.
pub fn ks_critical_1pct(n1: usize, n2: usize) -> f64 {
    let (n1, n2) = (n1 as f64, n2 as f64);
    1.63 * crate::math::sqrt((n1 + n2) / (n1 * n2))
}
