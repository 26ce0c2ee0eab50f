#![allow(clippy::excessive_precision)]

//! Closed-form constants against 50-digit reference values (mpmath,
//! `mp.dps = 50`), compared to 12 significant digits.

use nw_core::constants::{catastrophic_mass_bound, tempered_constant};

fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const TEMPERED: [(f64, f64); 20] = [
    (1.05, 2.535301200456458803e50),
    (1.1, 2.199023255552e22),
    (1.2, 6553600000.0),
    (1.25, 33554432.0),
    (1.5, 2048.0),
    (1.75, 118.33365748917498963),
    (2.0, 32.0),
    (2.5, 9.6913098284380781808),
    (3.0, 5.6568542494923801952),
    (4.0, 3.4943218589451954762),
    (5.0, 2.8284271247461900976),
    (6.0, 2.5238293779207729977),
    (8.0, 2.2507063934462717534),
    (10.0, 2.1320341627809488428),
    (12.0, 2.0692996597711214532),
    (16.0, 2.0086236748221515186),
    (20.0, 1.9819920606939008152),
    (32.0, 1.9577811108522340713),
    (50.0, 1.9548348610685801753),
    (64.0, 1.9569604566066301305),
];

// (beta, d, r, R, bound)
const CATASTROPHIC: [(f64, usize, f64, f64, f64); 20] = [
    (0.5, 1, 1.0, 4.0, 9.316949906249123735e-5),
    (0.1, 1, 1.0, 4.0, 3.1925247094529422626e-4),
    (0.9, 1, 1.0, 4.0, 9.7884911924001583826e-6),
    (0.5, 2, 1.0, 4.0, 1.3975424859373685603e-4),
    (1.0, 2, 1.0, 4.0, 4.1666666666666666667e-5),
    (1.5, 2, 1.0, 4.0, 9.316949906249123735e-6),
    (1.0, 3, 1.0, 3.5, 6.1728395061728395062e-5),
    (2.0, 3, 1.0, 3.5, 6.858710562414266118e-6),
    (2.5, 3, 0.25, 1.0, 1.2422599874998831647e-6),
    (0.25, 1, 0.25, 1.0, 2.089813453051318825e-4),
    (0.5, 1, 0.25, 1.0, 9.316949906249123735e-5),
    (0.75, 1, 0.25, 1.0, 3.1153099608775427956e-5),
    (1.0, 2, 0.25, 1.0, 4.1666666666666666667e-5),
    (1.5, 2, 0.5, 2.0, 9.316949906249123735e-6),
    (3.0, 4, 1.0, 10.0, 7.8261958427247683446e-8),
    (0.01, 1, 1.0, 100.0, 3.9389524590363496397e-4),
    (5.0, 10, 1.0, 4.0, 6.6666666666666666667e-8),
    (9.0, 10, 1.0, 4.0, 2.1333333333333333333e-11),
    (0.3, 3, 2.0, 7.0, 2.3881825108749130092e-4),
    (1.2, 2, 1.0, 3.01, 3.1482956004460036853e-5),
];

#[test]
fn tempered_constant_matches_reference() {
    for (ratio, expected) in TEMPERED {
        let got = tempered_constant(ratio).unwrap();
        assert!(
            rel_err(got, expected) < 1e-12,
            "ratio {ratio}: {got} vs {expected}"
        );
    }
}

#[test]
fn tempered_constant_diverges_near_one() {
    assert!(tempered_constant(1.001).unwrap() > 1e3);
    let mut prev = tempered_constant(1.05).unwrap();
    for r in [1.1, 1.2, 1.5, 2.0, 4.0, 16.0] {
        let c = tempered_constant(r).unwrap();
        assert!(c < prev);
        prev = c;
    }
}

#[test]
fn catastrophic_bound_matches_reference() {
    for (beta, d, r, outer, expected) in CATASTROPHIC {
        let got = catastrophic_mass_bound(beta, d, r, outer).unwrap();
        assert!(
            rel_err(got, expected) < 1e-12,
            "({beta}, {d}, {r}, {outer}): {got} vs {expected}"
        );
    }
}

#[test]
fn catastrophic_bound_vanishes_at_beta_equal_d() {
    let near = catastrophic_mass_bound(1.0 - 1e-9, 1, 1.0, 4.0).unwrap();
    assert!(near > 0.0 && near < 1e-12);
}
