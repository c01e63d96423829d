//! Gamma-function helpers for the Bessel kernels.
//!
//! Lanczos approximation (g = 7, 9 terms). Relative accuracy is ~1e-13 over
//! the ranges used here, which is well inside what the Bessel series need.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma(x) for x > 0.
pub fn gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection keeps the Lanczos argument >= 0.5
        PI / ((PI * x).sin() * gamma_pos(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut sum = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            sum += c / (z + i as f64);
        }
        let base = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * base.powf(z + 0.5) * (-base).exp() * sum
    }
}

/// 1/Gamma(x) for arbitrary real x; returns 0 at the poles (x = 0, -1, -2, ...).
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / gamma_pos(x)
    } else {
        if x == x.floor() {
            return 0.0;
        }
        // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
        (PI * x).sin() * gamma_pos(1.0 - x) / PI
    }
}

/// ln|Gamma(x)| together with the sign of Gamma(x), for arbitrary non-pole x.
#[cfg_attr(not(test), allow(dead_code))]
pub fn ln_gamma_sign(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (gamma_pos(x).ln(), 1.0)
    } else {
        // |Gamma(x)| = pi / (|sin(pi x)| Gamma(1-x))
        let s = (PI * x).sin();
        let ln = PI.ln() - s.abs().ln() - gamma_pos(1.0 - x).ln();
        (ln, s.signum())
    }
}
