//! Gamma function on the float backend (Lanczos approximation, g = 7).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
// Published coefficient digits kept verbatim.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
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

/// Gamma(x) for real x; poles at nonpositive integers return infinity/NaN
/// through the reflection formula's sine factor.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// Gamma(num) / Gamma(den), both arguments positive.
pub fn gamma_ratio(num: f64, den: f64) -> f64 {
    debug_assert!(num > 0.0 && den > 0.0);
    gamma(num) / gamma(den)
}
