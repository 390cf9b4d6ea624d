//! Euler gamma via the Lanczos approximation (g = 7, nine coefficients) with
//! reflection for arguments below one half.

use std::f64::consts::PI;

use crate::error::{DomainError, Error, Result};

const LANCZOS_G: f64 = 7.0;

// Coefficients from the GNU Scientific Library / Numerical Recipes table.
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

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest n with (n - 1)! exactly representable as f64.
const EXACT_FACTORIAL_LIMIT: u32 = 23;

/// Returns Γ(x).
///
/// Poles at zero and the negative integers are reported as a domain error.
/// Positive integers up to 23 are evaluated as exact factorials.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::argument("gamma of NaN"));
    }
    if is_pole(x) {
        return Err(Error::Domain(DomainError::GammaPole(x)));
    }
    Ok(gamma_unchecked(x))
}

/// Returns 1/Γ(x), which is entire: zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x > 171.5 {
        return (-ln_gamma_unchecked(x)).exp();
    }
    1.0 / gamma_unchecked(x)
}

/// Returns ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::argument("ln_gamma of NaN"));
    }
    if is_pole(x) {
        return Err(Error::Domain(DomainError::GammaPole(x)));
    }
    Ok(ln_gamma_unchecked(x))
}

/// Sign of Γ(x) away from its poles.
pub(crate) fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || sin_pi(x) > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= EXACT_FACTORIAL_LIMIT as f64 {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let series = lanczos_series(z);
    // split the power so Γ(170) does not overflow in the intermediate
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * series
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI.ln() - sin_pi(x).abs().ln() - ln_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_series(z).ln()
}

fn lanczos_series(z: f64) -> f64 {
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64))
}

/// sin(πx) with exact argument reduction modulo 2.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (0.5 * x).round();
    // r in [-1, 1]; fold onto [-1/2, 1/2]
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}
