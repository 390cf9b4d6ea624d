//! Two-parameter Mittag-Leffler function E_{α,β}(z) for real arguments.
//!
//! Two independent evaluation routes are used:
//!
//! * the power series Σ z^k / Γ(αk + β) with compensated summation, accepted only
//!   while its cancellation error estimate stays below the target accuracy;
//! * for negative arguments, the inverse Laplace transform of s^{α-β}/(s^α + x)
//!   collapsed onto the branch cut, plus the pole residues when 1 < α ≤ 2.
//!
//! Arguments outside both validated regions are rejected with the error estimate
//! the series achieved.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{gamma_sign, ln_gamma, rgamma};
use super::quadrature;
use crate::error::{Error, Result};
use crate::order::FractionalOrder;

/// Absolute accuracy (relative for |E| > 1) every accepted evaluation must meet.
const TARGET_ACCURACY: f64 = 1e-11;

/// Rounding error allowance per unit of Σ|term| in the series.
const SERIES_ROUNDING: f64 = 4.0 * f64::EPSILON;

const QUAD_ABS_TOL: f64 = 1e-14;
const QUAD_REL_TOL: f64 = 1e-13;
const QUAD_MAX_SEGMENTS: usize = 4000;

/// Evaluation controls for [`mittag_leffler`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlSeriesConfig {
    /// Series truncation: stop once a term falls below this times max(1, |sum|).
    pub term_tolerance: f64,
    pub max_terms: usize,
    /// |z| above which the series route is not attempted.
    pub argument_switch_radius: f64,
}

impl Default for MlSeriesConfig {
    fn default() -> Self {
        MlSeriesConfig { term_tolerance: 1e-15, max_terms: 10_000, argument_switch_radius: 50.0 }
    }
}

impl MlSeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.term_tolerance > 0.0) || self.max_terms < 1 || !(self.argument_switch_radius > 0.0)
        {
            return Err(Error::config(format!("invalid Mittag-Leffler configuration {self:?}")));
        }
        Ok(())
    }
}

/// Outcome of the raw power series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEvaluation {
    pub value: f64,
    /// Estimated absolute error (rounding in the presence of cancellation plus truncation).
    pub error_estimate: f64,
    pub terms: usize,
}

/// Evaluates E_{α,β}(z) for real z.
///
/// E_{α,β}(0) is exactly 1/Γ(β); E_{1,1} is routed to `exp`.
pub fn mittag_leffler(alpha: FractionalOrder, beta: f64, z: f64, cfg: &MlSeriesConfig) -> Result<f64> {
    cfg.validate()?;
    let a = alpha.value();
    if a <= 0.0 {
        return Err(Error::argument("Mittag-Leffler requires alpha > 0"));
    }
    if !beta.is_finite() || !z.is_finite() {
        return Err(Error::argument(format!("nonfinite Mittag-Leffler argument (beta={beta}, z={z})")));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if a == 1.0 && beta == 1.0 {
        return Ok(z.exp());
    }

    let mut achieved = f64::INFINITY;
    if z.abs() <= cfg.argument_switch_radius {
        match mittag_leffler_series(alpha, beta, z, cfg) {
            Ok(s) if s.error_estimate <= TARGET_ACCURACY * s.value.abs().max(1.0) => {
                return Ok(s.value)
            }
            Ok(s) => achieved = s.error_estimate,
            Err(Error::NonConvergent { achieved: e, .. }) => achieved = e,
            Err(e) => return Err(e),
        }
    }

    if z < 0.0 {
        if a == 1.0 && beta == beta.floor() && beta >= 1.0 {
            return Ok(exp_recurrence(beta as u32, z));
        }
        if a <= 2.0 && a != 1.0 {
            if beta < a + 1.0 {
                return mittag_leffler_negative_axis(alpha, beta, -z);
            }
            // E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z lowers β into range
            let lower = mittag_leffler(alpha, beta - a, z, cfg)?;
            return Ok((lower - rgamma(beta - a)) / z);
        }
    }
    Err(Error::NonConvergent { what: "Mittag-Leffler evaluation", achieved })
}

/// Raw power series with Kahan summation. Fails when `max_terms` is exhausted.
pub fn mittag_leffler_series(
    alpha: FractionalOrder,
    beta: f64,
    z: f64,
    cfg: &MlSeriesConfig,
) -> Result<SeriesEvaluation> {
    let a = alpha.value();
    let x = z.abs();
    // index of the largest term, after which the series decreases monotonically
    let peak = if x > 0.0 { x.powf(1.0 / a) / a } else { 0.0 };
    let ln_x = x.ln();

    let mut sum = 0.0;
    let mut carry = 0.0;
    let mut abs_sum = 0.0;
    let mut small_run = 0;
    let mut last = f64::INFINITY;
    for k in 0..cfg.max_terms {
        let arg = a * k as f64 + beta;
        let term = if k == 0 {
            rgamma(beta)
        } else if arg < 160.0 && (k as f64) * ln_x < 700.0 {
            z.powi(k as i32) * rgamma(arg)
        } else {
            let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 } * gamma_sign(arg);
            match ln_gamma(arg) {
                Ok(lg) => sign * ((k as f64) * ln_x - lg).exp(),
                Err(_) => 0.0,
            }
        };
        // Kahan-Babuska step
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        abs_sum += term.abs();
        last = term.abs();

        if (k as f64) > peak && term.abs() <= cfg.term_tolerance * sum.abs().max(1.0) {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesEvaluation {
                    value: sum,
                    error_estimate: SERIES_ROUNDING * abs_sum + term.abs(),
                    terms: k + 1,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergent {
        what: "Mittag-Leffler series",
        achieved: last.max(SERIES_ROUNDING * abs_sum),
    })
}

/// E_{α,β}(-x) for x > 0 by collapsing the Bromwich inversion of
/// s^{α-β} / (s^α + x) onto the negative real axis.
///
/// Valid for 0 < α ≤ 2, α ≠ 1 and β < α + 1. For α > 1 the two complex poles
/// s = x^{1/α} e^{±iπ/α} contribute (2/α) Re[s^{1-β} e^s].
pub fn mittag_leffler_negative_axis(alpha: FractionalOrder, beta: f64, x: f64) -> Result<f64> {
    let a = alpha.value();
    if !(a > 0.0 && a <= 2.0) || a == 1.0 || beta >= a + 1.0 || !(x > 0.0) {
        return Err(Error::Scope(format!(
            "negative-axis Mittag-Leffler needs 0<alpha<=2, alpha!=1, beta<alpha+1, x>0 (alpha={a}, beta={beta}, x={x})"
        )));
    }

    let cut = |r: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let num = Complex64::from_polar(r.powf(a - beta), -PI * (a - beta));
        let den = Complex64::from_polar(r.powf(a), -PI * a) + x;
        (-r).exp() * (num / den).im
    };

    // near-resonance of the denominator sits at r^α ≈ x
    let r_break = x.powf(1.0 / a);

    // [0, r_break] with r = s^p, which removes the r^{α-β} endpoint singularity
    let p = 1.0 / (a - beta + 1.0);
    let s_break = r_break.powf(1.0 / p);
    let head = quadrature::integrate(
        |s| {
            let r = s.powf(p);
            cut(r) * p * s.powf(p - 1.0)
        },
        0.0,
        s_break,
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
        QUAD_MAX_SEGMENTS,
    );
    // [r_break, ∞) with r = r_break + s/(1-s)
    let tail = quadrature::integrate(
        |s| {
            let one_minus = 1.0 - s;
            cut(r_break + s / one_minus) / (one_minus * one_minus)
        },
        0.0,
        1.0,
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
        QUAD_MAX_SEGMENTS,
    );
    if !head.converged || !tail.converged {
        return Err(Error::NonConvergent {
            what: "Mittag-Leffler branch-cut integral",
            achieved: (head.error + tail.error) / PI,
        });
    }
    let mut value = (head.value + tail.value) / PI;

    if a > 1.0 {
        let pole = Complex64::from_polar(r_break, PI / a);
        let residue = pole.exp() * pole.powf(1.0 - beta);
        value += 2.0 / a * residue.re;
    }
    Ok(value)
}

/// E_{1,n}(z) from e^z via E_{1,k+1}(z) = (E_{1,k}(z) - 1/Γ(k)) / z.
fn exp_recurrence(n: u32, z: f64) -> f64 {
    let mut e = z.exp();
    let mut factorial = 1.0;
    for k in 1..n {
        e = (e - 1.0 / factorial) / z;
        factorial *= k as f64;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    fn ml(a: f64, b: f64, z: f64) -> f64 {
        mittag_leffler(order(a), b, z, &MlSeriesConfig::default()).unwrap()
    }

    #[test]
    fn exponential_case() {
        assert_abs_diff_eq!(ml(1.0, 1.0, 1.0), std::f64::consts::E, epsilon = 1e-15);
    }

    #[test]
    fn zero_argument_is_reciprocal_gamma() {
        assert_eq!(ml(0.9, 1.0, 0.0), 1.0);
        assert_abs_diff_eq!(ml(0.9, 0.5, 0.0), 1.0 / PI.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn cosine_zero() {
        let t = PI / 2.0;
        assert!(ml(2.0, 1.0, -t * t).abs() <= 1e-10);
    }

    #[test]
    fn e12_matches_closed_form() {
        // E_{1,2}(z) = (e^z - 1)/z, both on the series side and the recurrence side
        for z in [-0.5, -3.0, -30.0, -200.0] {
            let exact = (f64::exp(z) - 1.0) / z;
            assert_abs_diff_eq!(ml(1.0, 2.0, z), exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn large_positive_argument_rejected() {
        let err = mittag_leffler(order(0.5), 1.0, 80.0, &MlSeriesConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonConvergent { .. }));
    }

    #[test]
    fn exhausted_terms_are_reported() {
        let cfg = MlSeriesConfig { max_terms: 3, ..MlSeriesConfig::default() };
        let err = mittag_leffler_series(order(0.8), 1.0, -4.0, &cfg).unwrap_err();
        match err {
            Error::NonConvergent { achieved, .. } => assert!(achieved > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_config() {
        let cfg = MlSeriesConfig { term_tolerance: 0.0, ..MlSeriesConfig::default() };
        assert!(mittag_leffler(order(0.5), 1.0, 1.0, &cfg).is_err());
    }
}
