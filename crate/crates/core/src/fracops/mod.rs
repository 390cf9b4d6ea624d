//! Fractional derivatives of a scalar function of the optimization variable `u`.
//!
//! Three operators are provided:
//!
//! * [`gl_derivative`]: the Grünwald–Letnikov backward-difference sum on a mesh of
//!   width `h`, usable for any sampled function;
//! * [`rl_poly_derivative`] and [`caputo_poly_derivative`]: closed-form power rules
//!   for polynomials, applied term-wise after expanding about the lower limit;
//! * [`caputo_taylor_series`]: the Caputo derivative written as a series in the
//!   integer derivatives of `f` at the evaluation point.
//!
//! All of them take their lower limit from a [`MemoryWindow`], whose effective
//! lower limit is `max(a, u - L)`. A fixed limit is `L = ∞`; a sliding short memory
//! is a finite `L`.

mod polynomial;

pub use polynomial::Polynomial;

use crate::error::{DomainError, Error, Result};
use crate::order::FractionalOrder;
use crate::specfun::{gamma, rgamma};

/// Default Grünwald–Letnikov mesh width.
pub const DEFAULT_GL_STEP: f64 = 1e-5;

/// Lower integration limit, memory length and discretization step of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryWindow {
    pub lower_limit: f64,
    /// `f64::INFINITY` keeps the lower limit fixed at `lower_limit`.
    pub memory_length: f64,
    pub step: f64,
}

impl MemoryWindow {
    pub fn new(lower_limit: f64, memory_length: f64, step: f64) -> Result<Self> {
        let w = MemoryWindow { lower_limit, memory_length, step };
        w.validate()?;
        Ok(w)
    }

    /// Fixed lower limit `a`, unbounded memory.
    pub fn fixed(lower_limit: f64) -> Self {
        MemoryWindow { lower_limit, memory_length: f64::INFINITY, step: DEFAULT_GL_STEP }
    }

    /// Sliding window of length `memory_length` with no fixed floor.
    pub fn sliding(memory_length: f64, step: f64) -> Result<Self> {
        MemoryWindow::new(f64::NEG_INFINITY, memory_length, step)
    }

    pub fn with_step(mut self, step: f64) -> Result<Self> {
        self.step = step;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::config(format!("window step must be positive, got {}", self.step)));
        }
        if self.memory_length.is_nan() || self.memory_length < 0.0 {
            return Err(Error::config("memory length must be nonnegative"));
        }
        if self.memory_length.is_finite() && self.memory_length < self.step {
            return Err(Error::config(format!(
                "finite memory length {} is shorter than the step {}",
                self.memory_length, self.step
            )));
        }
        let floor_ok = self.lower_limit.is_finite()
            || (self.lower_limit == f64::NEG_INFINITY && self.memory_length.is_finite());
        if !floor_ok {
            return Err(Error::config("an unbounded lower limit needs a finite memory length"));
        }
        Ok(())
    }

    pub fn is_fixed(&self) -> bool {
        self.memory_length.is_infinite()
    }

    /// `max(a, u - L)`
    pub fn effective_lower_limit(&self, u: f64) -> f64 {
        if self.memory_length.is_finite() {
            self.lower_limit.max(u - self.memory_length)
        } else {
            self.lower_limit
        }
    }
}

/// Which closed-form power rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FractionalOperator {
    RiemannLiouville,
    Caputo,
}

impl FractionalOperator {
    pub fn name(self) -> &'static str {
        match self {
            FractionalOperator::RiemannLiouville => "RL",
            FractionalOperator::Caputo => "Caputo",
        }
    }
}

fn check_above(u: f64, lower: f64) -> Result<f64> {
    if u > lower && u.is_finite() {
        Ok(u - lower)
    } else {
        Err(Error::Domain(DomainError::BelowLowerLimit { u, lower }))
    }
}

/// Grünwald–Letnikov derivative of order α at `u`.
///
/// The sum uses N = ⌈(u - a_eff)/h⌉ terms on a mesh of width (u - a_eff)/N ≤ h, so the
/// last sample lands exactly on the lower limit. The signed binomial weights follow
/// w_0 = 1, w_k = w_{k-1} (k - 1 - α)/k.
pub fn gl_derivative<F>(f: F, alpha: FractionalOrder, u: f64, window: &MemoryWindow) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    window.validate()?;
    let sample = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::argument(format!("nonfinite function sample f({x}) = {y}")))
        }
    };
    let a = alpha.value();
    if a == 0.0 {
        return sample(u);
    }
    let lower = window.effective_lower_limit(u);
    let span = check_above(u, lower)?;
    // tolerate span/h landing a hair above an integer
    let n = ((span / window.step) - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;

    let mut weight = 1.0;
    let mut sum = sample(u)?;
    for k in 1..=n {
        weight *= (k as f64 - 1.0 - a) / k as f64;
        if weight == 0.0 {
            // integer order: the remaining weights vanish
            break;
        }
        sum += weight * sample(u - k as f64 * h)?;
    }
    Ok(sum / h.powf(a))
}

/// Closed-form Riemann–Liouville derivative of a polynomial with lower limit `a`.
///
/// Each term b_k (s-a)^k maps to b_k Γ(k+1)/Γ(k+1-α) (u-a)^{k-α}; constants do not vanish.
pub fn rl_poly_derivative(p: &Polynomial, alpha: FractionalOrder, u: f64, a: f64) -> Result<f64> {
    power_rule(p, alpha, u, a, 0)
}

/// Closed-form Caputo derivative of a polynomial with lower limit `a`.
///
/// Same power rule as Riemann–Liouville, but terms of degree below ⌈α⌉ are dropped,
/// so constants map to zero and α = 1 reproduces p′(u).
pub fn caputo_poly_derivative(p: &Polynomial, alpha: FractionalOrder, u: f64, a: f64) -> Result<f64> {
    power_rule(p, alpha, u, a, alpha.initial_conditions())
}

/// Closed-form derivative with the lower limit taken from a window.
pub fn poly_derivative(
    op: FractionalOperator,
    p: &Polynomial,
    alpha: FractionalOrder,
    u: f64,
    window: &MemoryWindow,
) -> Result<f64> {
    let a = window.effective_lower_limit(u);
    match op {
        FractionalOperator::RiemannLiouville => rl_poly_derivative(p, alpha, u, a),
        FractionalOperator::Caputo => caputo_poly_derivative(p, alpha, u, a),
    }
}

fn power_rule(p: &Polynomial, alpha: FractionalOrder, u: f64, a: f64, first_degree: usize) -> Result<f64> {
    let v = check_above(u, a)?;
    let al = alpha.value();
    let mut sum = 0.0;
    let mut factorial = 1.0;
    for (k, b) in p.taylor_coefficients(a).into_iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        if k < first_degree || b == 0.0 {
            continue;
        }
        let k_f = k as f64;
        sum += b * factorial * rgamma(k_f + 1.0 - al) * v.powf(k_f - al);
    }
    Ok(sum)
}

/// Partial sum of the Caputo derivative's Taylor form (0 < α < 1):
///
/// D^α f(u) = 1/Γ(1-α) Σ_{k≥1} f^{(k)}(u) (-1)^{k-1} (u-a)^{k-α} / ((k-1)! (k-α)).
///
/// `derivatives[k-1]` evaluates f^{(k)}; `truncation` terms are summed.
pub fn caputo_taylor_series(
    derivatives: &[&dyn Fn(f64) -> f64],
    alpha: FractionalOrder,
    u: f64,
    a: f64,
    truncation: usize,
) -> Result<f64> {
    let al = alpha.value();
    if !(al > 0.0 && al < 1.0) {
        return Err(Error::Scope(format!("Caputo Taylor series needs 0 < alpha < 1, got {al}")));
    }
    if truncation < 1 || truncation > derivatives.len() {
        return Err(Error::config(format!(
            "truncation {truncation} must lie in 1..={}",
            derivatives.len()
        )));
    }
    let v = check_above(u, a)?;
    let mut sum = 0.0;
    let mut factorial = 1.0; // (k-1)!
    for (i, d) in derivatives[..truncation].iter().enumerate() {
        let k = (i + 1) as f64;
        if i > 0 {
            factorial *= i as f64;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * d(u) / factorial * v.powf(k - al) / (k - al);
    }
    Ok(sum * rgamma(1.0 - al))
}

/// Real zeros of the bracket Γ(3)/Γ(3-α) u² - 2c Γ(2)/Γ(2-α) u + c² Γ(1)/Γ(1-α),
/// i.e. the stationary points of the Riemann–Liouville derivative of (u - c)² with
/// lower limit 0 once the common factor u^{-α} is removed. Returned in ascending order.
pub fn rl_quadratic_bracket_roots(c: f64, alpha: FractionalOrder) -> Result<Option<(f64, f64)>> {
    let al = alpha.value();
    let qa = 2.0 / gamma(3.0 - al)?;
    let qb = -2.0 * c / gamma(2.0 - al)?;
    let qc = c * c * rgamma(1.0 - al);
    if qc == 0.0 {
        // integer order: the bracket degenerates to a single root plus zero
        let r = -qb / qa;
        return Ok(Some((r.min(0.0), r.max(0.0))));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(None);
    }
    // numerically stable quadratic formula
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (r1, r2) = (q / qa, qc / q);
    Ok(Some((r1.min(r2), r1.max(r2))))
}
