use std::fmt;

use crate::error::{Error, Result};

/// Order α of a fractional derivative.
///
/// Any finite α ≥ 0 is representable (α = 0 is the identity operator); solvers
/// narrow the accepted range further where their scheme requires it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const ONE: FractionalOrder = FractionalOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(FractionalOrder(alpha))
        } else {
            Err(Error::config(format!("fractional order must be finite and nonnegative, got {alpha}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Number of integer-order initial conditions a Caputo problem of this order needs.
    #[inline]
    pub fn initial_conditions(self) -> usize {
        self.0.ceil() as usize
    }

    #[inline]
    pub fn is_integer(self) -> bool {
        self.0 == self.0.floor()
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        FractionalOrder::new(alpha)
    }
}
