use std::fmt;

use crate::error::{Error, Result};

/// Real polynomial stored with the highest-degree coefficient first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, stripping leading zeros. An empty list is the zero polynomial.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("polynomial coefficients must be finite"));
        }
        let first = coefficients.iter().position(|&c| c != 0.0);
        let coefficients = match first {
            Some(i) => coefficients[i..].to_vec(),
            None => vec![0.0],
        };
        Ok(Polynomial { coefficients })
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coefficients: vec![c] }
    }

    /// (u - c)²
    pub fn shifted_square(c: f64) -> Self {
        Polynomial { coefficients: vec![1.0, -2.0 * c, c * c] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let n = self.degree();
        if n == 0 {
            return Polynomial::constant(0.0);
        }
        let coefficients = self.coefficients[..n]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (n - i) as f64)
            .collect();
        Polynomial { coefficients }
    }

    /// Coefficients b_k of p(s) = Σ_k b_k (s - a)^k, lowest order first.
    pub fn taylor_coefficients(&self, a: f64) -> Vec<f64> {
        // repeated synthetic division by (s - a)
        let mut work = self.coefficients.clone();
        let mut out = Vec::with_capacity(work.len());
        while !work.is_empty() {
            let mut acc = 0.0;
            for c in work.iter_mut() {
                acc = acc * a + *c;
                *c = acc;
            }
            out.push(work.pop().expect("nonempty"));
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match n - i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}u")?,
                p => write!(f, "{c}u^{p}")?,
            }
        }
        Ok(())
    }
}
