use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Objective;
use crate::error::{Error, Result};

/// Placement of the interpolation nodes in (0, 1).
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NodeRule {
    /// x_j = (j + 1)/(m + 2), j = 0..=m
    #[default]
    Uniform,
    Explicit(Vec<f64>),
}

/// Where the ground-truth coefficients generating g come from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CoefficientSource {
    /// u_j = (-1)^j
    #[default]
    Alternating,
    Explicit(Vec<f64>),
    /// Independent uniform draws from [-1, 1].
    Seeded(u64),
}

/// The (m+1)×(m+1) system X u = g with X[i][j] = x_i^{m-j}.
#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeSpec {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub u_true: Vec<f64>,
    /// Row-major.
    pub matrix: Vec<f64>,
    pub target: Vec<f64>,
}

impl VandermondeSpec {
    pub fn size(&self) -> usize {
        self.degree + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.size() + j]
    }

    /// X u - g
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let row = &self.matrix[i * n..(i + 1) * n];
                row.iter().zip(u).map(|(x, v)| x * v).sum::<f64>() - self.target[i]
            })
            .collect()
    }
}

/// Least-squares objective f(u) = ‖Xu - g‖².
#[derive(Debug, Clone, PartialEq)]
pub struct Vandermonde {
    spec: VandermondeSpec,
}

impl Vandermonde {
    pub fn spec(&self) -> &VandermondeSpec {
        &self.spec
    }

    pub fn residual_norm(&self, u: &[f64]) -> f64 {
        self.spec.residual(u).iter().map(|r| r * r).sum::<f64>().sqrt()
    }
}

pub fn make_vandermonde(m: usize, nodes: NodeRule, coefficients: CoefficientSource) -> Result<Vandermonde> {
    if m < 1 {
        return Err(Error::config("Vandermonde degree must be at least 1"));
    }
    let n = m + 1;
    let nodes = match nodes {
        NodeRule::Uniform => (0..n).map(|j| (j + 1) as f64 / (m + 2) as f64).collect::<Vec<_>>(),
        NodeRule::Explicit(x) => x,
    };
    if nodes.len() != n {
        return Err(Error::config(format!("expected {n} nodes, got {}", nodes.len())));
    }
    if nodes.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::config("nodes must lie strictly inside (0, 1)"));
    }
    for (i, w) in nodes.windows(2).enumerate() {
        if w[1] == w[0] {
            return Err(Error::config(format!("duplicate nodes at positions {i} and {}: X is singular", i + 1)));
        }
        if w[1] < w[0] {
            return Err(Error::config("nodes must be strictly increasing"));
        }
    }
    let u_true = match coefficients {
        CoefficientSource::Alternating => {
            (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>()
        }
        CoefficientSource::Explicit(u) => u,
        CoefficientSource::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
        }
    };
    if u_true.len() != n || u_true.iter().any(|x| !x.is_finite()) {
        return Err(Error::config(format!("expected {n} finite true coefficients")));
    }

    let mut matrix = Vec::with_capacity(n * n);
    for &x in &nodes {
        matrix.extend((0..n).map(|j| x.powi((m - j) as i32)));
    }
    let target = (0..n)
        .map(|i| matrix[i * n..(i + 1) * n].iter().zip(&u_true).map(|(a, b)| a * b).sum())
        .collect();
    Ok(Vandermonde { spec: VandermondeSpec { degree: m, nodes, u_true, matrix, target } })
}

impl Objective for Vandermonde {
    fn name(&self) -> &str {
        "vandermonde"
    }

    fn dimension(&self) -> usize {
        self.spec.size()
    }

    fn value(&self, u: &[f64]) -> Result<f64> {
        Ok(self.spec.residual(u).iter().map(|r| r * r).sum())
    }

    fn gradient(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.spec.size();
        let r = self.spec.residual(u);
        out.fill(0.0);
        for (i, ri) in r.iter().enumerate() {
            let row = &self.spec.matrix[i * n..(i + 1) * n];
            for (o, x) in out.iter_mut().zip(row) {
                *o += 2.0 * x * ri;
            }
        }
        Ok(())
    }

    fn known_optimum(&self) -> Option<&[f64]> {
        Some(&self.spec.u_true)
    }

    fn known_minimum(&self) -> Option<f64> {
        Some(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_case_is_solved_exactly() {
        let v = make_vandermonde(
            1,
            NodeRule::Explicit(vec![1.0 / 3.0, 2.0 / 3.0]),
            CoefficientSource::Explicit(vec![1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(v.value(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(v.gradient_vec(&[1.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn default_layout() {
        let v = make_vandermonde(10, NodeRule::Uniform, CoefficientSource::Alternating).unwrap();
        let s = v.spec();
        assert_eq!(s.size(), 11);
        assert_eq!(s.nodes[0], 1.0 / 12.0);
        assert_eq!(s.entry(3, 10), 1.0);
        assert_eq!(s.entry(3, 9), s.nodes[3]);
        assert_eq!(v.value(&s.u_true).unwrap(), 0.0);
        let g2: f64 = s.target.iter().map(|g| g * g).sum();
        assert_eq!(v.value(&[0.0; 11]).unwrap(), g2);
    }

    #[test]
    fn duplicate_nodes_are_rejected() {
        let err = make_vandermonde(2, NodeRule::Explicit(vec![0.2, 0.5, 0.5]), CoefficientSource::Alternating);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn seeded_coefficients_are_reproducible() {
        let a = make_vandermonde(4, NodeRule::Uniform, CoefficientSource::Seeded(9)).unwrap();
        let b = make_vandermonde(4, NodeRule::Uniform, CoefficientSource::Seeded(9)).unwrap();
        assert_eq!(a, b);
    }
}
