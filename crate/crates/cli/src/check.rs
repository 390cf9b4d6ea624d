//! Quick invariant suite behind `fracopt check`.

use std::f64::consts::PI;
use std::time::Instant;

use fracopt::fdesolve::solve_pece;
use fracopt::fracops::{
    caputo_poly_derivative, caputo_taylor_series, gl_derivative, rl_poly_derivative, FractionalOperator,
};
use fracopt::optimizers::{run_fgdm, stability_envelope_check};
use fracopt::problems::{gradient_check, random_sphere_configuration, CoefficientSource, NodeRule};
use fracopt::{
    gamma, make_quadratic, make_thomson, make_vandermonde, mittag_leffler, FdeProblem, FractionalOrder,
    MemoryWindow, Metric, MlSeriesConfig, Objective, OptimizerConfig, Polynomial, Result, StoppingRule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 10] = [
    ("gamma recurrence", gamma_recurrence),
    ("Mittag-Leffler identities", ml_identities),
    ("Mittag-Leffler monotone decay", ml_monotone),
    ("GL vs RL on polynomials", gl_vs_rl),
    ("Caputo Taylor series vs closed form", taylor_vs_closed_form),
    ("gradients vs finite differences", gradients),
    ("Thomson rotation invariance", rotation_invariance),
    ("PECE vs Mittag-Leffler solutions", pece_oracle),
    ("FGDM shifted equilibrium", fgdm_equilibrium),
    ("stability envelope", envelope),
];

pub fn run_checks() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

fn ord(a: f64) -> Result<FractionalOrder> {
    FractionalOrder::new(a)
}

fn gamma_recurrence() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let x = rng.random_range(0.1..20.0);
        let g1 = gamma(x + 1.0)?;
        worst = worst.max(((g1 - x * gamma(x)?) / g1).abs());
    }
    Ok((worst <= 1e-12, format!("max relative defect {worst:.2e}")))
}

fn ml_identities() -> Result<(bool, String)> {
    let cfg = MlSeriesConfig::default();
    let mut exp_err: f64 = 0.0;
    for i in 0..=50 {
        let t = i as f64 * 0.1;
        exp_err = exp_err.max((mittag_leffler(ord(1.0)?, 1.0, -t, &cfg)? - (-t).exp()).abs());
    }
    let mut cos_err: f64 = 0.0;
    for i in 0..=20 {
        let t = i as f64 * 0.25;
        cos_err = cos_err.max((mittag_leffler(ord(2.0)?, 1.0, -t * t, &cfg)? - t.cos()).abs());
    }
    Ok((exp_err <= 1e-10 && cos_err <= 1e-9, format!("exp {exp_err:.2e}, cos {cos_err:.2e}")))
}

fn ml_monotone() -> Result<(bool, String)> {
    let cfg = MlSeriesConfig::default();
    for a in [0.3, 0.5, 0.7, 0.9, 1.0] {
        let mut prev = 1.0;
        for i in 1..=200 {
            let t = i as f64 * 0.1;
            let e = mittag_leffler(ord(a)?, 1.0, -t.powf(a), &cfg)?;
            if !(e > 0.0 && e < prev) {
                return Ok((false, format!("alpha = {a}, t = {t}: {e}")));
            }
            prev = e;
        }
    }
    Ok((true, "5 orders, 200 points each".into()))
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> Polynomial {
    let deg = rng.random_range(0..=4usize);
    let coeffs = (0..=deg).map(|i| rng.random_range(-1.0..1.0) / 5f64.powi((deg - i) as i32)).collect();
    Polynomial::new(coeffs).expect("nonempty coefficients")
}

fn gl_vs_rl() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 50 {
        let p = random_polynomial(&mut rng);
        let alpha = rng.random_range(0.01..0.99);
        let a = rng.random_range(0.0..4.95);
        let u = rng.random_range(a..5.0);
        if u - a < 0.05 {
            continue;
        }
        let w = MemoryWindow::fixed(a).with_step(1e-5)?;
        let gl = gl_derivative(|x| p.eval(x), ord(alpha)?, u, &w)?;
        worst = worst.max((gl - rl_poly_derivative(&p, ord(alpha)?, u, a)?).abs());
        n += 1;
    }
    Ok((worst <= 1e-3, format!("max |GL - RL| {worst:.2e} over 50 cases")))
}

fn taylor_vs_closed_form() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = random_polynomial(&mut rng);
        let mut derivs = Vec::new();
        let mut q = p.derivative();
        for _ in 0..5 {
            derivs.push(q.clone());
            q = q.derivative();
        }
        let fns: Vec<Box<dyn Fn(f64) -> f64>> =
            derivs.into_iter().map(|d| Box::new(move |x| d.eval(x)) as Box<dyn Fn(f64) -> f64>).collect();
        let refs: Vec<&dyn Fn(f64) -> f64> = fns.iter().map(|f| f.as_ref()).collect();
        let alpha = ord(rng.random_range(0.05..0.95))?;
        let a = rng.random_range(0.0..2.0);
        let u = a + rng.random_range(0.01..3.0);
        let series = caputo_taylor_series(&refs, alpha, u, a, refs.len())?;
        worst = worst.max((series - caputo_poly_derivative(&p, alpha, u, a)?).abs());
    }
    Ok((worst <= 1e-10, format!("max difference {worst:.2e}")))
}

fn gradients() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let q = make_quadratic(3.0);
    let v = make_vandermonde(10, NodeRule::Uniform, CoefficientSource::Alternating)?;
    let t4 = make_thomson(4)?;
    let t12 = make_thomson(12)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        worst = worst.max(gradient_check(&q, &[rng.random_range(-5.0..5.0)])?);
        let u: Vec<f64> = (0..11).map(|_| rng.random_range(-2.0..2.0)).collect();
        worst = worst.max(gradient_check(&v, &u)?);
        for t in [&t4, &t12] {
            let n = t.dimension() / 2;
            let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
            u.extend((0..n).map(|_| rng.random_range(0.1..PI - 0.1)));
            worst = worst.max(gradient_check(t, &u)?);
        }
    }
    Ok((worst <= 1e-6, format!("max relative error {worst:.2e}")))
}

/// Rodrigues rotation of a unit vector about `axis` by `angle`.
fn rotate(p: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
    let cross = [axis[1] * p[2] - axis[2] * p[1], axis[2] * p[0] - axis[0] * p[2], axis[0] * p[1] - axis[1] * p[0]];
    std::array::from_fn(|k| p[k] * c + cross[k] * s + axis[k] * dot * (1.0 - c))
}

fn rotation_invariance() -> Result<(bool, String)> {
    let n = 12;
    let t = make_thomson(n)?;
    let u = random_sphere_configuration(n, 5)?;
    let e = t.value(&u)?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let raw: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let axis = raw.map(|x| x / norm);
        let angle = rng.random_range(0.0..PI);
        let mut v = vec![0.0; 2 * n];
        for (i, p) in t.spec().cartesian(&u).into_iter().enumerate() {
            let q = rotate(p, axis, angle);
            v[i] = q[1].atan2(q[0]);
            v[n + i] = q[2].clamp(-1.0, 1.0).acos();
        }
        worst = worst.max((t.value(&v)? - e).abs());
    }
    Ok((worst <= 1e-10, format!("max energy change {worst:.2e}")))
}

fn pece_oracle() -> Result<(bool, String)> {
    let cfg = MlSeriesConfig::default();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 0.9, 1.0, 1.2, 1.7] {
        let field = |u: &[f64], out: &mut [f64]| {
            out[0] = -2.0 * (u[0] - 3.0);
            Ok(())
        };
        let mut p = FdeProblem::new(ord(alpha)?, vec![1.0], 10.0, 1e-3, field);
        if alpha > 1.0 {
            p = p.with_initial_velocity(vec![0.0]);
        }
        let traj = solve_pece(&p)?;
        for (t, s) in traj.times.iter().zip(&traj.states).step_by(10) {
            let exact = 3.0 - 2.0 * mittag_leffler(ord(alpha)?, 1.0, -2.0 * t.powf(alpha), &cfg)?;
            worst = worst.max((s[0] - exact).abs());
        }
    }
    Ok((worst <= 1e-3, format!("max error {worst:.2e}")))
}

fn fgdm_equilibrium() -> Result<(bool, String)> {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::iterations(Metric::DistanceToOptimum, 5000);
    let mut worst: f64 = 0.0;
    for alpha in [0.7, 0.8, 0.9] {
        let cfg = OptimizerConfig::fgdm(ord(alpha)?, 0.05, FractionalOperator::Caputo, MemoryWindow::fixed(0.0));
        let r = run_fgdm(&q, 1.0, &cfg, &stop)?;
        worst = worst.max((r.converged_to[0] - 3.0 * (2.0 - alpha)).abs());
    }
    Ok((worst <= 1e-3, format!("max |u - c(2 - alpha)| {worst:.2e}")))
}

fn envelope() -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for alpha in [0.3, 0.5, 0.7, 0.9, 1.0] {
        let field = |u: &[f64], out: &mut [f64]| {
            out[0] = -2.0 * (u[0] - 3.0);
            Ok(())
        };
        let traj = solve_pece(&FdeProblem::new(ord(alpha)?, vec![1.0], 20.0, 1e-2, field))?;
        let c = stability_envelope_check(&traj, &[3.0], 2.0, ord(alpha)?)?;
        worst = worst.max(c.max_excess);
    }
    Ok((worst <= 1e-6, format!("max excess over the envelope {worst:.2e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rodrigues_rotation_preserves_norm() {
        let p = rotate([0.0, 0.6, 0.8], [0.0, 0.0, 1.0], PI / 2.0);
        assert!((p[0] + 0.6).abs() < 1e-15 && p[1].abs() < 1e-15 && (p[2] - 0.8).abs() < 1e-15);
    }
}
