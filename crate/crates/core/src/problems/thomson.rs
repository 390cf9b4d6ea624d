use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Objective;
use crate::error::{Error, Result};

/// Best known minimal energies for small charge counts.
const REFERENCE_ENERGIES: [(usize, f64); 4] =
    [(4, 3.674234614), (5, 6.474691495), (6, 9.985281374), (12, 49.165253058)];

/// Minimum angular separation accepted by [`random_sphere_configuration`].
const MIN_SEPARATION: f64 = 1e-3;
const MAX_ATTEMPTS_PER_POINT: usize = 1000;

pub fn thomson_reference_energy(n: usize) -> Option<f64> {
    REFERENCE_ENERGIES.iter().find(|(k, _)| *k == n).map(|(_, e)| *e)
}

/// N unit charges parameterized by u = [θ_1..θ_N, φ_1..φ_N].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThomsonSpec {
    pub charges: usize,
}

impl ThomsonSpec {
    /// (sin φ cos θ, sin φ sin θ, cos φ) for every charge.
    pub fn cartesian(&self, u: &[f64]) -> Vec<[f64; 3]> {
        let n = self.charges;
        (0..n)
            .map(|i| {
                let (st, ct) = u[i].sin_cos();
                let (sp, cp) = u[n + i].sin_cos();
                [sp * ct, sp * st, cp]
            })
            .collect()
    }

    /// Charges sitting on a pole, where the θ-gradient vanishes identically.
    pub fn pole_charges(&self, u: &[f64]) -> Vec<usize> {
        (0..self.charges).filter(|&i| u[self.charges + i].sin().abs() < 1e-12).collect()
    }

    /// Writes `i,x,y,z`, one row per charge.
    pub fn write_csv<W: Write>(&self, u: &[f64], out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "x", "y", "z"])?;
        for (i, p) in self.cartesian(u).iter().enumerate() {
            w.write_record([i.to_string(), format!("{:?}", p[0]), format!("{:?}", p[1]), format!("{:?}", p[2])])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Coulomb energy Σ_{i<j} 1/d_ij of charges on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Thomson {
    spec: ThomsonSpec,
    name: String,
}

pub fn make_thomson(n: usize) -> Result<Thomson> {
    if n < 2 {
        return Err(Error::config("the Thomson problem needs at least 2 charges"));
    }
    Ok(Thomson { spec: ThomsonSpec { charges: n }, name: format!("thomson-{n}") })
}

impl Thomson {
    pub fn spec(&self) -> &ThomsonSpec {
        &self.spec
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != 2 * self.spec.charges {
            return Err(Error::argument(format!(
                "expected {} angles, got {}",
                2 * self.spec.charges,
                u.len()
            )));
        }
        Ok(())
    }
}

impl Objective for Thomson {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        2 * self.spec.charges
    }

    fn value(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        let p = self.spec.cartesian(u);
        let mut e = 0.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let d = distance(&p[i], &p[j]);
                if d == 0.0 {
                    return Err(Error::Singularity { i, j });
                }
                e += 1.0 / d;
            }
        }
        Ok(e)
    }

    fn gradient(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(u)?;
        let n = self.spec.charges;
        let p = self.spec.cartesian(u);
        // ∂E/∂p_i in Cartesian coordinates
        let mut force = vec![[0.0; 3]; n];
        for i in 0..n {
            for j in i + 1..n {
                let diff = [p[i][0] - p[j][0], p[i][1] - p[j][1], p[i][2] - p[j][2]];
                let d = norm(&diff);
                if d == 0.0 {
                    return Err(Error::Singularity { i, j });
                }
                let s = 1.0 / (d * d * d);
                for k in 0..3 {
                    force[i][k] -= diff[k] * s;
                    force[j][k] += diff[k] * s;
                }
            }
        }
        for i in 0..n {
            let (st, ct) = u[i].sin_cos();
            let (sp, cp) = u[n + i].sin_cos();
            let g = force[i];
            out[i] = g[0] * (-sp * st) + g[1] * (sp * ct);
            out[n + i] = g[0] * (cp * ct) + g[1] * (cp * st) - g[2] * sp;
        }
        Ok(())
    }

    fn known_minimum(&self) -> Option<f64> {
        thomson_reference_energy(self.spec.charges)
    }
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    norm(&cross).atan2(dot)
}

/// Seeded uniform sample of N points on the sphere, returned as [θ.., φ..].
///
/// Each point is a normalized triple of standard normals; candidates closer than
/// 1e-3 rad to an accepted point are redrawn.
pub fn random_sphere_configuration(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::config("need at least 2 points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<[f64; 3]> = Vec::with_capacity(n);
    let mut attempts = 0;
    while accepted.len() < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS_PER_POINT * n {
            return Err(Error::RetryExhausted { attempts: attempts - 1 });
        }
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let r = norm(&v);
        if r < 1e-12 {
            continue;
        }
        let p = [v[0] / r, v[1] / r, v[2] / r];
        if accepted.iter().all(|q| angle_between(&p, q) >= MIN_SEPARATION) {
            accepted.push(p);
        }
    }
    let mut u = vec![0.0; 2 * n];
    for (i, p) in accepted.iter().enumerate() {
        u[i] = p[1].atan2(p[0]);
        u[n + i] = p[2].clamp(-1.0, 1.0).acos();
    }
    Ok(u)
}
