//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |I|)` or `max_segments` is reached.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> QuadResult {
    let (value, error) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut segments = 1;
    loop {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return QuadResult { value: total, error: total_err, converged: true };
        }
        if segments >= max_segments {
            return QuadResult { value: total, error: total_err, converged: false };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod(&f, worst.a, mid);
        let (rv, re) = kronrod(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
        segments += 1;
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be bisected in floating point
            return QuadResult { value: total, error: total_err, converged: false };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(6) - 2.0 * x, 0.0, 2.0, 1e-14, 0.0, 10);
        assert!((r.value - (128.0 / 7.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        // ∫ 1/(x² + ε²) over [-1, 1] = 2 atan(1/ε)/ε
        let eps = 1e-3;
        let r = integrate(|x| 1.0 / (x * x + eps * eps), -1.0, 1.0, 1e-9, 1e-13, 2000);
        let exact = 2.0 * (1.0 / eps).atan() / eps;
        assert!(r.converged);
        assert!((r.value - exact).abs() / exact < 1e-11);
    }
}
