use fracopt::fracops::{
    caputo_poly_derivative, caputo_taylor_series, gl_derivative, poly_derivative, rl_poly_derivative,
    rl_quadratic_bracket_roots, FractionalOperator, MemoryWindow, Polynomial,
};
use fracopt::specfun::gamma;
use fracopt::FractionalOrder;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ord(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

/// Degree ≤ 4 polynomial with the u^k coefficient drawn from [-1, 1]/5^k, so |p| stays
/// O(1) on [0, 5].
fn random_polynomial(rng: &mut ChaCha8Rng) -> Polynomial {
    let deg = rng.random_range(0..=4usize);
    let coeffs = (0..=deg).map(|i| rng.random_range(-1.0..1.0) / 5f64.powi((deg - i) as i32)).collect();
    Polynomial::new(coeffs).unwrap()
}

/// Bisection on a sign change of `f` over [lo, hi].
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn grunwald_letnikov_agrees_with_riemann_liouville() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 50 {
        let p = random_polynomial(&mut rng);
        let alpha = rng.random_range(0.01..0.99);
        let a = rng.random_range(0.0..4.95);
        let u = rng.random_range(a..5.0);
        if u - a < 0.05 {
            continue;
        }
        let w = MemoryWindow::fixed(a).with_step(1e-5).unwrap();
        let gl = gl_derivative(|x| p.eval(x), ord(alpha), u, &w).unwrap();
        let rl = rl_poly_derivative(&p, ord(alpha), u, a).unwrap();
        assert!((gl - rl).abs() <= 1e-3, "p = {p}, alpha = {alpha}, a = {a}, u = {u}: {gl} vs {rl}");
        checked += 1;
    }
}

#[test]
fn riemann_liouville_examples() {
    let nine = Polynomial::constant(9.0);
    let got = rl_poly_derivative(&nine, ord(0.5), 1.0, 0.0).unwrap();
    assert!((got - 9.0 / gamma(0.5).unwrap()).abs() < 1e-14);
    assert!((got - 5.077_706_251_929_807).abs() < 1e-12);

    let p = Polynomial::shifted_square(3.0);
    assert!((rl_poly_derivative(&p, ord(1.0 - 1e-8), 5.0, 0.0).unwrap() - 4.0).abs() < 1e-5);
}

#[test]
fn bracket_roots_match_quadratic_formula() {
    let (c, alpha) = (3.0, 0.9);
    let (r1, r2) = rl_quadratic_bracket_roots(c, ord(alpha)).unwrap().unwrap();
    // textbook formula on the same bracket coefficients
    let qa = 2.0 / gamma(3.0 - alpha).unwrap();
    let qb = -2.0 * c / gamma(2.0 - alpha).unwrap();
    let qc = c * c / gamma(1.0 - alpha).unwrap();
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let (e1, e2) = ((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa));
    assert!((r1 - e1).abs() < 1e-12 && (r2 - e2).abs() < 1e-12);
    assert!(r1 != c && r2 != c);
    // both are genuine zeros of the RL derivative
    let p = Polynomial::shifted_square(c);
    for r in [r1, r2] {
        assert!(rl_poly_derivative(&p, ord(alpha), r, 0.0).unwrap().abs() < 1e-10);
    }
}

#[test]
fn caputo_and_rl_differ_by_the_constant_term() {
    let p = Polynomial::shifted_square(3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let alpha = rng.random_range(0.05..0.95);
        let a = rng.random_range(0.0..2.0);
        let u = rng.random_range(a + 0.01..6.0);
        let caputo = caputo_poly_derivative(&p, ord(alpha), u, a).unwrap();
        let rl = rl_poly_derivative(&p, ord(alpha), u, a).unwrap();
        let constant = Polynomial::constant(p.eval(a));
        let rl_const = rl_poly_derivative(&constant, ord(alpha), u, a).unwrap();
        assert!((caputo - rl + rl_const).abs() <= 1e-10);
    }
}

#[test]
fn shifted_equilibrium() {
    // For f = (u - c)² the Caputo derivative with lower limit a vanishes at
    // a + (c - a)(2 - α); measured from the lower limit the offset is (c - a)(2 - α).
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let a = rng.random_range(0.0..2.0);
        let c = rng.random_range(a + 0.5..a + 5.0);
        let alpha = rng.random_range(0.05..0.95);
        let p = Polynomial::shifted_square(c);
        let root = bisect(|u| caputo_poly_derivative(&p, ord(alpha), u, a).unwrap(), a + 1e-9, a + 3.0 * (c - a));
        assert!((root - (a + (c - a) * (2.0 - alpha))).abs() <= 1e-8);

        // translating the objective with the lower limit gives the a + c(2 - α) form
        let translated = Polynomial::shifted_square(a + c);
        let root = bisect(
            |u| caputo_poly_derivative(&translated, ord(alpha), u, a).unwrap(),
            a + 1e-9,
            a + 3.0 * c,
        );
        assert!((root - (a + c * (2.0 - alpha))).abs() <= 1e-8);
    }
}

#[test]
fn short_memory_equilibrium_approaches_extremum() {
    let c = 3.0;
    let p = Polynomial::shifted_square(c);
    for alpha in [0.5, 0.7, 0.9] {
        for h in [1e-2, 1e-3, 1e-4] {
            let w = MemoryWindow::new(0.0, h, h).unwrap();
            let d = |u: f64| poly_derivative(FractionalOperator::Caputo, &p, ord(alpha), u, &w).unwrap();
            let root = bisect(d, c - 1.0, c + 1.0);
            let predicted = c + h * (1.0 - alpha) / (2.0 - alpha);
            assert!((root - predicted).abs() <= 1e-3 * h, "alpha={alpha} h={h}: {root} vs {predicted}");
        }
    }
}

#[test]
fn taylor_series_matches_closed_form_on_quadratic() {
    let c = 3.0;
    let d1 = |u: f64| 2.0 * (u - c);
    let d2 = |_: f64| 2.0;
    let d3 = |_: f64| 0.0;
    let derivs: [&dyn Fn(f64) -> f64; 3] = [&d1, &d2, &d3];
    let p = Polynomial::shifted_square(c);

    let got = caputo_taylor_series(&derivs, ord(0.9), 3.3, 0.0, 2).unwrap();
    assert!(got.abs() <= 1e-10);

    let u = 3.005;
    let got = caputo_taylor_series(&derivs, ord(0.5), u, u - 0.01, 2).unwrap();
    let exact = caputo_poly_derivative(&p, ord(0.5), u, u - 0.01).unwrap();
    assert!((got - exact).abs() <= 1e-6);

    let two = caputo_taylor_series(&derivs, ord(0.7), 2.0, 0.5, 2).unwrap();
    let three = caputo_taylor_series(&derivs, ord(0.7), 2.0, 0.5, 3).unwrap();
    assert_eq!(two, three);
}

proptest! {
    #[test]
    fn taylor_series_matches_closed_form(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 1..6),
        alpha in 0.05f64..0.95,
        a in 0.0f64..2.0,
        span in 0.01f64..2.0,
    ) {
        let p = Polynomial::new(coeffs).unwrap();
        let mut derivs = Vec::new();
        let mut q = p.derivative();
        for _ in 0..5 {
            derivs.push(q.clone());
            q = q.derivative();
        }
        let closures: Vec<Box<dyn Fn(f64) -> f64>> =
            derivs.into_iter().map(|d| Box::new(move |x| d.eval(x)) as Box<dyn Fn(f64) -> f64>).collect();
        let refs: Vec<&dyn Fn(f64) -> f64> = closures.iter().map(|b| b.as_ref()).collect();
        let u = a + span;
        let series = caputo_taylor_series(&refs, ord(alpha), u, a, refs.len()).unwrap();
        let exact = caputo_poly_derivative(&p, ord(alpha), u, a).unwrap();
        prop_assert!((series - exact).abs() <= 1e-10 * exact.abs().max(1.0), "{} vs {}", series, exact);
    }

    #[test]
    fn integer_order_caputo_is_classical(coeffs in proptest::collection::vec(-3.0f64..3.0, 1..6), u in 0.1f64..4.0) {
        let p = Polynomial::new(coeffs).unwrap();
        let d = caputo_poly_derivative(&p, ord(1.0), u, 0.0).unwrap();
        let exact = p.derivative().eval(u);
        prop_assert!((d - exact).abs() <= 1e-11 * exact.abs().max(1.0));
    }
}

#[test]
fn window_reproduces_fixed_limit_when_memory_is_long() {
    let p = Polynomial::shifted_square(3.0);
    let fixed = MemoryWindow::fixed(0.0);
    let long = MemoryWindow::new(0.0, 100.0, 1e-5).unwrap();
    for u in [0.5, 2.0, 4.0] {
        let a = poly_derivative(FractionalOperator::Caputo, &p, ord(0.6), u, &fixed).unwrap();
        let b = poly_derivative(FractionalOperator::Caputo, &p, ord(0.6), u, &long).unwrap();
        assert_eq!(a, b);
    }
}
