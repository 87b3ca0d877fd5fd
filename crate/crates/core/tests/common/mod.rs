//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's own evaluation or assembly code.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use ptbloch::{FourierPoly, ProblemSpec};
use rand::rngs::StdRng;
use rand::Rng;

/// `sum_m c(m) exp(2 pi i m x)` evaluated term by term.
pub fn trig_eval(terms: &[(i64, Complex64)], x: f64) -> Complex64 {
    terms
        .iter()
        .map(|&(m, c)| c * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * x))
        .sum()
}

/// Trapezoid rule on `[0, 1)` with `points` nodes (exact for periodic
/// trigonometric integrands of degree below `points`).
pub fn trapezoid(points: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let h = 1.0 / points as f64;
    (0..points).map(|j| f(j as f64 * h)).sum::<Complex64>() * h
}

/// `p_2 = a * 2 cos(2 pi x)`, `n = 3`.
pub fn cos_spec(a: f64) -> ProblemSpec {
    ProblemSpec::new(3, BTreeMap::from([(2, FourierPoly::cosine(a, 1))])).unwrap()
}

/// Random real-coefficient terms with frequencies in `-bw..=bw`, distinct.
pub fn random_terms(rng: &mut StdRng, bw: i64) -> Vec<(i64, Complex64)> {
    let mut terms = Vec::new();
    for m in -bw..=bw {
        if rng.random_bool(0.7) {
            terms.push((m, Complex64::new(rng.random_range(-2.0..2.0), 0.0)));
        }
    }
    if terms.is_empty() {
        terms.push((0, Complex64::new(1.0, 0.0)));
    }
    terms
}

/// Random complex terms (not PT-symmetric in general).
pub fn random_complex_terms(rng: &mut StdRng, bw: i64) -> Vec<(i64, Complex64)> {
    (-bw..=bw)
        .map(|m| {
            (
                m,
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            )
        })
        .collect()
}

/// Matrix entry `(l(e_p), e_k)` of the operator with coefficients scaled by
/// `eps`, by differentiating `e_p = exp(i theta_p x)` symbolically and
/// integrating the product with `conj(e_k)` by the trapezoid rule.
pub fn entry_by_quadrature(
    n: u32,
    coeffs: &BTreeMap<u32, Vec<(i64, Complex64)>>,
    t: f64,
    eps: f64,
    k: i64,
    p: i64,
) -> Complex64 {
    let theta = |j: i64| 2.0 * PI * j as f64 + PI * t;
    let minus_i = Complex64::new(0.0, -1.0);
    // (-i)^j times the j-th derivative factor (i theta_p)^j
    let deriv_factor = |order: u32| minus_i.powu(order) * Complex64::new(0.0, theta(p)).powu(order);
    let integrand = |x: f64| {
        let e_p = Complex64::from_polar(1.0, theta(p) * x);
        let mut l = deriv_factor(n) * e_p;
        for (&v, terms) in coeffs {
            l += eps * trig_eval(terms, x) * deriv_factor(n - v) * e_p;
        }
        l * Complex64::from_polar(1.0, -theta(k) * x)
    };
    trapezoid(512, integrand)
}
