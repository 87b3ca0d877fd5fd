//! Trigonometric polynomials on the unit period.
//!
//! A [`FourierPoly`] stores `p(x) = sum_m c(m) exp(i 2 pi m x)` as a sparse
//! map from frequency to coefficient. Zero coefficients are never stored, so
//! the bandwidth is always the largest stored `|m|`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FourierPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl FourierPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a polynomial from `(m, c(m))` pairs. Repeated frequencies are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (m, c) in terms {
            *coeffs.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// `amplitude * 2 cos(2 pi m x)`, i.e. `c(m) = c(-m) = amplitude`.
    pub fn cosine(amplitude: f64, m: i64) -> Self {
        let c = Complex64::new(amplitude, 0.0);
        if m == 0 {
            Self::from_terms([(0, 2.0 * c)])
        } else {
            Self::from_terms([(m, c), (-m, c)])
        }
    }

    pub fn coeff(&self, m: i64) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest `M` with `c(m) = 0` for all `|m| > M`; zero for the zero polynomial.
    pub fn bandwidth(&self) -> u64 {
        self.coeffs.keys().map(|m| m.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_terms(self.terms().map(|(m, c)| (m, c * alpha)))
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.terms()
            .map(|(m, c)| c * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * x))
            .sum()
    }

    /// `s`-th derivative: each coefficient is multiplied by `(i 2 pi m)^s`.
    pub fn derivative(&self, s: u32) -> Self {
        if s == 0 {
            return self.clone();
        }
        Self::from_terms(
            self.terms()
                .map(|(m, c)| (m, c * Complex64::new(0.0, 2.0 * PI * m as f64).powu(s))),
        )
    }

    /// `L2[0, 1]` norm via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `conj(p(-x)) = p(x)` holds exactly when every coefficient is real.
    pub fn is_pt_symmetric(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.im.abs() <= tol)
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_cos() -> FourierPoly {
        FourierPoly::from_terms([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))])
    }

    /// Periodic trapezoid rule on `|p|^2`, independent of the coefficient path.
    fn quadrature_norm(f: impl Fn(f64) -> Complex64, points: usize) -> f64 {
        let h = 1.0 / points as f64;
        let sum: f64 = (0..points).map(|j| f(j as f64 * h).norm_sqr()).sum();
        (sum * h).sqrt()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(FourierPoly::zero().evaluate(0.37), c(0.0, 0.0));
        assert!((two_cos().evaluate(0.0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!(two_cos().evaluate(0.25).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let p = two_cos();
        assert_eq!(p.derivative(0), p);
        let d = p.derivative(1);
        assert!((d.coeff(1) - c(0.0, 2.0 * PI)).norm() < 1e-15);
        assert!((d.coeff(-1) - c(0.0, -2.0 * PI)).norm() < 1e-15);
        // -4 pi sin(2 pi x) at x = 1/4
        assert!((d.evaluate(0.25) - c(-4.0 * PI, 0.0)).norm() < 1e-12);

        let constant = FourierPoly::from_terms([(0, c(5.0, 0.0))]);
        assert!(constant.derivative(1).is_zero());
        assert_eq!(constant.derivative(1).bandwidth(), 0);
    }

    #[test]
    fn norms_match_quadrature() {
        assert_eq!(FourierPoly::zero().l2_norm(), 0.0);

        let p = two_cos();
        let q = quadrature_norm(|x| c(2.0 * (2.0 * PI * x).cos(), 0.0), 64);
        assert!((q - 2f64.sqrt()).abs() < 1e-14);
        assert!((p.l2_norm() - q).abs() < 1e-14);

        let q1 = quadrature_norm(|x| c(-4.0 * PI * (2.0 * PI * x).sin(), 0.0), 64);
        assert!((q1 - 2.0 * 2f64.sqrt() * PI).abs() < 1e-12);
        assert!((p.derivative(1).l2_norm() - q1).abs() < 1e-12);
    }

    #[test]
    fn pt_symmetry_examples() {
        assert!(two_cos().is_pt_symmetric(0.0));
        assert!(!FourierPoly::from_terms([(1, c(0.0, 1.0))]).is_pt_symmetric(1e-12));
        assert!(FourierPoly::from_terms([(2, c(3.0, 1e-15))]).is_pt_symmetric(1e-12));
    }

    #[test]
    fn zero_terms_are_dropped() {
        let p = FourierPoly::from_terms([(3, c(0.0, 0.0)), (1, c(1.0, 0.0)), (1, c(-1.0, 0.0))]);
        assert!(p.is_zero());
        assert_eq!(p.bandwidth(), 0);
        assert_eq!(FourierPoly::cosine(0.5, -2).bandwidth(), 2);
    }
}
