use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fourier::FourierPoly;

/// Coefficients with `|Im c(m)|` above this are not PT-symmetric.
pub const PT_TOLERANCE: f64 = 1e-12;
/// Largest order accepted without `unsafe_precision`.
pub const MAX_SAFE_ORDER: u32 = 9;
/// Largest Fourier index (truncation or reporting window) accepted without `unsafe_precision`.
pub const MAX_SAFE_INDEX: u64 = 200;
/// Hard cap on `n * log2(2 pi (K + 1))`, well inside the f64 exponent range.
const EXPONENT_BUDGET: f64 = 1000.0;

/// Odd order `n >= 3` together with the coefficients `p_2, ..., p_n`.
///
/// Missing `p_v` are zero. Every stored coefficient is PT-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    n: u32,
    coeffs: BTreeMap<u32, FourierPoly>,
    unsafe_precision: bool,
}

impl ProblemSpec {
    pub fn new(n: u32, coeffs: BTreeMap<u32, FourierPoly>) -> Result<Self> {
        Self::with_precision(n, coeffs, false)
    }

    /// As [`ProblemSpec::new`]; `unsafe_precision` lifts the order and index caps.
    pub fn with_precision(
        n: u32,
        coeffs: BTreeMap<u32, FourierPoly>,
        unsafe_precision: bool,
    ) -> Result<Self> {
        if n % 2 == 0 || n <= 1 {
            return Err(Error::Config(format!("n must be odd and > 1 (got {n})")));
        }
        if n > MAX_SAFE_ORDER && !unsafe_precision {
            return Err(Error::Precision(format!(
                "order n = {n} exceeds the cap {MAX_SAFE_ORDER}; set unsafe_precision to override"
            )));
        }
        for (&v, p) in &coeffs {
            if !(2..=n).contains(&v) {
                return Err(Error::Config(format!("coefficient index v = {v} outside 2..={n}")));
            }
            if !p.is_pt_symmetric(PT_TOLERANCE) {
                return Err(Error::Config(format!(
                    "coefficient p_{v} is not PT-symmetric (max |Im c(m)| = {:e})",
                    p.max_imag()
                )));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Ok(Self {
            n,
            coeffs,
            unsafe_precision,
        })
    }

    /// The free operator of order `n`.
    pub fn free(n: u32) -> Result<Self> {
        Self::new(n, BTreeMap::new())
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn unsafe_precision(&self) -> bool {
        self.unsafe_precision
    }

    /// `p_v`, or `None` when it is identically zero.
    pub fn coeff(&self, v: u32) -> Option<&FourierPoly> {
        self.coeffs.get(&v)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &FourierPoly)> + '_ {
        self.coeffs.iter().map(|(&v, p)| (v, p))
    }

    pub fn max_bandwidth(&self) -> u64 {
        self.coeffs.values().map(FourierPoly::bandwidth).max().unwrap_or(0)
    }

    /// Multiplies every coefficient by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&v, p)| (v, p.scaled(alpha)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
            unsafe_precision: self.unsafe_precision,
        }
    }

    /// Rejects Fourier windows whose powers `(2 pi k)^n` leave the double-precision budget.
    pub fn check_index_budget(&self, max_index: u64) -> Result<()> {
        if max_index > MAX_SAFE_INDEX && !self.unsafe_precision {
            return Err(Error::Precision(format!(
                "Fourier index window {max_index} exceeds the cap {MAX_SAFE_INDEX}; \
                 set unsafe_precision to override"
            )));
        }
        let bits = self.n as f64 * (2.0 * std::f64::consts::PI * (max_index as f64 + 1.0)).log2();
        if bits > EXPONENT_BUDGET {
            return Err(Error::Precision(format!(
                "n log2(2 pi (K + 1)) = {bits:.1} exceeds the exponent budget"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_even_and_small_orders() {
        for n in [0, 1, 2, 4, 10] {
            let err = ProblemSpec::free(n).unwrap_err();
            assert!(err.to_string().contains("n must be odd and > 1"), "{err}");
        }
    }

    #[test]
    fn order_cap_and_override() {
        assert!(matches!(ProblemSpec::free(11), Err(Error::Precision(_))));
        let spec = ProblemSpec::with_precision(11, BTreeMap::new(), true).unwrap();
        assert_eq!(spec.order(), 11);
    }

    #[test]
    fn rejects_bad_coefficients() {
        let p = FourierPoly::cosine(1.0, 1);
        let out_of_range = BTreeMap::from([(4, p.clone())]);
        assert!(ProblemSpec::new(3, out_of_range).is_err());
        let one = BTreeMap::from([(1, p)]);
        assert!(ProblemSpec::new(3, one).is_err());

        let complex = FourierPoly::from_terms([(0, Complex64::new(0.0, 0.5))]);
        let err = ProblemSpec::new(3, BTreeMap::from([(2, complex)])).unwrap_err();
        assert!(err.to_string().contains("not PT-symmetric"));
    }

    #[test]
    fn index_budget() {
        let spec = ProblemSpec::free(3).unwrap();
        assert!(spec.check_index_budget(200).is_ok());
        assert!(matches!(spec.check_index_budget(201), Err(Error::Precision(_))));
    }
}
