//! Truncated Bloch matrix in the exponential basis.
//!
//! The basis `e_k(x) = exp(i theta_k x)`, `theta_k = 2 pi k + pi t`, satisfies
//! the quasi-periodic boundary conditions exactly, and
//!
//! ```text
//! l(e_p) = theta_p^n e_p + sum_v theta_p^(n-v) p_v(x) e_p,   (p_v e_p, e_k) = c_v(k - p).
//! ```
//!
//! Restricting to `|k|, |p| <= K` and scaling the perturbation by `eps` gives
//! `A(k, p) = theta_p^n [k = p] + eps sum_v theta_p^(n-v) c_v(k - p)`.
//! For PT-symmetric coefficients all entries are real.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::diag::Diag;
use faer::{c64, Mat, Par};
use num_complex::Complex64;

use crate::enclosure::{check_quasimomentum, phase_power};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Eigenpairs whose residual exceeds this multiple of `||A||_inf` are rejected.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct BlochMatrix {
    order: u32,
    t: f64,
    eps: f64,
    k_max: usize,
    bandwidth: u64,
    entries: Mat<c64>,
}

impl BlochMatrix {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Truncation half-width `K`.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn bandwidth(&self) -> u64 {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn index(&self, k: i64) -> usize {
        (k + self.k_max as i64) as usize
    }

    pub fn entry(&self, k: i64, p: i64) -> Complex64 {
        let z = self.entries[(self.index(k), self.index(p))];
        Complex64::new(z.re, z.im)
    }

    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| self.entries[(i, j)].im == 0.0))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = self.entries[(i, j)];
                        Complex64::new(a.re, a.im) * x[j]
                    })
                    .sum()
            })
            .collect()
    }
}

/// Assembles the truncated matrix of `L_t(0) + eps (L_t - L_t(0))`.
pub fn assemble(spec: &ProblemSpec, t: f64, eps: f64, k_max: usize) -> Result<BlochMatrix> {
    check_quasimomentum(t)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Config(format!("eps = {eps} outside [0, 1]")));
    }
    let bandwidth = spec.max_bandwidth();
    if (k_max as u64) < bandwidth + 2 {
        return Err(Error::Config(format!(
            "truncation K = {k_max} too small for coefficient bandwidth {bandwidth} (need K >= {})",
            bandwidth + 2
        )));
    }
    spec.check_index_budget(k_max as u64)?;

    let n = spec.order();
    let dim = 2 * k_max + 1;
    let kk = k_max as i64;
    let mut entries = Mat::<c64>::zeros(dim, dim);
    for p in -kk..=kk {
        let col = (p + kk) as usize;
        entries[(col, col)] = c64::new(phase_power(2 * p, t, n), 0.0);
        for (v, poly) in spec.coeffs() {
            let weight = eps * phase_power(2 * p, t, n - v);
            for (m, c) in poly.terms() {
                let k = p + m;
                if k.abs() <= kk {
                    let row = (k + kk) as usize;
                    entries[(row, col)] += c64::new(weight * c.re, weight * c.im);
                }
            }
        }
    }

    Ok(BlochMatrix {
        order: n,
        t,
        eps,
        k_max,
        bandwidth,
        entries,
    })
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Fourier coefficients `psi_k`, `k = -K..=K`, unit Euclidean norm.
    pub psi: Vec<Complex64>,
    pub k_label: i64,
}

impl EigenPair {
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let k_max = (self.psi.len() / 2) as i64;
        if k.abs() > k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.psi[(k + k_max) as usize]
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub order: u32,
    pub t: f64,
    pub eps: f64,
    pub k_max: usize,
    pub bandwidth: u64,
    /// Labels with `|k_label| <= trusted_window` are insensitive to the truncation.
    pub trusted_window: u64,
    /// Ordered by label, then real part, then imaginary part.
    pub pairs: Vec<EigenPair>,
}

impl EigenSolution {
    pub fn is_trusted(&self, pair: &EigenPair) -> bool {
        pair.k_label.unsigned_abs() <= self.trusted_window
    }

    pub fn trusted(&self) -> impl Iterator<Item = &EigenPair> {
        self.pairs.iter().filter(|p| self.is_trusted(p))
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }
}

/// `W = K - max(ceil(K/2), bandwidth + 1)`, at least 1.
pub fn trusted_window(k_max: usize, bandwidth: u64) -> u64 {
    let k = k_max as u64;
    let margin = k.div_ceil(2).max(bandwidth + 1);
    k.saturating_sub(margin).max(1)
}

/// Index of the dominant coefficient; ties go to the smaller `|k|`, then the negative one.
fn dominant_label(psi: &[Complex64], k_max: i64) -> i64 {
    let mut best = 0i64;
    let mut best_abs = psi[k_max as usize].norm();
    for d in 1..=k_max {
        for k in [-d, d] {
            let a = psi[(k + k_max) as usize].norm();
            if a > best_abs {
                best = k;
                best_abs = a;
            }
        }
    }
    best
}

fn numeric_error(a: &BlochMatrix, msg: impl Into<String>) -> Error {
    Error::Numeric {
        t: a.t,
        eps: a.eps,
        dim: a.dim(),
        msg: msg.into(),
    }
}

fn decompose(a: &BlochMatrix) -> Result<(Vec<c64>, Mat<c64>)> {
    let n = a.dim();
    let par = Par::Seq;
    if a.is_real() {
        let real = Mat::<f64>::from_fn(n, n, |i, j| a.entries[(i, j)].re);
        let mut u = Mat::<f64>::zeros(n, n);
        let mut s_re = Diag::<f64>::zeros(n);
        let mut s_im = Diag::<f64>::zeros(n);
        evd::evd_real(
            real.as_ref(),
            s_re.as_mut(),
            s_im.as_mut(),
            None,
            Some(u.as_mut()),
            par,
            MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<f64>(
                n,
                ComputeEigenvectors::No,
                ComputeEigenvectors::Yes,
                par,
                Default::default(),
            ))),
            Default::default(),
        )
        .map_err(|e| numeric_error(a, format!("{e:?}")))?;

        // complex pairs occupy two adjacent columns as (re, im)
        let mut values = Vec::with_capacity(n);
        let mut vectors = Mat::<c64>::zeros(n, n);
        let mut j = 0;
        while j < n {
            if s_im[j] == 0.0 {
                values.push(c64::new(s_re[j], 0.0));
                for i in 0..n {
                    vectors[(i, j)] = c64::new(u[(i, j)], 0.0);
                }
                j += 1;
            } else {
                values.push(c64::new(s_re[j], s_im[j]));
                values.push(c64::new(s_re[j], -s_im[j]));
                for i in 0..n {
                    vectors[(i, j)] = c64::new(u[(i, j)], u[(i, j + 1)]);
                    vectors[(i, j + 1)] = c64::new(u[(i, j)], -u[(i, j + 1)]);
                }
                j += 2;
            }
        }
        Ok((values, vectors))
    } else {
        let mut u = Mat::<c64>::zeros(n, n);
        let mut s = Diag::<c64>::zeros(n);
        evd::evd_cplx(
            a.entries.as_ref(),
            s.as_mut(),
            None,
            Some(u.as_mut()),
            par,
            MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<c64>(
                n,
                ComputeEigenvectors::No,
                ComputeEigenvectors::Yes,
                par,
                Default::default(),
            ))),
            Default::default(),
        )
        .map_err(|e| numeric_error(a, format!("{e:?}")))?;
        Ok(((0..n).map(|j| s[j]).collect(), u))
    }
}

/// Full eigensystem of the truncated matrix.
///
/// Each eigenvector is scaled to unit norm with its dominant coefficient real
/// and positive. Runs single-threaded.
pub fn eigensystem(a: &BlochMatrix) -> Result<EigenSolution> {
    let n = a.dim();
    let kk = a.k_max as i64;
    let (values, vectors) = decompose(a)?;
    let bound = RESIDUAL_TOLERANCE * a.norm_inf().max(f64::MIN_POSITIVE);

    let mut pairs = Vec::with_capacity(n);
    for (j, value) in values.iter().enumerate() {
        let lambda = Complex64::new(value.re, value.im);
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(numeric_error(a, "non-finite eigenvalue"));
        }
        let mut psi: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(vectors[(i, j)].re, vectors[(i, j)].im))
            .collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(numeric_error(a, "zero eigenvector"));
        }
        let k_label = dominant_label(&psi, kk);
        let pivot = psi[(k_label + kk) as usize];
        let phase = pivot.conj() / pivot.norm();
        for z in &mut psi {
            *z *= phase / norm;
        }

        let ax = a.apply(&psi);
        let residual = ax
            .iter()
            .zip(&psi)
            .map(|(y, x)| (y - lambda * x).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > bound {
            return Err(numeric_error(
                a,
                format!("eigenpair residual {residual:e} exceeds {bound:e}"),
            ));
        }
        pairs.push(EigenPair {
            lambda,
            psi,
            k_label,
        });
    }
    pairs.sort_by(|x, y| {
        x.k_label
            .cmp(&y.k_label)
            .then(x.lambda.re.total_cmp(&y.lambda.re))
            .then(x.lambda.im.total_cmp(&y.lambda.im))
    });

    Ok(EigenSolution {
        order: a.order,
        t: a.t,
        eps: a.eps,
        k_max: a.k_max,
        bandwidth: a.bandwidth,
        trusted_window: trusted_window(a.k_max, a.bandwidth),
        pairs,
    })
}

/// Assemble and solve in one step.
pub fn solve(spec: &ProblemSpec, t: f64, eps: f64, k_max: usize) -> Result<EigenSolution> {
    eigensystem(&assemble(spec, t, eps, k_max)?)
}

/// Default truncation `max(4N + 8, 3 bandwidth + 8)`.
pub fn default_truncation(spec: &ProblemSpec) -> usize {
    let big_n = crate::enclosure::compute_n(crate::enclosure::compute_c(spec));
    (4 * big_n + 8).max(3 * spec.max_bandwidth() + 8) as usize
}

#[derive(Debug, Clone)]
pub struct TruncationEstimate {
    pub solution: EigenSolution,
    /// Per pair of `solution`: distance to the nearest same-label eigenvalue
    /// at truncation `2K`; `None` for untrusted labels.
    pub errors: Vec<Option<f64>>,
}

/// Compares the solution at `K` with the one at `2K`.
pub fn truncation_error_estimate(
    spec: &ProblemSpec,
    t: f64,
    eps: f64,
    k_max: usize,
) -> Result<TruncationEstimate> {
    let coarse = solve(spec, t, eps, k_max)?;
    let fine = solve(spec, t, eps, 2 * k_max)?;
    let errors = coarse
        .pairs
        .iter()
        .map(|pair| {
            if !coarse.is_trusted(pair) {
                return None;
            }
            let nearest = fine
                .pairs
                .iter()
                .filter(|q| q.k_label == pair.k_label)
                .map(|q| (q.lambda - pair.lambda).norm())
                .fold(f64::INFINITY, f64::min);
            Some(nearest)
        })
        .collect();
    Ok(TruncationEstimate {
        solution: coarse,
        errors,
    })
}
