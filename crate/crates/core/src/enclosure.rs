//! Closed-form localisation regions for the Bloch eigenvalues.
//!
//! With `theta_k = 2 pi k + pi t` the free operator has eigenvalues
//! `theta_k^n`. The perturbation size is measured by the constant `C`
//! ([`compute_c`]) and the index `N` ([`compute_n`]); from those follow
//!
//! * the disks `U(k, t)` of radius `delta_k(t) = 3/2 pi^(n-2) C |2k + t|^(n-2)`,
//! * the real-part intervals `I(k, t) = [theta_k - pi, theta_k + pi)^n`,
//! * the strip `S(N, t)` and the rectangle `R(N, t)` around the low indices,
//! * the global rectangle holding every nonreal Bloch eigenvalue,
//! * the small-`C` disks around `k = -1, 0, 1`.
//!
//! Region boundaries are exact: intervals are half-open and the imaginary
//! bounds strict. Tolerances only enter in [`crate::verify`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// `(pi (j + t))^n`. Every interval endpoint and disk centre goes through
/// this with an integer `j`, so shared endpoints are bitwise equal.
pub fn phase_power(j: i64, t: f64, n: u32) -> f64 {
    (PI * (j as f64 + t)).powi(n as i32)
}

/// `theta_k = 2 pi k + pi t`.
pub fn quasi_frequency(k: i64, t: f64) -> f64 {
    PI * ((2 * k) as f64 + t)
}

/// Eigenvalue `theta_k^n` of the free operator.
pub fn free_eigenvalue(k: i64, t: f64, n: u32) -> f64 {
    phase_power(2 * k, t, n)
}

fn binomial(n: u32, s: u32) -> f64 {
    (0..s).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub(crate) fn check_quasimomentum(t: f64) -> Result<()> {
    if t > -1.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("quasimomentum t = {t} outside (-1, 1]")))
    }
}

/// `C = sum_v sum_{s <= n-v} binom(n-v, s) ||p_v^(s)|| / pi^(v+s-2)`.
pub fn compute_c(spec: &ProblemSpec) -> f64 {
    let n = spec.order();
    spec.coeffs()
        .map(|(v, p)| {
            let order = n - v;
            (0..=order)
                .map(|s| {
                    binomial(order, s) * p.derivative(s).l2_norm() / PI.powi((v + s - 2) as i32)
                })
                .sum::<f64>()
        })
        .sum()
}

/// Smallest integer `N >= C / pi^2 + 1`.
///
/// A threshold within `1e-12` of an integer is taken to be that integer, so
/// round-off on an exact boundary does not bump `N`.
pub fn compute_n(c: f64) -> u64 {
    let threshold = c / (PI * PI) + 1.0;
    let nearest = threshold.round();
    let n = if (threshold - nearest).abs() <= 1e-12 {
        nearest
    } else {
        threshold.ceil()
    };
    n.max(1.0) as u64
}

pub fn delta_k(k: i64, t: f64, c: f64, n: u32) -> f64 {
    1.5 * PI.powi(n as i32 - 2) * c * ((2 * k) as f64 + t).abs().powi(n as i32 - 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Self { center, radius }
    }

    /// `radius - |z - center|`; positive inside the open disk.
    pub fn margin(&self, z: Complex64) -> f64 {
        self.radius - (z - self.center).norm()
    }

    /// Membership with the strict bound relaxed to `<= radius + slack`.
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        self.margin(z) >= -slack
    }
}

/// `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfOpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl HalfOpenInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    /// Distance from `x` to the closed interval, zero inside.
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// `{ Re z in re_range, |Im z| < im_bound }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub re_range: HalfOpenInterval,
    pub im_bound: f64,
}

/// `{ |Re z| <= re_bound, |Im z| < im_bound }`, the box holding all nonreal spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonrealRect {
    pub re_bound: f64,
    pub im_bound: f64,
}

pub fn disk_u(k: i64, t: f64, c: f64, n: u32) -> Disk {
    Disk::new(
        Complex64::new(free_eigenvalue(k, t, n), 0.0),
        delta_k(k, t, c, n),
    )
}

pub fn interval_i(k: i64, t: f64, n: u32) -> HalfOpenInterval {
    HalfOpenInterval {
        lo: phase_power(2 * k - 1, t, n),
        hi: phase_power(2 * k + 1, t, n),
    }
}

/// The `k` with `Re z in I(k, t)`; the intervals tile the real line.
pub fn interval_index(x: f64, t: f64, n: u32) -> i64 {
    let root = x.signum() * x.abs().powf(1.0 / n as f64);
    let mut k = ((root / PI - t) / 2.0).round() as i64;
    loop {
        let i = interval_i(k, t, n);
        if x < i.lo {
            k -= 1;
        } else if x >= i.hi {
            k += 1;
        } else {
            return k;
        }
    }
}

/// Real-part range `[(-2 pi N + pi + pi t)^n, (2 pi N - pi + pi t)^n)` of `S(N, t)`.
pub fn strip_s(big_n: u64, t: f64, n: u32) -> HalfOpenInterval {
    let big_n = big_n as i64;
    HalfOpenInterval {
        lo: phase_power(-2 * big_n + 1, t, n),
        hi: phase_power(2 * big_n - 1, t, n),
    }
}

/// `sqrt(10)/3 (2N + 1)^(n - 3/2) pi^(n-2) C`.
pub fn strip_im_bound(big_n: u64, c: f64, n: u32) -> f64 {
    10f64.sqrt() / 3.0
        * (2.0 * big_n as f64 + 1.0).powf(n as f64 - 1.5)
        * PI.powi(n as i32 - 2)
        * c
}

pub fn rect_r(big_n: u64, t: f64, c: f64, n: u32) -> Rect {
    Rect {
        re_range: strip_s(big_n, t, n),
        im_bound: strip_im_bound(big_n, c, n),
    }
}

pub fn nonreal_rectangle(spec: &ProblemSpec) -> NonrealRect {
    let c = compute_c(spec);
    let big_n = compute_n(c);
    let n = spec.order();
    NonrealRect {
        re_bound: (2.0 * PI * big_n as f64).powi(n as i32),
        im_bound: strip_im_bound(big_n, c, n),
    }
}

/// `pi^2 2^(1/2 - n)`; at or below it every Bloch eigenvalue is real.
pub fn reality_threshold(n: u32) -> f64 {
    PI * PI * 2f64.powf(0.5 - n as f64)
}

pub fn reality_holds(c: f64, n: u32) -> bool {
    c <= reality_threshold(n)
}

/// The enlarged disks around `k = -1, 0, 1` valid under the small-`C` hypothesis.
pub fn small_coefficient_disks(t: f64, c: f64, n: u32) -> Result<Vec<(i64, Disk)>> {
    if !reality_holds(c, n) {
        return Err(Error::Hypothesis(format!(
            "C = {c} exceeds the reality threshold {} for n = {n}",
            reality_threshold(n)
        )));
    }
    let pi_n = PI.powi(n as i32);
    let side = |k: i64| {
        let w = ((2 * k) as f64 + t).abs().powi(n as i32 - 2);
        Disk::new(
            Complex64::new(free_eigenvalue(k, t, n), 0.0),
            0.3 * w * pi_n,
        )
    };
    Ok(vec![
        (-1, side(-1)),
        (
            0,
            Disk::new(Complex64::new(free_eigenvalue(0, t, n), 0.0), 0.2 * pi_n),
        ),
        (1, side(1)),
    ])
}

/// Both sides of the Leibniz-rule bound on `||(conj(p_v) e^{i theta x})^(n-v)||`.
///
/// The left side is exact: `conj(p_v) e^{i theta x}` has coefficient
/// `conj(c_v(m))` at angular frequency `theta - 2 pi m`.
pub fn leibniz_norm_bound(v: u32, theta: f64, spec: &ProblemSpec) -> (f64, f64) {
    let n = spec.order();
    let Some(p) = spec.coeff(v) else {
        return (0.0, 0.0);
    };
    let order = n - v;
    let lhs = p
        .terms()
        .map(|(m, c)| c.norm_sqr() * (theta - 2.0 * PI * m as f64).powi(2 * order as i32))
        .sum::<f64>()
        .sqrt();
    let rhs = (0..=order)
        .map(|s| {
            binomial(order, s) * theta.abs().powi((order - s) as i32) * p.derivative(s).l2_norm()
        })
        .sum();
    (lhs, rhs)
}

#[derive(Debug, Clone, Serialize)]
pub struct LabeledDisk {
    pub k: i64,
    pub disk: Disk,
}

/// All regions for one quasimomentum.
#[derive(Debug, Clone, Serialize)]
pub struct EnclosureReport {
    pub order: u32,
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub reality_threshold: f64,
    pub reality_holds: bool,
    /// Disks are listed for `|k| <= window`.
    pub window: u64,
    pub disks: Vec<LabeledDisk>,
    pub strip_re_range: HalfOpenInterval,
    pub rectangle_r: Rect,
    pub nonreal_rect: NonrealRect,
    /// Small-`C` disks at `k = -1, 0, 1` followed by `U(k, t)` for `1 < |k| <= window`.
    pub small_coefficient_disks: Option<Vec<LabeledDisk>>,
}

/// Default disk window `max(3N + 5, 10)`.
pub fn default_window(big_n: u64) -> u64 {
    (3 * big_n + 5).max(10)
}

impl EnclosureReport {
    pub fn new(spec: &ProblemSpec, t: f64, window: Option<u64>) -> Result<Self> {
        check_quasimomentum(t)?;
        let n = spec.order();
        let c = compute_c(spec);
        let big_n = compute_n(c);
        let window = window.unwrap_or_else(|| default_window(big_n));
        spec.check_index_budget(window)?;
        let w = window as i64;

        let disks = (-w..=w)
            .map(|k| LabeledDisk {
                k,
                disk: disk_u(k, t, c, n),
            })
            .collect();
        let small_coefficient_disks = if reality_holds(c, n) {
            let mut list: Vec<LabeledDisk> = small_coefficient_disks(t, c, n)?
                .into_iter()
                .map(|(k, disk)| LabeledDisk { k, disk })
                .collect();
            list.extend((-w..=w).filter(|k| k.abs() > 1).map(|k| LabeledDisk {
                k,
                disk: disk_u(k, t, c, n),
            }));
            list.sort_by_key(|d| d.k);
            Some(list)
        } else {
            None
        };

        Ok(Self {
            order: n,
            t,
            c,
            big_n,
            reality_threshold: reality_threshold(n),
            reality_holds: reality_holds(c, n),
            window,
            disks,
            strip_re_range: strip_s(big_n, t, n),
            rectangle_r: rect_r(big_n, t, c, n),
            nonreal_rect: NonrealRect {
                re_bound: (2.0 * PI * big_n as f64).powi(n as i32),
                im_bound: strip_im_bound(big_n, c, n),
            },
            small_coefficient_disks: small_coefficient_disks,
        })
    }

    pub fn disk(&self, k: i64) -> Option<&Disk> {
        self.disks.iter().find(|d| d.k == k).map(|d| &d.disk)
    }

    /// `U(k, t)` as listed in the report, or from the formula outside the window.
    pub fn disk_or_formula(&self, k: i64) -> Disk {
        self.disk(k)
            .copied()
            .unwrap_or_else(|| disk_u(k, self.t, self.c, self.order))
    }

    pub fn small_coefficient_disk(&self, k: i64) -> Option<&Disk> {
        self.small_coefficient_disks
            .as_ref()?
            .iter()
            .find(|d| d.k == k)
            .map(|d| &d.disk)
    }

    /// Disks `U(k, t)` with `|k| >= N`, the ones the localisation statements cover.
    pub fn outer_disks(&self) -> impl Iterator<Item = &LabeledDisk> {
        let big_n = self.big_n as i64;
        self.disks.iter().filter(move |d| d.k.abs() >= big_n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointWitness {
    pub first: String,
    pub second: String,
    /// Separation minus the sum of radii; non-positive for a violation.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub holds: bool,
    pub witnesses: Vec<DisjointWitness>,
}

fn pairwise_witnesses(label: &str, disks: &[&LabeledDisk], out: &mut Vec<DisjointWitness>) {
    for (i, a) in disks.iter().enumerate() {
        for b in &disks[i + 1..] {
            let gap = (a.disk.center - b.disk.center).norm() - a.disk.radius - b.disk.radius;
            if gap <= 0.0 {
                out.push(DisjointWitness {
                    first: format!("{label}({},t)", a.k),
                    second: format!("{label}({},t)", b.k),
                    gap,
                });
            }
        }
    }
}

/// Geometric check that the closed disks `U(k, t)`, `|k| >= N`, are pairwise
/// disjoint and disjoint from the closure of `R(N, t)`; when present, the
/// small-`C` disk family is checked for pairwise disjointness as well.
pub fn disjointness_certificate(report: &EnclosureReport) -> Certificate {
    let mut witnesses = Vec::new();
    let outer: Vec<&LabeledDisk> = report.outer_disks().collect();
    pairwise_witnesses("U", &outer, &mut witnesses);

    let a = report.rectangle_r.re_range;
    for d in &outer {
        let gap = a.distance(d.disk.center.re) - d.disk.radius;
        if gap <= 0.0 {
            witnesses.push(DisjointWitness {
                first: format!("U({},t)", d.k),
                second: format!("R({},t)", report.big_n),
                gap,
            });
        }
    }

    if let Some(small) = &report.small_coefficient_disks {
        let refs: Vec<&LabeledDisk> = small.iter().collect();
        pairwise_witnesses("V", &refs, &mut witnesses);
    }

    Certificate {
        holds: witnesses.is_empty(),
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FourierPoly;
    use std::collections::BTreeMap;

    fn cos_spec(a: f64) -> ProblemSpec {
        ProblemSpec::new(3, BTreeMap::from([(2, FourierPoly::cosine(a, 1))])).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn constant_c_examples() {
        assert_eq!(compute_c(&ProblemSpec::free(3).unwrap()), 0.0);
        // ||p|| + ||p'|| / pi with ||p|| = sqrt 2, ||p'|| = 2 sqrt 2 pi
        assert!(close(compute_c(&cos_spec(1.0)), 3.0 * 2f64.sqrt(), 1e-14));
        assert!(close(compute_c(&cos_spec(0.25)), 0.75 * 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn index_n_examples() {
        assert_eq!(compute_n(0.0), 1);
        assert_eq!(compute_n(3.0 * 2f64.sqrt()), 2);
        assert_eq!(compute_n(PI * PI), 2);
        assert_eq!(compute_n(PI * PI * (1.0 + 1e-14)), 2);
        assert_eq!(compute_n(PI * PI * 1.001), 3);
    }

    #[test]
    fn delta_and_disks() {
        let c = 3.0 * 2f64.sqrt();
        assert_eq!(delta_k(5, 0.3, 0.0, 3), 0.0);
        let d = delta_k(2, 0.0, c, 3);
        assert!(close(d, 18.0 * 2f64.sqrt() * PI, 1e-14));
        assert!(close(d, 79.97, 1e-3));
        assert_eq!(delta_k(-2, 0.0, c, 3), d);

        let u = disk_u(1, 0.0, 0.0, 3);
        assert!(close(u.center.re, (2.0 * PI).powi(3), 1e-15));
        assert_eq!(u.radius, 0.0);
        let u = disk_u(2, 0.0, c, 3);
        assert!(close(u.center.re, 1984.40, 1e-5));
        let u = disk_u(0, 1.0, 0.0, 3);
        assert!(close(u.center.re, PI.powi(3), 1e-15));
    }

    #[test]
    fn intervals_tile_exactly() {
        let i0 = interval_i(0, 0.0, 3);
        assert!(close(i0.lo, -PI.powi(3), 1e-15) && close(i0.hi, PI.powi(3), 1e-15));
        let i1 = interval_i(1, 0.0, 3);
        assert!(close(i1.hi, (3.0 * PI).powi(3), 1e-15));
        assert!(close(i1.hi, 837.17, 1e-5));
        for t in [-0.95, -0.3, 0.0, 0.41, 1.0] {
            for k in -12..12 {
                assert_eq!(interval_i(k, t, 5).hi, interval_i(k + 1, t, 5).lo);
            }
            for big_n in 1..5 {
                let s = strip_s(big_n, t, 3);
                let m = big_n as i64 - 1;
                assert_eq!(s.lo, interval_i(-m, t, 3).lo);
                assert_eq!(s.hi, interval_i(m, t, 3).hi);
            }
        }
        let s2 = strip_s(2, 0.0, 3);
        assert!(close(s2.hi, 837.17, 1e-5) && close(s2.lo, -837.17, 1e-5));
    }

    #[test]
    fn interval_lookup() {
        for t in [-0.9, 0.0, 0.5, 1.0] {
            for k in -20..=20 {
                let i = interval_i(k, t, 3);
                assert_eq!(interval_index(i.lo, t, 3), k);
                assert_eq!(interval_index(0.5 * (i.lo + i.hi), t, 3), k);
                assert_eq!(interval_index(i.hi, t, 3), k + 1);
            }
        }
    }

    #[test]
    fn rectangles() {
        assert_eq!(rect_r(3, 0.1, 0.0, 3).im_bound, 0.0);
        let r = rect_r(2, 0.0, 3.0 * 2f64.sqrt(), 3);
        let expected = 10f64.sqrt() / 3.0 * 5f64.powf(1.5) * PI * 3.0 * 2f64.sqrt();
        assert!(close(r.im_bound, expected, 1e-14));
        assert!(close(r.im_bound, 157.1, 1e-3));
        assert!(close(rect_r(1, 0.0, 1.0, 3).im_bound, 17.21, 1e-3));

        let free = nonreal_rectangle(&ProblemSpec::free(3).unwrap());
        assert!(close(free.re_bound, 248.05, 1e-4));
        assert_eq!(free.im_bound, 0.0);
        let full = nonreal_rectangle(&cos_spec(1.0));
        assert!(close(full.re_bound, (4.0 * PI).powi(3), 1e-15));
        let half = nonreal_rectangle(&cos_spec(0.5));
        assert_eq!(compute_n(compute_c(&cos_spec(0.5))), 2);
        assert!(close(half.im_bound / full.im_bound, 0.5, 1e-14));
    }

    #[test]
    fn reality_threshold_examples() {
        assert!(close(reality_threshold(3), PI * PI / (4.0 * 2f64.sqrt()), 1e-15));
        assert!((reality_threshold(3) - PI * PI * 2f64.powf(-2.5)).abs() <= 1e-15);
        assert!((reality_threshold(3) - 1.744716).abs() < 1e-6);
        assert!(reality_holds(0.0, 7));
        assert!(!reality_holds(3.0 * 2f64.sqrt(), 3));
    }

    #[test]
    fn small_c_disks() {
        let d = small_coefficient_disks(0.0, 0.0, 3).unwrap();
        assert_eq!(d[1].1.center.re, 0.0);
        assert!(close(d[1].1.radius, PI.powi(3) / 5.0, 1e-15));
        assert!(close(d[2].1.center.re, (2.0 * PI).powi(3), 1e-15));
        assert!(close(d[2].1.radius, 0.6 * PI.powi(3), 1e-15));
        let d = small_coefficient_disks(1.0, 0.0, 3).unwrap();
        assert!(close(d[0].1.center.re, -PI.powi(3), 1e-15));
        assert!(close(d[0].1.radius, 9.30, 1e-3));
        assert!(matches!(
            small_coefficient_disks(0.0, 3.0, 3),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn leibniz_examples() {
        assert_eq!(leibniz_norm_bound(2, 1.0, &ProblemSpec::free(3).unwrap()), (0.0, 0.0));
        let (lhs, rhs) = leibniz_norm_bound(2, 2.0 * PI, &cos_spec(1.0));
        assert!(close(lhs, 4.0 * PI, 1e-14));
        assert!(close(rhs, 4.0 * 2f64.sqrt() * PI, 1e-14));

        let spec = ProblemSpec::new(3, BTreeMap::from([(3, FourierPoly::cosine(0.7, 2))])).unwrap();
        let (lhs, rhs) = leibniz_norm_bound(3, 1.3, &spec);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn certificate_examples() {
        let free = EnclosureReport::new(&ProblemSpec::free(3).unwrap(), 0.3, None).unwrap();
        assert!(disjointness_certificate(&free).holds);

        let mut report = EnclosureReport::new(&cos_spec(1.0), 0.0, Some(10)).unwrap();
        assert_eq!(report.big_n, 2);
        assert!(disjointness_certificate(&report).holds);

        let inflated = report.disks.iter_mut().find(|d| d.k == 2).unwrap();
        inflated.disk.radius *= 100.0;
        let cert = disjointness_certificate(&report);
        assert!(!cert.holds);
        assert!(cert.witnesses.iter().any(|w| w.first == "U(2,t)" || w.second == "U(2,t)"));
    }

    #[test]
    fn report_window_and_small_c_family() {
        let report = EnclosureReport::new(&cos_spec(0.25), 0.5, None).unwrap();
        assert_eq!(report.window, 11);
        assert!(report.reality_holds);
        let small = report.small_coefficient_disks.as_ref().unwrap();
        assert_eq!(small.len(), 23);
        assert!(disjointness_certificate(&report).holds);
        assert!(EnclosureReport::new(&cos_spec(1.0), 0.0, None)
            .unwrap()
            .small_coefficient_disks
            .is_none());
        assert!(EnclosureReport::new(&cos_spec(1.0), -1.0, None).is_err());
        assert!(matches!(
            EnclosureReport::new(&cos_spec(1.0), 0.0, Some(500)),
            Err(Error::Precision(_))
        ));
    }
}
