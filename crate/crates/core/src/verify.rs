//! Executable checks of the localisation and reality statements.
//!
//! Each check inspects the trusted eigenpairs of one truncated solution
//! against an [`EnclosureReport`] for the same quasimomentum and returns a
//! [`CheckRecord`]. Strict inequalities of the theory are relaxed by the
//! configurable [`Tolerances`]; nothing else is hidden inside the checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{has_ambiguous_match, match_points};
use crate::enclosure::{
    check_quasimomentum, disjointness_certificate, free_eigenvalue, interval_index, phase_power,
    Disk, EnclosureReport,
};
use crate::error::{Error, Result};
use crate::galerkin::{solve, EigenSolution};
use crate::problem::ProblemSpec;

pub const DISK_CONTAINMENT: &str = "disk_containment";
pub const DISK_DISJOINTNESS: &str = "disk_disjointness";
pub const SMALL_COEFFICIENT_DISKS: &str = "small_coefficient_disks";
pub const STRIP_RECTANGLE: &str = "strip_rectangle";
pub const DISK_COUNT: &str = "disk_count";
pub const DISK_REALITY: &str = "disk_reality";
pub const CONJUGATE_PAIRING: &str = "conjugate_pairing";
pub const COEFFICIENT_DOMINANCE: &str = "coefficient_dominance";
pub const COEFFICIENT_TAIL: &str = "coefficient_tail";
pub const ROW_BOUND: &str = "row_bound";
pub const ROW_RESIDUAL: &str = "row_residual";
pub const HOMOTOPY: &str = "homotopy";

/// Dominant coefficient of a disk eigenfunction exceeds this.
pub const DOMINANCE_THRESHOLD: f64 = 2.0 / 3.0;
/// Mass of a strip eigenfunction outside `|p| <= N` stays below this.
pub const TAIL_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative slack added to every strict region bound.
    pub slack: f64,
    /// `|Im z| <= reality_tol (1 + |z|)` counts as real.
    pub reality_tol: f64,
    /// Admissible coverage gap, relative to the neighbouring band width.
    pub coverage_gap_tol: f64,
    /// Conjugate-pair mismatch, relative to `1 + |z|`.
    pub pairing_tol: f64,
    /// Row residual of the eigen-equation, relative to `1 + |z|`.
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slack: 1e-6,
            reality_tol: 1e-7,
            coverage_gap_tol: 1e-3,
            pairing_tol: 1e-8,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("slack", self.slack),
            ("reality_tol", self.reality_tol),
            ("coverage_gap_tol", self.coverage_gap_tol),
            ("pairing_tol", self.pairing_tol),
            ("residual_tol", self.residual_tol),
        ];
        for (name, value) in all {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("tolerance {name} must be positive (got {value})")));
            }
        }
        Ok(())
    }

    /// Absolute slack for a bound living at magnitude `scale`.
    pub fn slack_at(&self, scale: f64) -> f64 {
        self.slack * (1.0 + scale)
    }

    pub fn is_real(&self, z: Complex64) -> bool {
        z.im.abs() <= self.reality_tol * (1.0 + z.norm())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub value: Complex64,
    pub region: String,
    /// Bound minus observed quantity; negative beyond the slack on failure.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub t: f64,
    pub eps: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub pass: bool,
    /// Number of individual inequalities evaluated.
    pub tested: usize,
    /// Smallest margin seen, `None` when nothing was tested.
    pub min_margin: Option<f64>,
    pub witnesses: Vec<Witness>,
}

struct Recorder(CheckRecord);

impl Recorder {
    fn new(name: &str, t: f64, eps: f64, k_max: usize) -> Self {
        Self(CheckRecord {
            name: name.to_string(),
            t,
            eps,
            k_max,
            pass: true,
            tested: 0,
            min_margin: None,
            witnesses: Vec::new(),
        })
    }

    fn for_solution(name: &str, sol: &EigenSolution) -> Self {
        Self::new(name, sol.t, sol.eps, sol.k_max)
    }

    /// Records `margin`; fails when it falls below `-tolerance`.
    fn observe(&mut self, value: Complex64, region: impl FnOnce() -> String, margin: f64, tolerance: f64) {
        let r = &mut self.0;
        r.tested += 1;
        r.min_margin = Some(r.min_margin.map_or(margin, |m| m.min(margin)));
        if !(margin >= -tolerance) {
            r.pass = false;
            r.witnesses.push(Witness {
                value,
                region: region(),
                margin,
            });
        }
    }

    fn finish(self) -> CheckRecord {
        debug_assert!(self.0.pass || !self.0.witnesses.is_empty());
        self.0
    }
}

fn big_n(report: &EnclosureReport) -> i64 {
    report.big_n as i64
}

fn check_same_t(sol: &EigenSolution, report: &EnclosureReport) {
    debug_assert_eq!(sol.t, report.t, "solution and report must share t");
}

/// Trusted eigenvalues with `Re z in I(k, t)`, `N <= |k| <= W`, lie in `U(k, t)`.
pub fn check_disk_containment(sol: &EigenSolution, report: &EnclosureReport, tol: &Tolerances) -> CheckRecord {
    check_same_t(sol, report);
    let mut rec = Recorder::for_solution(DISK_CONTAINMENT, sol);
    let w = sol.trusted_window as i64;
    for pair in sol.trusted() {
        let k = interval_index(pair.lambda.re, sol.t, sol.order);
        if k.abs() < big_n(report) || k.abs() > w {
            continue;
        }
        let disk = report.disk_or_formula(k);
        rec.observe(
            pair.lambda,
            || format!("U({k},t)"),
            disk.margin(pair.lambda),
            tol.slack_at(disk.center.norm()),
        );
    }
    rec.finish()
}

/// Geometric disjointness of the outer disks and `R(N, t)` (and of the small-`C` family).
pub fn check_disk_disjointness(report: &EnclosureReport, k_max: usize) -> CheckRecord {
    let mut rec = Recorder::new(DISK_DISJOINTNESS, report.t, 1.0, k_max);
    let cert = disjointness_certificate(report);
    rec.0.tested = report.disks.len();
    rec.0.pass = cert.holds;
    // the certificate reports only touching or overlapping pairs
    rec.0.witnesses = cert
        .witnesses
        .into_iter()
        .map(|w| Witness {
            value: Complex64::new(f64::NAN, f64::NAN),
            region: format!("{} vs {}", w.first, w.second),
            margin: w.gap,
        })
        .collect();
    rec.finish()
}

/// Trusted eigenvalues in the strip satisfy `|Im z| < im_bound`.
pub fn check_strip_rectangle(sol: &EigenSolution, report: &EnclosureReport, tol: &Tolerances) -> CheckRecord {
    check_same_t(sol, report);
    let mut rec = Recorder::for_solution(STRIP_RECTANGLE, sol);
    let rect = report.rectangle_r;
    for pair in sol.trusted() {
        if !rect.re_range.contains(pair.lambda.re) {
            continue;
        }
        rec.observe(
            pair.lambda,
            || format!("R({},t)", report.big_n),
            rect.im_bound - pair.lambda.im.abs(),
            tol.slack_at(pair.lambda.norm()),
        );
    }
    rec.finish()
}

fn trusted_in_disk<'a>(
    sol: &'a EigenSolution,
    disk: &'a Disk,
    tol: &'a Tolerances,
) -> impl Iterator<Item = Complex64> + 'a {
    let slack = tol.slack_at(disk.center.norm());
    sol.trusted()
        .map(|p| p.lambda)
        .filter(move |z| disk.contains(*z, slack))
}

fn count_margin(count: usize) -> f64 {
    -((count as f64) - 1.0).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskEigenvalueRecords {
    pub count: CheckRecord,
    pub real: CheckRecord,
}

/// Each `U(k, t)`, `N <= |k| <= W`, holds exactly one trusted eigenvalue, and it is real.
pub fn check_disk_eigenvalues(sol: &EigenSolution, report: &EnclosureReport, tol: &Tolerances) -> DiskEigenvalueRecords {
    check_same_t(sol, report);
    let mut count = Recorder::for_solution(DISK_COUNT, sol);
    let mut real = Recorder::for_solution(DISK_REALITY, sol);
    let w = sol.trusted_window as i64;
    for k in (-w..=w).filter(|k| k.abs() >= big_n(report)) {
        let disk = report.disk_or_formula(k);
        let inside: Vec<Complex64> = trusted_in_disk(sol, &disk, tol).collect();
        count.observe(
            disk.center,
            || format!("U({k},t) holds {}", inside.len()),
            count_margin(inside.len()),
            0.0,
        );
        for z in inside {
            real.observe(
                z,
                || format!("U({k},t)"),
                tol.reality_tol * (1.0 + z.norm()) - z.im.abs(),
                0.0,
            );
        }
    }
    DiskEigenvalueRecords {
        count: count.finish(),
        real: real.finish(),
    }
}

/// Under `C <= pi^2 2^(1/2-n)`: every trusted eigenvalue lies in exactly one
/// disk of the small-`C` family, each disk holds exactly one, and all are real.
pub fn check_small_coefficient_disks(
    sol: &EigenSolution,
    report: &EnclosureReport,
    tol: &Tolerances,
) -> Result<CheckRecord> {
    check_same_t(sol, report);
    if !report.reality_holds {
        return Err(Error::Hypothesis(format!(
            "C = {} exceeds the reality threshold {}",
            report.c, report.reality_threshold
        )));
    }
    let mut rec = Recorder::for_solution(SMALL_COEFFICIENT_DISKS, sol);
    let w = sol.trusted_window as i64;
    let disks: Vec<(i64, Disk)> = (-w..=w)
        .map(|k| {
            let disk = report
                .small_coefficient_disk(k)
                .copied()
                .unwrap_or_else(|| report.disk_or_formula(k));
            (k, disk)
        })
        .collect();

    for (k, disk) in &disks {
        let n_inside = trusted_in_disk(sol, disk, tol).count();
        rec.observe(
            disk.center,
            || format!("U({k},t) holds {n_inside}"),
            count_margin(n_inside),
            0.0,
        );
    }
    for pair in sol.trusted() {
        let z = pair.lambda;
        let hits = disks
            .iter()
            .filter(|(_, d)| d.contains(z, tol.slack_at(d.center.norm())))
            .count();
        rec.observe(z, || format!("in {hits} disks"), count_margin(hits), 0.0);
        rec.observe(
            z,
            || "real axis".to_string(),
            tol.reality_tol * (1.0 + z.norm()) - z.im.abs(),
            0.0,
        );
    }
    Ok(rec.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRecords {
    pub dominance: CheckRecord,
    pub tail: CheckRecord,
}

/// Dominance `|psi_k| > 2/3` for disk eigenpairs; tail mass `< 1/10` and
/// maximiser `> 3/sqrt(10(2N+1))` for strip eigenpairs.
pub fn check_coefficient_inequalities(
    sol: &EigenSolution,
    report: &EnclosureReport,
    tol: &Tolerances,
) -> CoefficientRecords {
    check_same_t(sol, report);
    let mut dominance = Recorder::for_solution(COEFFICIENT_DOMINANCE, sol);
    let mut tail = Recorder::for_solution(COEFFICIENT_TAIL, sol);
    let nn = big_n(report);
    let w = sol.trusted_window as i64;
    let kk = sol.k_max as i64;
    let max_floor = 3.0 / (10.0 * (2 * nn + 1) as f64).sqrt();

    for pair in sol.trusted() {
        let z = pair.lambda;
        let k = interval_index(z.re, sol.t, sol.order);
        if k.abs() >= nn && k.abs() <= w {
            let disk = report.disk_or_formula(k);
            if disk.contains(z, tol.slack_at(disk.center.norm())) {
                dominance.observe(
                    z,
                    || format!("U({k},t)"),
                    pair.coefficient(k).norm() - DOMINANCE_THRESHOLD,
                    tol.slack,
                );
            }
        }
        if report.strip_re_range.contains(z.re) {
            let mass: f64 = (-kk..=kk)
                .filter(|p| p.abs() > nn)
                .map(|p| pair.coefficient(p).norm_sqr())
                .sum();
            tail.observe(z, || format!("S({nn},t) tail"), TAIL_THRESHOLD - mass, tol.slack);
            let max_low = (-nn..=nn)
                .map(|p| pair.coefficient(p).norm())
                .fold(0.0, f64::max);
            tail.observe(z, || format!("S({nn},t) maximiser"), max_low - max_floor, tol.slack);
        }
    }
    CoefficientRecords {
        dominance: dominance.finish(),
        tail: tail.finish(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowRecords {
    pub bound: CheckRecord,
    pub residual: CheckRecord,
}

/// `S_k = sum_v sum_p theta_p^(n-v) c_v(k-p) psi_p` for one eigenvector.
fn perturbation_row(spec: &ProblemSpec, sol: &EigenSolution, psi: &crate::galerkin::EigenPair, k: i64) -> Complex64 {
    let n = sol.order;
    let kk = sol.k_max as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (v, poly) in spec.coeffs() {
        for (m, c) in poly.terms() {
            let p = k - m;
            if p.abs() <= kk {
                sum += c * phase_power(2 * p, sol.t, n - v) * psi.coefficient(p);
            }
        }
    }
    sum
}

/// Row bounds `|S_k| <= |theta_k|^(n-2) C` (`pi^(n-2) C` for `k = 0`) and the
/// row identity `(z - theta_k^n) psi_k = eps S_k` on interior rows.
pub fn check_rhs_bounds(
    sol: &EigenSolution,
    spec: &ProblemSpec,
    report: &EnclosureReport,
    tol: &Tolerances,
) -> RowRecords {
    check_same_t(sol, report);
    let mut bound = Recorder::for_solution(ROW_BOUND, sol);
    let mut residual = Recorder::for_solution(ROW_RESIDUAL, sol);
    let n = sol.order;
    let interior = sol.k_max as i64 - sol.bandwidth as i64;

    for pair in sol.trusted() {
        let z = pair.lambda;
        for k in -interior..=interior {
            let s_k = perturbation_row(spec, sol, pair, k);
            let limit = if k == 0 {
                PI.powi(n as i32 - 2) * report.c
            } else {
                (PI * ((2 * k) as f64 + sol.t)).abs().powi(n as i32 - 2) * report.c
            };
            bound.observe(z, || format!("row {k}"), limit - s_k.norm(), tol.slack * limit);

            let lhs = (z - free_eigenvalue(k, sol.t, n)) * pair.coefficient(k);
            let r = (lhs - sol.eps * s_k).norm();
            residual.observe(
                z,
                || format!("row {k}"),
                tol.residual_tol * (1.0 + z.norm()) - r,
                0.0,
            );
        }
    }
    RowRecords {
        bound: bound.finish(),
        residual: residual.finish(),
    }
}

/// The trusted eigenvalue multiset equals its complex conjugate.
pub fn check_conjugate_pairing(sol: &EigenSolution, tol: &Tolerances) -> CheckRecord {
    let mut rec = Recorder::for_solution(CONJUGATE_PAIRING, sol);
    let values: Vec<Complex64> = sol.trusted().map(|p| p.lambda).collect();
    let conj: Vec<Complex64> = values.iter().map(|z| z.conj()).collect();
    let matching = match_points(&values, &conj);
    for (i, &j) in matching.iter().enumerate() {
        let z = values[i];
        rec.observe(
            z,
            || "conjugate partner".to_string(),
            tol.pairing_tol * (1.0 + z.norm()) - (z - conj[j]).norm(),
            0.0,
        );
    }
    rec.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Label at `eps = 0`.
    pub k_label: i64,
    pub trusted: bool,
    /// One eigenvalue per `eps` grid point.
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskCount {
    pub k: i64,
    pub at_start: usize,
    pub at_end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyTrace {
    pub t: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub eps_grid: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    /// Grid steps `i -> i + 1` whose matching had near-tied candidates.
    pub ambiguous_steps: Vec<usize>,
    pub counts: Vec<DiskCount>,
    pub record: CheckRecord,
}

pub fn validate_eps_grid(eps_grid: &[f64]) -> Result<()> {
    let bad = |msg: &str| Err(Error::Config(format!("eps grid: {msg}")));
    if eps_grid.len() < 2 {
        return bad("needs at least two points");
    }
    if eps_grid[0] != 0.0 || *eps_grid.last().unwrap() != 1.0 {
        return bad("must start at 0 and end at 1");
    }
    for pair in eps_grid.windows(2) {
        let step = pair[1] - pair[0];
        if !(step > 0.0) {
            return bad("must be strictly increasing");
        }
        if step > 0.1 + 1e-12 {
            return bad("spacing must not exceed 0.1");
        }
    }
    Ok(())
}

/// `0, 1/steps, ..., 1`.
pub fn uniform_eps_grid(steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// Follows every eigenvalue of `L_{t,eps}` from `eps = 0` to `eps = 1`.
///
/// Consecutive grid points are matched by minimum total distance. The check
/// passes when every trusted trajectory stays inside its own disk `U(k, t)`
/// (`|k| >= N`) or inside `R(N, t)` (`|k| < N`), and the per-disk counts at
/// both ends agree.
pub fn homotopy_trace(
    spec: &ProblemSpec,
    t: f64,
    k_max: usize,
    eps_grid: &[f64],
    report: &EnclosureReport,
    tol: &Tolerances,
) -> Result<HomotopyTrace> {
    check_quasimomentum(t)?;
    validate_eps_grid(eps_grid)?;
    let solutions: Vec<EigenSolution> = eps_grid
        .par_iter()
        .map(|&eps| solve(spec, t, eps, k_max))
        .collect::<Result<_>>()?;

    let first = &solutions[0];
    let mut trajectories: Vec<Trajectory> = first
        .pairs
        .iter()
        .map(|p| Trajectory {
            k_label: p.k_label,
            trusted: first.is_trusted(p),
            points: vec![p.lambda],
        })
        .collect();
    let mut ambiguous_steps = Vec::new();
    for (step, sol) in solutions.iter().enumerate().skip(1) {
        let current: Vec<Complex64> = trajectories.iter().map(|tr| *tr.points.last().unwrap()).collect();
        let next = sol.eigenvalues();
        if has_ambiguous_match(&current, &next, 1e-12) {
            ambiguous_steps.push(step - 1);
        }
        for (tr, j) in trajectories.iter_mut().zip(match_points(&current, &next)) {
            tr.points.push(next[j]);
        }
    }

    let mut rec = Recorder::new(HOMOTOPY, t, 1.0, k_max);
    let nn = big_n(report);
    let rect = report.rectangle_r;
    for tr in trajectories.iter().filter(|tr| tr.trusted) {
        let k = tr.k_label;
        for (&eps, &z) in eps_grid.iter().zip(&tr.points) {
            let slack = tol.slack_at(z.norm());
            if k.abs() >= nn {
                let disk = report.disk_or_formula(k);
                rec.observe(z, || format!("U({k},t) at eps={eps}"), disk.margin(z), slack);
            } else {
                let margin = (-rect.re_range.distance(z.re)).min(rect.im_bound - z.im.abs());
                rec.observe(z, || format!("R({nn},t) at eps={eps}"), margin, slack);
            }
        }
    }

    let w = first.trusted_window as i64;
    let last = solutions.last().unwrap();
    let mut counts = Vec::new();
    for k in (-w..=w).filter(|k| k.abs() >= nn) {
        let disk = report.disk_or_formula(k);
        let at_start = trusted_in_disk(first, &disk, tol).count();
        let at_end = trusted_in_disk(last, &disk, tol).count();
        rec.observe(
            disk.center,
            || format!("U({k},t) count {at_start} -> {at_end}"),
            -((at_start as f64) - (at_end as f64)).abs(),
            0.0,
        );
        counts.push(DiskCount { k, at_start, at_end });
    }

    Ok(HomotopyTrace {
        t,
        k_max,
        eps_grid: eps_grid.to_vec(),
        trajectories,
        ambiguous_steps,
        counts,
        record: rec.finish(),
    })
}

/// Aggregated pass flags; `None` where a check did not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub disk_containment: bool,
    pub disk_disjointness: bool,
    pub small_coefficient_disks: Option<bool>,
    pub strip_rectangle: bool,
    pub disk_count: bool,
    pub disk_reality: bool,
    pub conjugate_pairing: bool,
    pub coefficient_dominance: bool,
    pub coefficient_tail: bool,
    pub row_bound: bool,
    pub row_residual: bool,
    pub homotopy: Option<bool>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub order: u32,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub tolerances: Tolerances,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn from_records(spec: &ProblemSpec, k_max: usize, tol: Tolerances, records: Vec<CheckRecord>) -> Self {
        let all = |name: &str| records.iter().filter(|r| r.name == name).all(|r| r.pass);
        let any_of = |name: &str| {
            let mut it = records.iter().filter(|r| r.name == name).peekable();
            it.peek().is_some().then(|| it.all(|r| r.pass))
        };
        let summary = Summary {
            disk_containment: all(DISK_CONTAINMENT),
            disk_disjointness: all(DISK_DISJOINTNESS),
            small_coefficient_disks: any_of(SMALL_COEFFICIENT_DISKS),
            strip_rectangle: all(STRIP_RECTANGLE),
            disk_count: all(DISK_COUNT),
            disk_reality: all(DISK_REALITY),
            conjugate_pairing: all(CONJUGATE_PAIRING),
            coefficient_dominance: all(COEFFICIENT_DOMINANCE),
            coefficient_tail: all(COEFFICIENT_TAIL),
            row_bound: all(ROW_BOUND),
            row_residual: all(ROW_RESIDUAL),
            homotopy: any_of(HOMOTOPY),
            all_pass: records.iter().all(|r| r.pass),
        };
        let c = crate::enclosure::compute_c(spec);
        Self {
            order: spec.order(),
            c,
            big_n: crate::enclosure::compute_n(c),
            k_max,
            tolerances: tol,
            summary,
            records,
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

/// Every check at one quasimomentum with `eps = 1`, plus the homotopy trace when an `eps` grid is given.
pub fn verify_at(
    spec: &ProblemSpec,
    t: f64,
    k_max: usize,
    window: Option<u64>,
    tol: &Tolerances,
    eps_grid: Option<&[f64]>,
) -> Result<Vec<CheckRecord>> {
    let report = EnclosureReport::new(spec, t, window)?;
    let sol = solve(spec, t, 1.0, k_max)?;
    let mut records = vec![
        check_disk_containment(&sol, &report, tol),
        check_disk_disjointness(&report, k_max),
    ];
    if report.reality_holds {
        records.push(check_small_coefficient_disks(&sol, &report, tol)?);
    }
    records.push(check_strip_rectangle(&sol, &report, tol));
    let t4 = check_disk_eigenvalues(&sol, &report, tol);
    records.extend([t4.count, t4.real]);
    records.push(check_conjugate_pairing(&sol, tol));
    let coeff = check_coefficient_inequalities(&sol, &report, tol);
    records.extend([coeff.dominance, coeff.tail]);
    let rows = check_rhs_bounds(&sol, spec, &report, tol);
    records.extend([rows.bound, rows.residual]);
    if let Some(grid) = eps_grid {
        records.push(homotopy_trace(spec, t, k_max, grid, &report, tol)?.record);
    }
    Ok(records)
}

/// Runs [`verify_at`] for every `t`, concurrently; records keep the order of `ts`.
pub fn run_verification(
    spec: &ProblemSpec,
    ts: &[f64],
    k_max: usize,
    window: Option<u64>,
    tol: &Tolerances,
    eps_grid: Option<&[f64]>,
) -> Result<VerificationReport> {
    tol.validate()?;
    let per_t: Vec<Vec<CheckRecord>> = ts
        .par_iter()
        .map(|&t| verify_at(spec, t, k_max, window, tol, eps_grid))
        .collect::<Result<_>>()?;
    Ok(VerificationReport::from_records(
        spec,
        k_max,
        *tol,
        per_t.into_iter().flatten().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FourierPoly;
    use std::collections::BTreeMap;

    fn cos_spec(a: f64) -> ProblemSpec {
        ProblemSpec::new(3, BTreeMap::from([(2, FourierPoly::cosine(a, 1))])).unwrap()
    }

    fn setup(a: f64, t: f64, eps: f64) -> (ProblemSpec, EnclosureReport, EigenSolution) {
        let spec = cos_spec(a);
        let report = EnclosureReport::new(&spec, t, None).unwrap();
        let sol = solve(&spec, t, eps, 24).unwrap();
        (spec, report, sol)
    }

    #[test]
    fn free_solution_passes_everything() {
        let (spec, report, sol) = setup(1.0, 0.4, 0.0);
        let tol = Tolerances::default();
        assert!(check_disk_containment(&sol, &report, &tol).pass);
        assert!(check_strip_rectangle(&sol, &report, &tol).pass);
        let t4 = check_disk_eigenvalues(&sol, &report, &tol);
        assert!(t4.count.pass && t4.real.pass);
        let c = check_coefficient_inequalities(&sol, &report, &tol);
        assert!(c.dominance.pass && c.tail.pass);
        let rows = check_rhs_bounds(&sol, &spec, &report, &tol);
        assert!(rows.bound.pass && rows.residual.pass);
    }

    #[test]
    fn reference_spec_passes_at_eps_one() {
        let (spec, report, sol) = setup(1.0, 0.7, 1.0);
        let tol = Tolerances::default();
        let rec = check_disk_containment(&sol, &report, &tol);
        assert!(rec.pass, "{rec:?}");
        // labels 2..=12 on both sides have a disk eigenvalue
        assert_eq!(rec.tested, 22);
        assert!(check_strip_rectangle(&sol, &report, &tol).pass);
        let t4 = check_disk_eigenvalues(&sol, &report, &tol);
        assert!(t4.count.pass && t4.real.pass);
        assert_eq!(t4.count.tested, 22);
        assert!(check_conjugate_pairing(&sol, &tol).pass);
        let rows = check_rhs_bounds(&sol, &spec, &report, &tol);
        assert!(rows.bound.pass, "{:?}", rows.bound.witnesses);
        assert!(rows.residual.pass, "{:?}", rows.residual.witnesses);
    }

    #[test]
    fn dominance_of_label_three() {
        let (_, report, sol) = setup(1.0, 0.0, 1.0);
        let pair = sol.pairs.iter().find(|p| p.k_label == 3).unwrap();
        assert!(pair.coefficient(3).norm() > 2.0 / 3.0);
        let c = check_coefficient_inequalities(&sol, &report, &Tolerances::default());
        assert!(c.dominance.pass && c.tail.pass);
        assert!(c.tail.tested > 0);
    }

    #[test]
    fn shrunk_disks_produce_witnesses() {
        let (_, mut report, sol) = setup(1.0, 0.0, 1.0);
        for d in &mut report.disks {
            d.disk.radius *= 1e-5;
        }
        report.window = 30;
        let tol = Tolerances::default();
        let rec = check_disk_containment(&sol, &report, &tol);
        assert!(!rec.pass);
        assert!(!rec.witnesses.is_empty());
    }

    #[test]
    fn small_c_hypothesis() {
        let (_, report, sol) = setup(1.0, 0.0, 1.0);
        assert!(matches!(
            check_small_coefficient_disks(&sol, &report, &Tolerances::default()),
            Err(Error::Hypothesis(_))
        ));
        let (_, report, sol) = setup(0.25, 0.3, 1.0);
        assert!(check_small_coefficient_disks(&sol, &report, &Tolerances::default()).unwrap().pass);
        let free = ProblemSpec::free(3).unwrap();
        let report = EnclosureReport::new(&free, 0.3, None).unwrap();
        let sol = solve(&free, 0.3, 1.0, 24).unwrap();
        assert!(check_small_coefficient_disks(&sol, &report, &Tolerances::default()).unwrap().pass);
    }

    #[test]
    fn eps_grid_validation() {
        assert!(validate_eps_grid(&uniform_eps_grid(10)).is_ok());
        assert!(validate_eps_grid(&uniform_eps_grid(5)).is_err());
        assert!(validate_eps_grid(&[0.0, 0.05, 0.9]).is_err());
        assert!(validate_eps_grid(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn free_homotopy_is_constant() {
        let spec = ProblemSpec::free(3).unwrap();
        let report = EnclosureReport::new(&spec, 0.0, None).unwrap();
        let trace =
            homotopy_trace(&spec, 0.0, 12, &uniform_eps_grid(10), &report, &Tolerances::default()).unwrap();
        assert!(trace.record.pass);
        for tr in &trace.trajectories {
            assert!(tr.points.iter().all(|z| *z == tr.points[0]));
        }
    }

    #[test]
    fn tolerances_must_be_positive() {
        let tol = Tolerances {
            slack: 0.0,
            ..Tolerances::default()
        };
        assert!(tol.validate().is_err());
    }
}
