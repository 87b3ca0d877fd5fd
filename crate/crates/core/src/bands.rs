//! Band functions over the quasimomentum `t in (-1, 1]`.
//!
//! The spectrum of the whole-line operator is the union of the Bloch spectra
//! over `t`. A [`BandStructure`] follows every eigenvalue of the truncated
//! matrix along a `t` grid, splits each band into real and nonreal arcs and
//! records the real interval swept by each real arc.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{has_ambiguous_match, match_points};
use crate::enclosure::{check_quasimomentum, EnclosureReport};
use crate::error::{Error, Result};
use crate::galerkin::{solve, trusted_window, EigenSolution};
use crate::problem::ProblemSpec;
use crate::verify::{CheckRecord, Tolerances, Witness};

pub const REAL_COVERAGE: &str = "real_coverage";
pub const NONREAL_ARCS: &str = "nonreal_arcs_in_rectangle";

/// Largest admissible spacing of a sweep grid.
pub const MAX_GRID_SPACING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub index: usize,
    /// Label at the first grid point.
    pub k_label: i64,
    pub trusted: bool,
    pub values: Vec<Complex64>,
    /// Grid indices where another band comes within `1e-9` (relative).
    pub degenerate_at: Vec<usize>,
    /// Limit at `t -> -1`, read off the `t = 1` spectrum (the two boundary
    /// conditions coincide). Present only when the grid ends at `t = 1`.
    pub periodic_start: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub band: usize,
    /// Inclusive grid index range.
    pub start: usize,
    pub end: usize,
    pub real: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    pub band: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub order: u32,
    pub t_grid: Vec<f64>,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub trusted_window: u64,
    pub bands: Vec<Band>,
    pub arcs: Vec<Arc>,
    pub coverage: Vec<Coverage>,
    /// Grid intervals `i -> i + 1` where the continuation had near-tied candidates.
    pub ambiguous_intervals: Vec<usize>,
}

impl BandStructure {
    pub fn nonreal_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| !a.real)
    }

    pub fn trusted_bands(&self) -> impl Iterator<Item = &Band> {
        self.bands.iter().filter(|b| b.trusted)
    }
}

/// `count` points `-1 + 2i/count`, `i = 1..=count`: excludes `-1`, ends at `1`.
pub fn uniform_t_grid(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| {
            if i == count {
                1.0
            } else {
                -1.0 + 2.0 * i as f64 / count as f64
            }
        })
        .collect()
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Config("empty t grid".into()));
    }
    for &t in t_grid {
        check_quasimomentum(t)?;
    }
    for w in t_grid.windows(2) {
        let step = w[1] - w[0];
        if !(step > 0.0) {
            return Err(Error::Config("t grid must be strictly increasing".into()));
        }
        if step > MAX_GRID_SPACING + 1e-12 {
            return Err(Error::Config(format!(
                "t grid spacing {step} exceeds {MAX_GRID_SPACING}"
            )));
        }
    }
    Ok(())
}

fn split_arcs(band: &Band, tol: &Tolerances) -> Vec<Arc> {
    let mut arcs = Vec::new();
    let mut start = 0;
    for i in 1..=band.values.len() {
        let boundary = i == band.values.len()
            || tol.is_real(band.values[i]) != tol.is_real(band.values[start]);
        if boundary {
            arcs.push(Arc {
                band: band.index,
                start,
                end: i - 1,
                real: tol.is_real(band.values[start]),
            });
            start = i;
        }
    }
    arcs
}

fn arc_coverage(band: &Band, arc: &Arc) -> Coverage {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for z in &band.values[arc.start..=arc.end] {
        lo = lo.min(z.re);
        hi = hi.max(z.re);
    }
    if arc.start == 0 {
        if let Some(z) = band.periodic_start {
            lo = lo.min(z.re);
            hi = hi.max(z.re);
        }
    }
    Coverage {
        band: band.index,
        lo,
        hi,
    }
}

/// Solves on every grid point (concurrently) and stitches the eigenvalues into bands.
///
/// Bands are seeded by label at the first grid point and continued by a
/// minimum-total-distance matching between neighbouring grid points.
pub fn sweep(spec: &ProblemSpec, t_grid: &[f64], k_max: usize, tol: &Tolerances) -> Result<BandStructure> {
    validate_grid(t_grid)?;
    let solutions: Vec<EigenSolution> = t_grid
        .par_iter()
        .map(|&t| solve(spec, t, 1.0, k_max))
        .collect::<Result<_>>()?;
    Ok(stitch(spec.order(), t_grid, k_max, &solutions, tol))
}

fn stitch(order: u32, t_grid: &[f64], k_max: usize, solutions: &[EigenSolution], tol: &Tolerances) -> BandStructure {
    let first = &solutions[0];
    let mut bands: Vec<Band> = first
        .pairs
        .iter()
        .enumerate()
        .map(|(index, p)| Band {
            index,
            k_label: p.k_label,
            trusted: first.is_trusted(p),
            values: vec![p.lambda],
            degenerate_at: Vec::new(),
            periodic_start: None,
        })
        .collect();

    let mut ambiguous_intervals = Vec::new();
    for (i, sol) in solutions.iter().enumerate().skip(1) {
        let current: Vec<Complex64> = bands.iter().map(|b| *b.values.last().unwrap()).collect();
        let next = sol.eigenvalues();
        if has_ambiguous_match(&current, &next, 1e-12) {
            ambiguous_intervals.push(i - 1);
        }
        for (band, j) in bands.iter_mut().zip(match_points(&current, &next)) {
            band.values.push(next[j]);
        }
    }

    for i in 0..t_grid.len() {
        for a in 0..bands.len() {
            for b in a + 1..bands.len() {
                let (za, zb) = (bands[a].values[i], bands[b].values[i]);
                if (za - zb).norm() < 1e-9 * (1.0 + za.norm().max(zb.norm())) {
                    bands[a].degenerate_at.push(i);
                    bands[b].degenerate_at.push(i);
                }
            }
        }
    }

    if *t_grid.last().unwrap() == 1.0 {
        // nearest point, not a global matching: the truncated spectra at
        // t = -1 + h and t = 1 are shifted by one label at the window edges
        let boundary = solutions.last().unwrap().eigenvalues();
        for band in bands.iter_mut() {
            let start = band.values[0];
            band.periodic_start = boundary
                .iter()
                .copied()
                .min_by(|a, b| (a - start).norm().total_cmp(&(b - start).norm()));
        }
    }

    let arcs: Vec<Arc> = bands.iter().flat_map(|b| split_arcs(b, tol)).collect();
    let coverage = arcs
        .iter()
        .filter(|a| a.real)
        .map(|a| arc_coverage(&bands[a.band], a))
        .collect();

    BandStructure {
        order,
        t_grid: t_grid.to_vec(),
        k_max,
        trusted_window: trusted_window(k_max, first.bandwidth),
        bands,
        arcs,
        coverage,
        ambiguous_intervals,
    }
}

fn band_record(name: &str, bs: &BandStructure) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        t: f64::NAN,
        eps: 1.0,
        k_max: bs.k_max,
        pass: true,
        tested: 0,
        min_margin: None,
        witnesses: Vec::new(),
    }
}

fn observe(rec: &mut CheckRecord, value: Complex64, region: String, margin: f64, tolerance: f64) {
    rec.tested += 1;
    rec.min_margin = Some(rec.min_margin.map_or(margin, |m| m.min(margin)));
    if !(margin >= -tolerance) {
        rec.pass = false;
        rec.witnesses.push(Witness {
            value,
            region,
            margin,
        });
    }
}

/// The real intervals swept by trusted real arcs, together with the real
/// range of the nonreal-spectrum rectangle, cover `[min, max]` of the trusted
/// band values up to gaps of `coverage_gap_tol` times the neighbouring band width.
pub fn real_coverage_check(bs: &BandStructure, report: &EnclosureReport, tol: &Tolerances) -> CheckRecord {
    let mut rec = band_record(REAL_COVERAGE, bs);
    let trusted: Vec<&Band> = bs.trusted_bands().collect();
    let probe_lo = trusted
        .iter()
        .flat_map(|b| b.values.iter())
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let probe_hi = trusted
        .iter()
        .flat_map(|b| b.values.iter())
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !probe_lo.is_finite() {
        return rec;
    }

    // (lo, hi, band width or None for the rectangle)
    let mut pieces: Vec<(f64, f64, Option<f64>)> = bs
        .coverage
        .iter()
        .filter(|c| bs.bands[c.band].trusted)
        .map(|c| (c.lo, c.hi, Some(c.hi - c.lo)))
        .collect();
    let re_bound = report.nonreal_rect.re_bound;
    pieces.push((-re_bound, re_bound, None));
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut covered_to = probe_lo;
    let mut last_width: Option<f64> = None;
    for (lo, hi, width) in pieces {
        if covered_to >= probe_hi {
            break;
        }
        if hi <= covered_to {
            continue;
        }
        if lo > covered_to {
            let gap = lo - covered_to;
            let local = match (last_width, width) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => 0.0,
            };
            observe(
                &mut rec,
                Complex64::new(covered_to, 0.0),
                format!("gap [{covered_to:e}, {lo:e})"),
                tol.coverage_gap_tol * local - gap,
                0.0,
            );
        } else {
            observe(&mut rec, Complex64::new(covered_to, 0.0), String::new(), 0.0, 0.0);
        }
        covered_to = hi;
        last_width = width;
    }
    if covered_to < probe_hi {
        observe(
            &mut rec,
            Complex64::new(covered_to, 0.0),
            format!("uncovered [{covered_to:e}, {probe_hi:e}]"),
            covered_to - probe_hi,
            0.0,
        );
    }
    rec
}

/// Every nonreal point on a trusted band lies in the nonreal-spectrum
/// rectangle and has a conjugate partner among the band values at the same `t`.
pub fn nonreal_arcs_in_rectangle(bs: &BandStructure, report: &EnclosureReport, tol: &Tolerances) -> CheckRecord {
    let mut rec = band_record(NONREAL_ARCS, bs);
    let rect = report.nonreal_rect;
    for band in bs.trusted_bands() {
        for (i, &z) in band.values.iter().enumerate() {
            if tol.is_real(z) {
                continue;
            }
            let slack = tol.slack_at(z.norm());
            let t = bs.t_grid[i];
            observe(&mut rec, z, format!("|Re| bound at t={t}"), rect.re_bound - z.re.abs(), slack);
            observe(&mut rec, z, format!("|Im| bound at t={t}"), rect.im_bound - z.im.abs(), slack);
            let partner = bs
                .bands
                .iter()
                .map(|b| (b.values[i] - z.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            observe(
                &mut rec,
                z,
                format!("conjugate arc at t={t}"),
                tol.pairing_tol * (1.0 + z.norm()) - partner,
                0.0,
            );
        }
    }
    rec
}
