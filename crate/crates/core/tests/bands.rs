mod common;

use ptbloch::bands::{nonreal_arcs_in_rectangle, real_coverage_check, sweep, uniform_t_grid};
use ptbloch::enclosure::{free_eigenvalue, EnclosureReport};
use ptbloch::galerkin::truncation_error_estimate;
use ptbloch::verify::Tolerances;
use ptbloch::ProblemSpec;

use common::cos_spec;

#[test]
fn free_bands_increase_in_t() {
    let spec = ProblemSpec::free(5).unwrap();
    let bs = sweep(&spec, &uniform_t_grid(40), 8, &Tolerances::default()).unwrap();
    for band in &bs.bands {
        for (w, t) in band.values.windows(2).zip(bs.t_grid.windows(2)) {
            assert!(w[1].re > w[0].re, "band {} not increasing at t = {}", band.k_label, t[0]);
        }
        let last = *band.values.last().unwrap();
        assert_eq!(last.re, free_eigenvalue(band.k_label, 1.0, 5));
    }
}

#[test]
fn refinement_keeps_band_identity() {
    let spec = cos_spec(1.0);
    let tol = Tolerances::default();
    let k_max = 24;
    let coarse = sweep(&spec, &uniform_t_grid(40), k_max, &tol).unwrap();
    let fine = sweep(&spec, &uniform_t_grid(80), k_max, &tol).unwrap();
    for (i, &t) in coarse.t_grid.iter().enumerate() {
        let j = 2 * i + 1;
        assert_eq!(fine.t_grid[j], t);
        let est = truncation_error_estimate(&spec, t, 1.0, k_max).unwrap();
        for band in coarse.trusted_bands() {
            let twin = fine.bands.iter().find(|b| b.k_label == band.k_label).unwrap();
            let z = band.values[i];
            let err = est
                .solution
                .pairs
                .iter()
                .zip(&est.errors)
                .filter_map(|(p, e)| e.filter(|_| (p.lambda - z).norm() < 1e-6 * (1.0 + z.norm())))
                .fold(0.0, f64::max);
            let moved = (twin.values[j] - z).norm();
            assert!(
                moved <= err + 1e-9 * (1.0 + z.norm()),
                "band {} at t = {t}: moved {moved}, estimate {err}",
                band.k_label
            );
        }
    }
}

#[test]
fn band_multiset_is_self_conjugate() {
    let spec = cos_spec(10.0);
    let bs = sweep(&spec, &uniform_t_grid(40), 24, &Tolerances::default()).unwrap();
    for i in 0..bs.t_grid.len() {
        let values: Vec<_> = bs.bands.iter().map(|b| b.values[i]).collect();
        for z in &values {
            let partner = values.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            assert!(partner <= 1e-8 * (1.0 + z.norm()));
        }
    }
}

#[test]
fn nonreal_arcs_stay_in_rectangle() {
    let tol = Tolerances::default();
    let mut found = None;
    for a in [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0] {
        let spec = cos_spec(a);
        let bs = sweep(&spec, &uniform_t_grid(40), 32, &tol).unwrap();
        if bs.nonreal_arcs().any(|arc| bs.bands[arc.band].trusted) {
            found = Some((a, spec, bs));
            break;
        }
    }
    let (a, spec, bs) = found.expect("some amplitude produces a nonreal arc");
    let report = EnclosureReport::new(&spec, 1.0, None).unwrap();
    let rec = nonreal_arcs_in_rectangle(&bs, &report, &tol);
    assert!(rec.pass && rec.tested > 0, "a = {a}: {rec:?}");
    assert!(real_coverage_check(&bs, &report, &tol).pass);
}

#[test]
fn real_bands_cover_outer_intervals() {
    let spec = cos_spec(1.0);
    let tol = Tolerances::default();
    let bs = sweep(&spec, &uniform_t_grid(80), 24, &tol).unwrap();
    let report = EnclosureReport::new(&spec, 1.0, None).unwrap();
    let rec = real_coverage_check(&bs, &report, &tol);
    assert!(rec.pass, "{rec:?}");
    assert_eq!(bs.nonreal_arcs().count(), 0);
}
