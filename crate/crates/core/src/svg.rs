//! Two-panel SVG figure: band functions `Re lambda(t)` and the complex-plane
//! picture at one quasimomentum (eigenvalues, nonreal rectangle, disks).

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::bands::BandStructure;
use crate::enclosure::EnclosureReport;

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 360.0;
const PAD: f64 = 40.0;

/// Affine map from a data box onto a panel whose top-left corner is `(x0, y0)`.
struct Axes {
    x0: f64,
    y0: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Axes {
    fn new(x0: f64, y0: f64, (xmin, xmax): (f64, f64), (ymin, ymax): (f64, f64)) -> Self {
        let widen = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
        let (xmin, xmax) = widen(xmin, xmax);
        let (ymin, ymax) = widen(ymin, ymax);
        Self { x0, y0, xmin, xmax, ymin, ymax }
    }

    fn x(&self, v: f64) -> f64 {
        self.x0 + PAD + (v - self.xmin) / (self.xmax - self.xmin) * (PANEL_W - 2.0 * PAD)
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + PANEL_H - PAD - (v - self.ymin) / (self.ymax - self.ymin) * (PANEL_H - 2.0 * PAD)
    }

    fn sx(&self, d: f64) -> f64 {
        d / (self.xmax - self.xmin) * (PANEL_W - 2.0 * PAD)
    }

    fn sy(&self, d: f64) -> f64 {
        d / (self.ymax - self.ymin) * (PANEL_H - 2.0 * PAD)
    }

    fn frame(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            self.x0 + PAD,
            self.y0 + PAD,
            PANEL_W - 2.0 * PAD,
            PANEL_H - 2.0 * PAD
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{title}</text>"#,
            self.x0 + PANEL_W / 2.0,
            self.y0 + PAD - 12.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{xlabel} [{:.3e}, {:.3e}]</text>"#,
            self.x0 + PANEL_W / 2.0,
            self.y0 + PANEL_H - 12.0,
            self.xmin,
            self.xmax
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11">{ylabel} [{:.3e}, {:.3e}]</text>"#,
            self.x0 + 4.0,
            self.y0 + PAD - 24.0,
            self.ymin,
            self.ymax
        );
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn band_panel(out: &mut String, bs: &BandStructure, x0: f64) {
    let trusted: Vec<_> = bs.trusted_bands().collect();
    let t_range = range(bs.t_grid.iter().copied());
    let re_range = range(trusted.iter().flat_map(|b| b.values.iter().map(|z| z.re)));
    let axes = Axes::new(x0, 0.0, t_range, re_range);
    axes.frame(out, "Re lambda versus t", "t", "Re lambda");
    for band in trusted {
        let mut path = String::new();
        for (i, (z, &t)) in band.values.iter().zip(&bs.t_grid).enumerate() {
            let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, axes.x(t), axes.y(z.re));
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1"/>"#,
            path.trim_end()
        );
    }
}

fn plane_panel(out: &mut String, values: &[Complex64], report: &EnclosureReport, x0: f64) {
    let rect = report.nonreal_rect;
    let (re_lo, re_hi) = range(values.iter().map(|z| z.re));
    let im_max = values.iter().map(|z| z.im.abs()).fold(rect.im_bound, f64::max);
    let axes = Axes::new(
        x0,
        0.0,
        (re_lo.min(-rect.re_bound), re_hi.max(rect.re_bound)),
        (-1.05 * im_max, 1.05 * im_max),
    );
    axes.frame(out, &format!("complex plane at t = {}", report.t), "Re", "Im");
    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="darkorange" stroke-dasharray="4 2"/>"#,
        axes.x(-rect.re_bound),
        axes.y(rect.im_bound),
        axes.sx(2.0 * rect.re_bound),
        axes.sy(2.0 * rect.im_bound)
    );
    for d in report.outer_disks() {
        if d.disk.center.re < axes.xmin || d.disk.center.re > axes.xmax {
            continue;
        }
        let _ = writeln!(
            out,
            r#"<ellipse cx="{:.2}" cy="{:.2}" rx="{:.2}" ry="{:.2}" fill="none" stroke="seagreen"/>"#,
            axes.x(d.disk.center.re),
            axes.y(d.disk.center.im),
            axes.sx(d.disk.radius),
            axes.sy(d.disk.radius)
        );
    }
    for z in values {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="firebrick"/>"#,
            axes.x(z.re),
            axes.y(z.im)
        );
    }
}

/// Band panel on the left, complex plane at `report.t` on the right.
pub fn figure(bs: &BandStructure, values: &[Complex64], report: &EnclosureReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        2.0 * PANEL_W,
        PANEL_H,
        2.0 * PANEL_W,
        PANEL_H
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    band_panel(&mut out, bs, 0.0);
    plane_panel(&mut out, values, report, PANEL_W);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::{sweep, uniform_t_grid};
    use crate::problem::ProblemSpec;
    use crate::verify::Tolerances;

    #[test]
    fn figure_is_well_formed() {
        let spec = ProblemSpec::free(3).unwrap();
        let bs = sweep(&spec, &uniform_t_grid(41), 4, &Tolerances::default()).unwrap();
        let report = EnclosureReport::new(&spec, 1.0, None).unwrap();
        let values: Vec<Complex64> = bs.bands.iter().map(|b| *b.values.last().unwrap()).collect();
        let svg = figure(&bs, &values, &report);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<path").count(), bs.trusted_bands().count());
        assert_eq!(svg.matches("<circle").count(), values.len());
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
