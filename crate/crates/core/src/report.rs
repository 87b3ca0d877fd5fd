//! Deterministic text output: JSON reports, CSV tables and a plain-text
//! verification table.
//!
//! Every float is printed with 17 significant digits in scientific notation,
//! so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::bands::BandStructure;
use crate::error::{Error, Result};
use crate::galerkin::TruncationEstimate;
use crate::verify::{HomotopyTrace, Tolerances, VerificationReport};

/// `{:.16e}` for finite values (negative zero prints as zero), `nan` / `inf` / `-inf` otherwise.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x + 0.0)
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Pretty-printed JSON whose floats use [`format_f64`]. Non-finite floats become `null`.
struct SciFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with fixed float formatting and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        SciFormatter {
            inner: PrettyFormatter::new(),
        },
    );
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// A versioned report document.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// [`to_json`] of `body` with `"schema"` and `"kind"` fields prepended.
pub fn report_json<T: Serialize>(kind: &str, body: &T) -> String {
    to_json(&Envelope {
        schema: crate::config::SCHEMA_VERSION,
        kind,
        body,
    })
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of ASCII fields")
}

/// Columns `re_lambda, im_lambda, k_label, trusted, trunc_err`; `trunc_err` is empty for untrusted rows.
pub fn eigs_csv(est: &TruncationEstimate) -> String {
    let sol = &est.solution;
    csv_string(
        &["re_lambda", "im_lambda", "k_label", "trusted", "trunc_err"],
        sol.pairs.iter().zip(&est.errors).map(|(p, err)| {
            vec![
                format_f64(p.lambda.re),
                format_f64(p.lambda.im),
                p.k_label.to_string(),
                sol.is_trusted(p).to_string(),
                err.map(format_f64).unwrap_or_default(),
            ]
        }),
    )
}

/// Columns `t, band_index, k_label, re_lambda, im_lambda, is_real`, ordered by band then `t`.
pub fn bands_csv(bs: &BandStructure, tol: &Tolerances) -> String {
    let rows = bs.bands.iter().flat_map(|band| {
        band.values.iter().zip(&bs.t_grid).map(move |(z, &t)| {
            vec![
                format_f64(t),
                band.index.to_string(),
                band.k_label.to_string(),
                format_f64(z.re),
                format_f64(z.im),
                tol.is_real(*z).to_string(),
            ]
        })
    });
    csv_string(
        &["t", "band_index", "k_label", "re_lambda", "im_lambda", "is_real"],
        rows,
    )
}

/// Columns `eps, k_label, re_lambda, im_lambda`, ordered by trajectory then `eps`.
pub fn homotopy_csv(trace: &HomotopyTrace) -> String {
    let rows = trace.trajectories.iter().flat_map(|traj| {
        traj.points.iter().zip(&trace.eps_grid).map(move |(z, &eps)| {
            vec![
                format_f64(eps),
                traj.k_label.to_string(),
                format_f64(z.re),
                format_f64(z.im),
            ]
        })
    });
    csv_string(&["eps", "k_label", "re_lambda", "im_lambda"], rows)
}

/// One line per check name (aggregated over `t`), then one line per failed record.
pub fn verification_table(report: &VerificationReport) -> String {
    struct Row {
        runs: usize,
        failed: usize,
        tested: usize,
        min_margin: Option<f64>,
    }
    let mut order = Vec::new();
    let mut rows: BTreeMap<&str, Row> = BTreeMap::new();
    for rec in &report.records {
        let row = rows.entry(&rec.name).or_insert_with(|| {
            order.push(rec.name.as_str());
            Row {
                runs: 0,
                failed: 0,
                tested: 0,
                min_margin: None,
            }
        });
        row.runs += 1;
        row.failed += usize::from(!rec.pass);
        row.tested += rec.tested;
        if let Some(m) = rec.min_margin {
            row.min_margin = Some(row.min_margin.map_or(m, |x: f64| x.min(m)));
        }
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}  C = {}  N = {}  K = {}",
        report.order,
        format_f64(report.c),
        report.big_n,
        report.k_max
    );
    let _ = writeln!(
        out,
        "{:<24} {:>6} {:>6} {:>8} {:>24}  status",
        "check", "runs", "failed", "tested", "min_margin"
    );
    for name in order {
        let r = &rows[name];
        let _ = writeln!(
            out,
            "{:<24} {:>6} {:>6} {:>8} {:>24}  {}",
            name,
            r.runs,
            r.failed,
            r.tested,
            r.min_margin.map(format_f64).unwrap_or_else(|| "-".into()),
            if r.failed == 0 { "PASS" } else { "FAIL" }
        );
    }
    for rec in report.failed() {
        let _ = writeln!(
            out,
            "FAILED {} at t = {} eps = {}: {} witness(es)",
            rec.name,
            format_f64(rec.t),
            format_f64(rec.eps),
            rec.witnesses.len()
        );
        for w in rec.witnesses.iter().take(5) {
            let _ = writeln!(
                out,
                "    {} {:+}i  {}  margin {}",
                format_f64(w.value.re),
                format_f64(w.value.im),
                w.region,
                format_f64(w.margin)
            );
        }
    }
    let _ = writeln!(out, "overall: {}", if report.summary.all_pass { "PASS" } else { "FAIL" });
    out
}

/// Files written by one command. Unless [`OutputSet::commit`] is called,
/// everything written so far is removed when the set is dropped.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            written: Vec::new(),
            committed: false,
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.dir.join(name);
        self.written.push(path.clone());
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.written {
                let _ = std::fs::remove_file(path);
            }
        }
    }
}
