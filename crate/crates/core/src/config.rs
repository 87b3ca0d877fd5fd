//! Run configuration documents.
//!
//! A configuration is a JSON object with `"schema": 1`:
//!
//! ```json
//! {
//!   "schema": 1,
//!   "n": 3,
//!   "coefficients": [{"v": 2, "terms": [{"m": 1, "re": 1.0, "im": 0.0},
//!                                       {"m": -1, "re": 1.0, "im": 0.0}]}],
//!   "K": 24,
//!   "t": {"steps": 81},
//!   "eps_grid": [0.0, 0.5, 1.0],
//!   "tolerances": {"slack": 1e-6},
//!   "output": {"dir": "out", "csv": true, "report": true, "svg": false},
//!   "report_window": 12
//! }
//! ```
//!
//! Everything except `schema` and `n` is optional.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bands::uniform_t_grid;
use crate::enclosure::check_quasimomentum;
use crate::error::{Error, Result};
use crate::fourier::FourierPoly;
use crate::problem::{ProblemSpec, PT_TOLERANCE};
use crate::verify::{validate_eps_grid, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_T_STEPS: usize = 81;

/// A single quasimomentum or a uniform grid of `steps` points over `(-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TSelection {
    Value(f64),
    Grid { steps: usize },
}

impl Default for TSelection {
    fn default() -> Self {
        TSelection::Grid {
            steps: DEFAULT_T_STEPS,
        }
    }
}

impl TSelection {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            TSelection::Value(t) => vec![t],
            TSelection::Grid { steps } => uniform_t_grid(steps),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: bool,
    /// Structured JSON report.
    pub report: bool,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: true,
            report: true,
            svg: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    /// Truncation override; `None` selects the default for the spec.
    pub k_max: Option<usize>,
    pub t: TSelection,
    pub eps_grid: Option<Vec<f64>>,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    pub report_window: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    m: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientDoc {
    v: u32,
    terms: Vec<TermDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    schema: u32,
    n: u32,
    #[serde(default)]
    coefficients: Vec<CoefficientDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    unsafe_precision: bool,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    k_max: Option<usize>,
    #[serde(default)]
    t: TSelection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps_grid: Option<Vec<f64>>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    report_window: Option<u64>,
}

fn at(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Parse {
        at: path.into(),
        msg: msg.into(),
    }
}

/// Re-tags a validation error from a constructor with the field it came from.
fn located(path: &str, err: Error) -> Error {
    match err {
        Error::Config(msg) | Error::Precision(msg) => at(path, msg),
        other => other,
    }
}

fn build_coefficients(doc: &ConfigDoc) -> Result<BTreeMap<u32, FourierPoly>> {
    let mut seen = BTreeSet::new();
    let mut terms: BTreeMap<u32, Vec<(i64, Complex64)>> = BTreeMap::new();
    for (i, coeff) in doc.coefficients.iter().enumerate() {
        let v = coeff.v;
        if !(2..=doc.n).contains(&v) {
            return Err(at(
                format!("coefficients[{i}].v"),
                format!("coefficient index v = {v} outside 2..={}", doc.n),
            ));
        }
        for (j, term) in coeff.terms.iter().enumerate() {
            let path = format!("coefficients[{i}].terms[{j}]");
            if !seen.insert((v, term.m)) {
                return Err(at(path, format!("duplicate term (v, m) = ({v}, {})", term.m)));
            }
            if !(term.re.is_finite() && term.im.is_finite()) {
                return Err(at(path, "coefficient must be finite"));
            }
            if term.im.abs() > PT_TOLERANCE {
                return Err(at(
                    path,
                    format!(
                        "coefficient not PT-symmetric: (v, m) = ({v}, {}) has im = {:e}",
                        term.m, term.im
                    ),
                ));
            }
            terms
                .entry(v)
                .or_default()
                .push((term.m, Complex64::new(term.re, term.im)));
        }
    }
    Ok(terms
        .into_iter()
        .map(|(v, t)| (v, FourierPoly::from_terms(t)))
        .collect())
}

fn build(doc: ConfigDoc) -> Result<RunConfig> {
    if doc.schema != SCHEMA_VERSION {
        return Err(at(
            "schema",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", doc.schema),
        ));
    }
    if doc.n % 2 == 0 || doc.n <= 1 {
        return Err(at("n", format!("n must be odd and > 1 (got {})", doc.n)));
    }
    let coeffs = build_coefficients(&doc)?;
    let spec = ProblemSpec::with_precision(doc.n, coeffs, doc.unsafe_precision)
        .map_err(|e| located("coefficients", e))?;

    if let Some(k) = doc.k_max {
        if k == 0 {
            return Err(at("K", "K must be positive"));
        }
        spec.check_index_budget(k as u64).map_err(|e| located("K", e))?;
    }
    if let Some(w) = doc.report_window {
        spec.check_index_budget(w).map_err(|e| located("report_window", e))?;
    }
    match doc.t {
        TSelection::Value(t) => check_quasimomentum(t).map_err(|e| located("t", e))?,
        TSelection::Grid { steps } if steps == 0 => return Err(at("t.steps", "need at least one point")),
        TSelection::Grid { .. } => {}
    }
    if let Some(grid) = &doc.eps_grid {
        validate_eps_grid(grid).map_err(|e| located("eps_grid", e))?;
    }
    doc.tolerances.validate().map_err(|e| located("tolerances", e))?;

    Ok(RunConfig {
        spec,
        k_max: doc.k_max,
        t: doc.t,
        eps_grid: doc.eps_grid,
        tolerances: doc.tolerances,
        output: doc.output,
        report_window: doc.report_window,
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let doc: ConfigDoc = serde_json::from_str(document).map_err(|e| {
        at(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    build(doc)
}

/// Writes `config` back as a document that [`parse_config`] maps to an equal value.
pub fn serialize_config(config: &RunConfig) -> String {
    let coefficients = config
        .spec
        .coeffs()
        .map(|(v, p)| CoefficientDoc {
            v,
            terms: p
                .terms()
                .map(|(m, c)| TermDoc { m, re: c.re, im: c.im })
                .collect(),
        })
        .collect();
    let doc = ConfigDoc {
        schema: SCHEMA_VERSION,
        n: config.spec.order(),
        coefficients,
        unsafe_precision: config.spec.unsafe_precision(),
        k_max: config.k_max,
        t: config.t,
        eps_grid: config.eps_grid.clone(),
        tolerances: config.tolerances,
        output: config.output.clone(),
        report_window: config.report_window,
    };
    crate::report::to_json(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{"schema": 1, "n": 3,
        "coefficients": [{"v": 2, "terms": [{"m": 1, "re": 1, "im": 0}, {"m": -1, "re": 1, "im": 0}]}]}"#;

    fn parse_err(doc: &str) -> String {
        parse_config(doc).unwrap_err().to_string()
    }

    #[test]
    fn reference_document() {
        let cfg = parse_config(REFERENCE).unwrap();
        let expected = ProblemSpec::new(3, BTreeMap::from([(2, FourierPoly::cosine(1.0, 1))])).unwrap();
        assert_eq!(cfg.spec, expected);
        assert_eq!(cfg.t, TSelection::Grid { steps: 81 });
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.output, OutputConfig::default());
        assert_eq!(cfg.k_max, None);
    }

    #[test]
    fn rejections() {
        assert!(parse_err(r#"{"schema": 1, "n": 4}"#).contains("n must be odd and > 1"));
        assert!(parse_err(r#"{"schema": 1, "n": 1}"#).contains("n must be odd and > 1"));
        let e = parse_err(r#"{"schema": 1, "n": 3, "coefficients": [{"v": 2, "terms": [{"m": 0, "re": 0, "im": 0.5}]}]}"#);
        assert!(e.contains("coefficient not PT-symmetric"), "{e}");
        assert!(e.contains("(2, 0)"), "{e}");
        let e = parse_err(r#"{"schema": 1, "n": 3, "coefficients": [{"v": 4, "terms": []}]}"#);
        assert!(e.contains("coefficients[0].v"), "{e}");
        let e = parse_err(
            r#"{"schema": 1, "n": 3, "coefficients": [{"v": 2, "terms": [{"m": 1, "re": 1}]}, {"v": 2, "terms": [{"m": 1, "re": 2}]}]}"#,
        );
        assert!(e.contains("duplicate") && e.contains("coefficients[1].terms[0]"), "{e}");
        let e = parse_err("{\"schema\": 1,\n \"n\": 3,\n \"colour\": 1}");
        assert!(e.contains("line 3") && e.contains("unknown field"), "{e}");
        assert!(parse_err(r#"{"schema": 2, "n": 3}"#).contains("schema"));
        assert!(parse_err(r#"{"schema": 1, "n": 11}"#).contains("cap"));
        assert!(parse_config(r#"{"schema": 1, "n": 11, "unsafe_precision": true}"#).is_ok());
        assert!(parse_err(r#"{"schema": 1, "n": 3, "tolerances": {"slack": 0}}"#).contains("tolerances"));
        assert!(parse_err(r#"{"schema": 1, "n": 3, "t": -1.0}"#).contains("at t"));
        assert!(parse_err(r#"{"schema": 1, "n": 3, "eps_grid": [0, 1]}"#).contains("eps_grid"));
    }

    #[test]
    fn round_trip() {
        let doc = r#"{"schema": 1, "n": 5, "unsafe_precision": false,
            "coefficients": [{"v": 2, "terms": [{"m": 1, "re": 0.3}, {"m": -1, "re": 0.3}]},
                             {"v": 5, "terms": [{"m": 0, "re": -1.25}, {"m": 2, "re": 0.1}]}],
            "K": 30, "t": 0.3, "eps_grid": [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1],
            "tolerances": {"slack": 1e-5, "coverage_gap_tol": 0.01},
            "output": {"dir": "runs/a", "svg": true}, "report_window": 15}"#;
        let cfg = parse_config(doc).unwrap();
        assert_eq!(cfg.t, TSelection::Value(0.3));
        let text = serialize_config(&cfg);
        assert_eq!(parse_config(&text).unwrap(), cfg);
        assert_eq!(serialize_config(&parse_config(&text).unwrap()), text);
    }
}
