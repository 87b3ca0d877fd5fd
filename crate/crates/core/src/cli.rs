//! Command-line front end: `enclose | eigs | verify | bands | homotopy`.
//!
//! Every command reads a configuration document (see [`crate::config`]),
//! applies the flag overrides, runs its pipeline on a bounded worker pool and
//! writes its outputs into the output directory. Outputs of a command that
//! fails with an error are removed.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::bands::{nonreal_arcs_in_rectangle, real_coverage_check, sweep, BandStructure};
use crate::config::{parse_config, RunConfig, TSelection};
use crate::enclosure::{disjointness_certificate, Certificate, EnclosureReport};
use crate::error::{Error, Result};
use crate::galerkin::{default_truncation, truncation_error_estimate};
use crate::report::{bands_csv, eigs_csv, homotopy_csv, report_json, verification_table, OutputSet};
use crate::verify::{homotopy_trace, run_verification, uniform_eps_grid, CheckRecord};

#[derive(Debug, Parser)]
#[command(name = "ptbloch", version, about = "Bloch eigenvalues and enclosure checks for odd-order PT-symmetric periodic operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Constants C and N, the reality test and all enclosure regions.
    Enclose,
    /// Eigenvalues at one quasimomentum with truncation-error estimates.
    Eigs,
    /// Every localisation and reality check; exits nonzero on any failure.
    Verify,
    /// Band functions over a t grid with the coverage and rectangle checks.
    Bands,
    /// Eigenvalue trajectories from eps = 0 to eps = 1 at one quasimomentum.
    Homotopy,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Configuration document (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Single quasimomentum in (-1, 1]; overrides the configured t.
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with = "t_steps")]
    pub t: Option<f64>,
    /// Uniform t grid with this many points over (-1, 1].
    #[arg(long, global = true, value_name = "INT")]
    pub t_steps: Option<usize>,
    /// Truncation index K (matrix size 2K + 1).
    #[arg(long = "K", global = true, value_name = "INT")]
    pub k_max: Option<usize>,
    /// Uniform eps grid with this many steps.
    #[arg(long, global = true, value_name = "INT")]
    pub eps_steps: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write an SVG figure (bands command).
    #[arg(long, global = true)]
    pub svg: bool,
    /// Worker threads for per-t and per-eps jobs (default: number of processors).
    #[arg(long, global = true, value_name = "INT")]
    pub workers: Option<usize>,
    /// Seed for randomized corpora; the commands themselves are deterministic.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
}

/// Result of a successful command.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub written: Vec<PathBuf>,
    pub message: String,
}

/// Configuration after flag overrides.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: RunConfig,
    pub k_max: usize,
    pub t: TSelection,
    pub eps_grid: Option<Vec<f64>>,
    pub out: PathBuf,
    pub svg: bool,
}

impl Settings {
    pub fn resolve(config: RunConfig, flags: &Flags) -> Result<Self> {
        let k_max = flags
            .k_max
            .or(config.k_max)
            .unwrap_or_else(|| default_truncation(&config.spec));
        if k_max == 0 {
            return Err(Error::Config("K must be positive".into()));
        }
        config.spec.check_index_budget(k_max as u64)?;
        let t = match (flags.t, flags.t_steps) {
            (Some(t), _) => TSelection::Value(t),
            (None, Some(0)) => return Err(Error::Config("--t-steps must be positive".into())),
            (None, Some(steps)) => TSelection::Grid { steps },
            (None, None) => config.t,
        };
        let eps_grid = flags
            .eps_steps
            .map(uniform_eps_grid)
            .or_else(|| config.eps_grid.clone());
        Ok(Self {
            k_max,
            t,
            eps_grid,
            out: flags.out.clone().unwrap_or_else(|| config.output.dir.clone()),
            svg: flags.svg || config.output.svg,
            config,
        })
    }

    fn single_t(&self, command: &str) -> Result<f64> {
        match self.t {
            TSelection::Value(t) => Ok(t),
            TSelection::Grid { .. } => Err(Error::Config(format!(
                "{command} needs a single quasimomentum (use --t)"
            ))),
        }
    }
}

#[derive(Serialize)]
struct EnclosureEntry {
    report: EnclosureReport,
    certificate: Certificate,
}

#[derive(Serialize)]
struct EigsEntry {
    k_label: i64,
    lambda: Complex64,
    trusted: bool,
    trunc_err: Option<f64>,
}

#[derive(Serialize)]
struct EigsReport {
    t: f64,
    eps: f64,
    #[serde(rename = "K")]
    k_max: usize,
    trusted_window: u64,
    eigenvalues: Vec<EigsEntry>,
}

#[derive(Serialize)]
struct BandsReport<'a> {
    bands: &'a BandStructure,
    checks: &'a [CheckRecord],
}

fn enclose(s: &Settings, out: &mut OutputSet) -> Result<(i32, String)> {
    let entries = s
        .t
        .points()
        .into_iter()
        .map(|t| {
            let report = EnclosureReport::new(&s.config.spec, t, s.config.report_window)?;
            let certificate = disjointness_certificate(&report);
            Ok(EnclosureEntry {
                report,
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if s.config.output.report {
        out.write("enclosure.json", &report_json("enclosure", &serde_json::json!({ "entries": entries })))?;
    }
    let first = &entries[0].report;
    let holds = entries.iter().all(|e| e.certificate.holds);
    Ok((
        0,
        format!(
            "C = {:e}, N = {}, reality threshold = {:e}, reality holds: {}, disjointness certificate: {}",
            first.c, first.big_n, first.reality_threshold, first.reality_holds, holds
        ),
    ))
}

fn eigs(s: &Settings, out: &mut OutputSet) -> Result<(i32, String)> {
    let t = s.single_t("eigs")?;
    let est = truncation_error_estimate(&s.config.spec, t, 1.0, s.k_max)?;
    if s.config.output.csv {
        out.write("eigs.csv", &eigs_csv(&est))?;
    }
    if s.config.output.report {
        let sol = &est.solution;
        let report = EigsReport {
            t,
            eps: 1.0,
            k_max: s.k_max,
            trusted_window: sol.trusted_window,
            eigenvalues: sol
                .pairs
                .iter()
                .zip(&est.errors)
                .map(|(p, e)| EigsEntry {
                    k_label: p.k_label,
                    lambda: p.lambda,
                    trusted: sol.is_trusted(p),
                    trunc_err: *e,
                })
                .collect(),
        };
        out.write("eigs.json", &report_json("eigs", &report))?;
    }
    let trusted = est.solution.trusted().count();
    Ok((0, format!("{} eigenvalues ({trusted} trusted) at t = {t}", est.solution.pairs.len())))
}

fn verify(s: &Settings, out: &mut OutputSet) -> Result<(i32, String)> {
    let c = &s.config;
    let report = run_verification(
        &c.spec,
        &s.t.points(),
        s.k_max,
        c.report_window,
        &c.tolerances,
        s.eps_grid.as_deref(),
    )?;
    let table = verification_table(&report);
    if c.output.report {
        out.write("verification.json", &report_json("verification", &report))?;
        out.write("verification.txt", &table)?;
    }
    let code = if report.summary.all_pass { 0 } else { 1 };
    Ok((code, table))
}

fn bands(s: &Settings, out: &mut OutputSet) -> Result<(i32, String)> {
    let c = &s.config;
    let grid = s.t.points();
    let bs = sweep(&c.spec, &grid, s.k_max, &c.tolerances)?;
    let t_last = *grid.last().unwrap();
    let report = EnclosureReport::new(&c.spec, t_last, c.report_window)?;
    let checks = [
        real_coverage_check(&bs, &report, &c.tolerances),
        nonreal_arcs_in_rectangle(&bs, &report, &c.tolerances),
    ];
    if c.output.csv {
        out.write("bands.csv", &bands_csv(&bs, &c.tolerances))?;
    }
    if c.output.report {
        out.write(
            "bands.json",
            &report_json("bands", &BandsReport { bands: &bs, checks: &checks }),
        )?;
    }
    if s.svg {
        let values: Vec<Complex64> = bs.bands.iter().map(|b| *b.values.last().unwrap()).collect();
        out.write("bands.svg", &crate::svg::figure(&bs, &values, &report))?;
    }
    let pass = checks.iter().all(|r| r.pass);
    let message = format!(
        "{} bands over {} t points, {} nonreal arcs, {}: {}, {}: {}",
        bs.bands.len(),
        grid.len(),
        bs.nonreal_arcs().count(),
        checks[0].name,
        if checks[0].pass { "PASS" } else { "FAIL" },
        checks[1].name,
        if checks[1].pass { "PASS" } else { "FAIL" },
    );
    Ok((if pass { 0 } else { 1 }, message))
}

fn homotopy(s: &Settings, out: &mut OutputSet) -> Result<(i32, String)> {
    let c = &s.config;
    let t = s.single_t("homotopy")?;
    let eps_grid = s.eps_grid.clone().unwrap_or_else(|| uniform_eps_grid(10));
    let report = EnclosureReport::new(&c.spec, t, c.report_window)?;
    let trace = homotopy_trace(&c.spec, t, s.k_max, &eps_grid, &report, &c.tolerances)?;
    if c.output.csv {
        out.write("homotopy.csv", &homotopy_csv(&trace))?;
    }
    if c.output.report {
        out.write("homotopy.json", &report_json("homotopy", &trace))?;
    }
    let pass = trace.record.pass;
    Ok((
        if pass { 0 } else { 1 },
        format!(
            "{} trajectories over {} eps points, {} ambiguous steps, homotopy: {}",
            trace.trajectories.len(),
            eps_grid.len(),
            trace.ambiguous_steps.len(),
            if pass { "PASS" } else { "FAIL" }
        ),
    ))
}

/// Runs `command` with resolved settings on a pool of `workers` threads.
pub fn execute(command: Command, settings: &Settings, workers: Option<usize>) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("--workers must be positive".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let mut out = OutputSet::new(&settings.out);
        let (exit_code, message) = match command {
            Command::Enclose => enclose(settings, &mut out),
            Command::Eigs => eigs(settings, &mut out),
            Command::Verify => verify(settings, &mut out),
            Command::Bands => bands(settings, &mut out),
            Command::Homotopy => homotopy(settings, &mut out),
        }?;
        Ok(Outcome {
            exit_code,
            written: out.commit(),
            message,
        })
    })
}

/// Reads the configuration named by `--config` and runs the command.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let path = cli
        .flags
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = parse_config(&text)?;
    let settings = Settings::resolve(config, &cli.flags)?;
    execute(cli.command, &settings, cli.flags.workers)
}
