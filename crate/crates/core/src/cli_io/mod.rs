//! Command-line driver and file outputs.
//!
//! A run directory holds
//!
//! - `diagnostics.csv`: one row per recorded instant with columns
//!   `t, L, A, lambda, iso_diff, iso_ratio, rho_min, rho_max, closure_norm,
//!   phi_max, grad_phi_max, flux`;
//! - `snapshots/NNNN.json`: reconstructed curves
//!   `{"t", "theta", "rho", "p", "x", "y"}`;
//! - `verdict.json`: the per-claim report;
//! - `config.json`: the resolved run configuration.

pub mod args;
mod config;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use args::{Cli, Command, RunArgs, SweepArgs, VerifyArgs};
pub use config::{default_output_dir, parse_config, InitialCurve, RunConfig, OUTPUT_DIR_ENV};

use crate::curve_model::{CurveState, FourierTerm};
use crate::diagnostics::{verdict, DiagnosticsLog, GeometricSummary, VerdictReport};
use crate::error::{FlowError, Result};
use crate::flow_engine::{FlowEngine, RunObserver};
use crate::geometry;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const VERDICT_FILE: &str = "verdict.json";
pub const CONFIG_FILE: &str = "config.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    t: f64,
    #[serde(rename = "L")]
    length: f64,
    #[serde(rename = "A")]
    area: f64,
    lambda: f64,
    iso_diff: f64,
    iso_ratio: f64,
    rho_min: f64,
    rho_max: f64,
    closure_norm: f64,
    phi_max: f64,
    grad_phi_max: f64,
    flux: f64,
}

impl From<&GeometricSummary> for CsvRow {
    fn from(s: &GeometricSummary) -> Self {
        CsvRow {
            t: s.t,
            length: s.length,
            area: s.area,
            lambda: s.lambda,
            iso_diff: s.iso_diff,
            iso_ratio: s.iso_ratio,
            rho_min: s.rho_min,
            rho_max: s.rho_max,
            closure_norm: s.closure_norm,
            phi_max: s.phi_max,
            grad_phi_max: s.grad_phi_max,
            flux: s.flux,
        }
    }
}

impl From<CsvRow> for GeometricSummary {
    fn from(r: CsvRow) -> Self {
        GeometricSummary {
            t: r.t,
            length: r.length,
            area: r.area,
            lambda: r.lambda,
            rho_min: r.rho_min,
            rho_max: r.rho_max,
            iso_diff: r.iso_diff,
            iso_ratio: r.iso_ratio,
            closure_norm: r.closure_norm,
            phi_max: r.phi_max,
            grad_phi_max: r.grad_phi_max,
            phi_tt_max: None,
            flux: r.flux,
        }
    }
}

pub fn write_diagnostics_csv(path: &Path, summaries: &[GeometricSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for s in summaries {
        w.serialize(CsvRow::from(s))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv(path: &Path, n: f64) -> Result<DiagnosticsLog> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r
        .deserialize::<CsvRow>()
        .map(|row| row.map(GeometricSummary::from).map_err(FlowError::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsLog::from_summaries(n, rows))
}

struct SnapshotWriter {
    dir: Option<PathBuf>,
    error: Option<FlowError>,
}

impl RunObserver for SnapshotWriter {
    fn on_snapshot(&mut self, index: usize, state: &CurveState) {
        let Some(dir) = &self.dir else { return };
        if self.error.is_some() {
            return;
        }
        let result = geometry::reconstruct(state).and_then(|curve| {
            fs::write(dir.join(format!("{index:04}.json")), curve.to_json_string()).map_err(FlowError::from)
        });
        if let Err(e) = result {
            self.error = Some(e);
        }
    }
}

/// Result of [`execute`].
#[derive(Debug)]
pub struct Outcome {
    pub verdict: VerdictReport,
    pub log: DiagnosticsLog,
    pub exit_code: i32,
}

/// Runs the flow described by `config` and writes all outputs. The exit
/// code is 0 only if the run completed and every claim held.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let initial = config.initial_state()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| FlowError::Io(format!("{}: {e}", dir.display())))?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_string_pretty(config)?)?;
    let snap_dir = dir.join(SNAPSHOT_DIR);
    if config.emit_snapshots {
        fs::create_dir_all(&snap_dir)?;
    }

    let engine = FlowEngine::new(config.params.clone(), &initial)?;
    let mut writer = SnapshotWriter {
        dir: config.emit_snapshots.then_some(snap_dir),
        error: None,
    };
    let mut log = engine.run(&initial, &mut writer);
    if let Some(e) = writer.error {
        log.warnings.push(format!("snapshot export failed: {e}"));
    }
    write_diagnostics_csv(&dir.join(DIAGNOSTICS_FILE), &log.summaries)?;
    let report = verdict(&log)?;
    fs::write(dir.join(VERDICT_FILE), report.to_json_string())?;
    let exit_code = if report.passed { 0 } else { 1 };
    Ok(Outcome {
        verdict: report,
        log,
        exit_code,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntry {
    pub n: f64,
    pub amplitude: f64,
    pub dir: PathBuf,
    pub passed: bool,
    pub error: Option<String>,
}

/// One run per `(n, amplitude)` pair, executed in parallel, each in its own
/// subdirectory. Writes `sweep.json` and returns the entries in input order.
pub fn sweep(args: &SweepArgs) -> Result<Vec<SweepEntry>> {
    let root = args.output_dir.clone().unwrap_or_else(default_output_dir);
    let mut base = RunConfig {
        output_dir: root.clone(),
        emit_snapshots: !args.no_snapshots,
        target_area: args.target_area,
        ..RunConfig::default()
    };
    config::apply_flow_args(&mut base.params, &args.flow);

    let mut configs = Vec::new();
    for &n in &args.n_values {
        for &amplitude in &args.amplitudes {
            let mut cfg = base.clone();
            cfg.params.n = n;
            cfg.initial = InitialCurve::Fourier {
                a0: args.a0,
                terms: vec![FourierTerm::cos(args.mode, amplitude)],
            };
            cfg.output_dir = root.join(format!("n{n}_amp{amplitude}"));
            cfg.validate()?;
            configs.push((n, amplitude, cfg));
        }
    }
    fs::create_dir_all(&root)?;
    let entries: Vec<SweepEntry> = configs
        .par_iter()
        .map(|(n, amplitude, cfg)| {
            let (passed, error) = match execute(cfg) {
                Ok(o) => (o.exit_code == 0, o.verdict.run_error),
                Err(e) => (false, Some(e.to_string())),
            };
            SweepEntry {
                n: *n,
                amplitude: *amplitude,
                dir: cfg.output_dir.clone(),
                passed,
                error,
            }
        })
        .collect();
    fs::write(root.join("sweep.json"), serde_json::to_string_pretty(&entries)?)?;
    Ok(entries)
}

/// Recomputes the verdict from `diagnostics.csv` in `args.dir`.
pub fn verify(args: &VerifyArgs) -> Result<VerdictReport> {
    let n = match args.n {
        Some(n) => n,
        None => RunConfig::load(&args.dir.join(CONFIG_FILE))?.params.n,
    };
    if !(n.is_finite() && n > 0.0) {
        return Err(FlowError::config("n", "must be finite and > 0"));
    }
    let log = read_diagnostics_csv(&args.dir.join(DIAGNOSTICS_FILE), n)?;
    let report = verdict(&log)?;
    if args.write {
        fs::write(args.dir.join(VERDICT_FILE), report.to_json_string())?;
    }
    Ok(report)
}
