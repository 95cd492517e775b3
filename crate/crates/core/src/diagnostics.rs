//! Per-instant summaries of the evolving curve and the checks run over a
//! whole time series: conservation, monotonicity, explicit bounds on the
//! nonlocal term and the length, the gradient maximum principle, exponential
//! decay of the isoperimetric difference, and convergence to the circle.
//!
//! Every check reads only [`GeometricSummary`] rows, so the same code runs on
//! a live [`DiagnosticsLog`] and on one reloaded from `diagnostics.csv`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve_model::{CurveState, GeometricBounds, DEFAULT_CLOSURE_TOL};
use crate::error::{FlowError, Result};
use crate::geometry::{self, periodic_sum, spectral};

/// Relative slack for bounds that hold exactly in the continuum.
pub const BOUND_SLACK: f64 = 1e-6;
/// Relative slack for step-to-step monotonicity.
pub const MONOTONE_SLACK: f64 = 1e-9;
pub const BRACKET_SLACK: f64 = 1e-8;
pub const AREA_DRIFT_TOL: f64 = 1e-8;
pub const LIMIT_INEQUALITY_SLACK: f64 = 1e-9;
pub const FLUX_SLACK: f64 = 1e-9;
/// Isoperimetric differences below this are round-off and excluded from fits.
pub const ISO_FLOOR: f64 = 1e-12;
pub const MIN_FIT_POINTS: usize = 10;
/// Fraction of the horizon skipped at the start of the decay fit.
pub const FIT_TRANSIENT_FRACTION: f64 = 0.05;
pub const DECAY_RATE_TOLERANCE: f64 = 0.01;
pub const MIN_FIT_R_SQUARED: f64 = 0.99;
/// Horizon needed before asymptotic claims are asserted.
pub const ASYMPTOTIC_HORIZON: f64 = 5.0;
pub const FLUX_DECAY_FACTOR: f64 = 100.0;
pub const DERIVATIVE_EARLY_FRACTION: f64 = 0.1;
pub const DERIVATIVE_GROWTH_FACTOR: f64 = 2.0;
pub const DERIVATIVE_DECAY_FACTOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub t: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "A")]
    pub area: f64,
    pub lambda: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// `L^2 - 4 pi A`.
    pub iso_diff: f64,
    /// `L^2 / (4 pi A)`.
    pub iso_ratio: f64,
    pub closure_norm: f64,
    /// `max (phi^2 + phi_theta^2)` with `phi = rho^n`.
    pub phi_max: f64,
    pub grad_phi_max: f64,
    /// `max |phi_theta theta|`; not stored in the CSV export.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_tt_max: Option<f64>,
    /// `dL/dt = int rho^n dtheta - L lambda`.
    pub flux: f64,
}

impl GeometricSummary {
    /// `int rho^{n+1} dtheta`.
    pub fn limit_lhs(&self) -> f64 {
        2.0 * self.area * self.lambda
    }
}

pub fn summarize(state: &CurveState, n: f64) -> Result<GeometricSummary> {
    summarize_with_tol(state, n, DEFAULT_CLOSURE_TOL)
}

pub fn summarize_with_tol(state: &CurveState, n: f64, closure_tol: f64) -> Result<GeometricSummary> {
    let rho = &state.rho;
    let length = geometry::length(state);
    let area = geometry::area_with_tol(rho, closure_tol)?;
    let lambda = geometry::lambda_from_rho(rho, n, area)?;
    let iso_diff = geometry::isoperimetric_difference(state);
    let (cx, cy) = geometry::closure_residual(state);

    let s = spectral(state.len());
    let phi: Vec<f64> = rho.iter().map(|r| r.powf(n)).collect();
    let dphi = s.first_derivative(&phi);
    let ddphi = s.second_derivative(&phi);
    let phi_max = phi
        .iter()
        .zip(&dphi)
        .map(|(f, d)| f * f + d * d)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));

    Ok(GeometricSummary {
        t: state.t,
        length,
        area,
        lambda,
        rho_min: state.rho_min(),
        rho_max: state.rho_max(),
        iso_diff,
        iso_ratio: 1.0 + iso_diff / (4.0 * PI * area),
        closure_norm: cx.hypot(cy),
        phi_max,
        grad_phi_max: max_abs(&dphi),
        phi_tt_max: Some(max_abs(&ddphi)),
        flux: periodic_sum(&phi) - length * lambda,
    })
}

/// Time series produced by one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsLog {
    pub n: f64,
    pub summaries: Vec<GeometricSummary>,
    #[serde(skip)]
    pub error: Option<FlowError>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub final_state: Option<CurveState>,
}

impl DiagnosticsLog {
    pub fn new(n: f64) -> Self {
        DiagnosticsLog {
            n,
            summaries: Vec::new(),
            error: None,
            warnings: Vec::new(),
            final_state: None,
        }
    }

    pub fn from_summaries(n: f64, summaries: Vec<GeometricSummary>) -> Self {
        DiagnosticsLog {
            summaries,
            ..Self::new(n)
        }
    }

    pub fn push(&mut self, summary: GeometricSummary) {
        self.summaries.push(summary);
    }

    pub fn is_empty(&self) -> bool {
        self.summaries.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        match (self.summaries.first(), self.summaries.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    /// Bounds derived from the first row.
    pub fn bounds(&self) -> Result<GeometricBounds> {
        let s0 = self
            .summaries
            .first()
            .ok_or_else(|| FlowError::invalid("empty diagnostics log"))?;
        Ok(GeometricBounds::from_scalars(
            self.n, s0.area, s0.length, s0.lambda, s0.rho_min,
        ))
    }

    /// True when the initial curve is measurably non-circular.
    pub fn is_circularizing(&self) -> bool {
        self.summaries.first().is_some_and(|s| s.iso_diff > ISO_FLOOR)
    }

    pub fn iso_series(&self) -> Vec<(f64, f64)> {
        self.summaries.iter().map(|s| (s.t, s.iso_diff)).collect()
    }
}

/// Outcome of one monitored claim. `worst_margin` is the smallest remaining
/// slack over the run in the claim's own (relative) units; the claim holds
/// when it is not below minus the tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub holds: bool,
    pub skipped: bool,
    pub worst_margin: f64,
    pub worst_time: f64,
    pub detail: String,
}

impl ClaimResult {
    fn skipped(id: &str, reason: impl Into<String>) -> Self {
        ClaimResult {
            id: id.to_string(),
            holds: true,
            skipped: true,
            worst_margin: 0.0,
            worst_time: 0.0,
            detail: reason.into(),
        }
    }
}

struct Tracker {
    id: &'static str,
    tolerance: f64,
    worst: f64,
    at: f64,
}

impl Tracker {
    fn new(id: &'static str, tolerance: f64) -> Self {
        Tracker {
            id,
            tolerance,
            worst: f64::INFINITY,
            at: 0.0,
        }
    }

    fn observe(&mut self, t: f64, margin: f64) {
        // NaN margins count as violations
        if !(margin >= self.worst) {
            self.worst = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
            self.at = t;
        }
    }

    fn finish(self, detail: impl Into<String>) -> ClaimResult {
        let worst = if self.worst.is_infinite() && self.worst > 0.0 { 0.0 } else { self.worst };
        ClaimResult {
            id: self.id.to_string(),
            holds: worst >= -self.tolerance,
            skipped: false,
            worst_margin: worst,
            worst_time: self.at,
            detail: detail.into(),
        }
    }
}

fn require_rows(log: &DiagnosticsLog) -> Result<&[GeometricSummary]> {
    if log.summaries.is_empty() {
        return Err(FlowError::invalid("diagnostics log is empty"));
    }
    Ok(&log.summaries)
}

/// Explicit bounds asserted at every recorded instant: lambda between its
/// lower bound and its initial value, length between `sqrt(4 pi A0)` and
/// `L0`, the limit radius bracketed by the extreme radii of curvature, and
/// the running-maximum form of the gradient estimate for `phi`.
pub fn check_bounds(log: &DiagnosticsLog, bounds: &GeometricBounds) -> Result<Vec<ClaimResult>> {
    let rows = require_rows(log)?;
    let n = log.n;
    let mut lambda = Tracker::new("lambda_bounds", BOUND_SLACK);
    let mut length = Tracker::new("length_bounds", BOUND_SLACK);
    let mut bracket = Tracker::new("radius_bracketing", BRACKET_SLACK);
    let mut gradient = Tracker::new("gradient_max_principle", BOUND_SLACK);

    let phi0 = rows[0].phi_max;
    let mut run_phi = f64::NEG_INFINITY;
    let mut run_phi_sq = f64::NEG_INFINITY;
    let r0 = bounds.limit_radius;
    for s in rows {
        lambda.observe(
            s.t,
            ((s.lambda - bounds.m1) / bounds.m1).min((bounds.m2 - s.lambda) / bounds.m2),
        );
        length.observe(
            s.t,
            ((s.length - bounds.l_lower) / bounds.l_lower)
                .min((bounds.l_upper - s.length) / bounds.l_upper),
        );
        bracket.observe(s.t, ((r0 - s.rho_min) / r0).min((s.rho_max - r0) / r0));

        run_phi = run_phi.max(s.phi_max);
        run_phi_sq = run_phi_sq.max(s.rho_max.powf(2.0 * n));
        let cap = run_phi_sq.max(phi0);
        gradient.observe(s.t, (cap - run_phi) / cap);
    }
    Ok(vec![
        lambda.finish(format!("M1 = {:.12}, M2 = {:.12}", bounds.m1, bounds.m2)),
        length.finish(format!(
            "sqrt(4 pi A0) = {:.12}, L0 = {:.12}",
            bounds.l_lower, bounds.l_upper
        )),
        bracket.finish(format!("sqrt(A0 / pi) = {:.12}", r0)),
        gradient.finish("max Phi <= max(max phi^2, max Phi(0)) over [0, t]"),
    ])
}

/// Step-to-step monotonicity of length, nonlocal term and isoperimetric
/// ratio, plus conservation of area.
pub fn check_monotonicity(log: &DiagnosticsLog) -> Result<Vec<ClaimResult>> {
    let rows = require_rows(log)?;
    let mut length = Tracker::new("length_nonincreasing", MONOTONE_SLACK);
    let mut lambda = Tracker::new("lambda_nonincreasing", MONOTONE_SLACK);
    let mut ratio = Tracker::new("iso_ratio_nonincreasing", MONOTONE_SLACK);
    let mut area = Tracker::new("area_conserved", 0.0);
    let a0 = rows[0].area;
    area.observe(rows[0].t, AREA_DRIFT_TOL);
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        length.observe(b.t, (a.length - b.length) / a.length);
        lambda.observe(b.t, (a.lambda - b.lambda) / a.lambda);
        ratio.observe(b.t, (a.iso_ratio - b.iso_ratio) / a.iso_ratio);
        area.observe(b.t, AREA_DRIFT_TOL - (b.area - a0).abs() / a0);
    }
    Ok(vec![
        area.finish(format!("|A - A0| / A0 <= {AREA_DRIFT_TOL:e}")),
        length.finish("dL/dt <= 0"),
        lambda.finish("d lambda/dt <= 0"),
        ratio.finish("d/dt L^2 / (4 pi A) <= 0"),
    ])
}

/// `kappa_max(t) <= kappa_max(0) exp(M2 t)`.
pub fn check_curvature_growth(log: &DiagnosticsLog, bounds: &GeometricBounds) -> Result<ClaimResult> {
    let rows = require_rows(log)?;
    let t0 = rows[0].t;
    let mut tr = Tracker::new("curvature_growth", BOUND_SLACK);
    for s in rows {
        let ceiling = bounds.kappa_max0 * (bounds.m2 * (s.t - t0)).exp();
        tr.observe(s.t, (ceiling - 1.0 / s.rho_min) / ceiling);
    }
    Ok(tr.finish(format!("kappa_max(0) = {:.12}", bounds.kappa_max0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// `int rho^{n+1} dtheta >= 2 pi (A / pi)^{(n+1)/2}`, with equality only for
/// circles.
pub fn check_limit_inequality(state: &CurveState, n: f64) -> Result<LimitInequality> {
    let area = geometry::area(state)?;
    let powered: Vec<f64> = state.rho.iter().map(|r| r.powf(n + 1.0)).collect();
    Ok(limit_inequality_from(periodic_sum(&powered), area, n))
}

fn limit_inequality_from(lhs: f64, area: f64, n: f64) -> LimitInequality {
    let rhs = 2.0 * PI * (area / PI).powf((n + 1.0) / 2.0);
    LimitInequality {
        lhs,
        rhs,
        margin: lhs - rhs,
    }
}

pub fn limit_inequality_series(log: &DiagnosticsLog) -> Vec<(f64, LimitInequality)> {
    log.summaries
        .iter()
        .map(|s| (s.t, limit_inequality_from(s.limit_lhs(), s.area, log.n)))
        .collect()
}

pub fn check_limit_inequality_series(log: &DiagnosticsLog) -> Result<ClaimResult> {
    require_rows(log)?;
    let mut tr = Tracker::new("integral_inequality", LIMIT_INEQUALITY_SLACK);
    for (t, li) in limit_inequality_series(log) {
        tr.observe(t, li.margin / li.lhs);
    }
    Ok(tr.finish("int rho^{n+1} >= 2 pi (A / pi)^{(n+1)/2}"))
}

/// Least-squares fit of `log(iso_diff)` against `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `iso_diff ~ C exp(-rate t)` over the points above [`ISO_FLOOR`].
pub fn fit_decay_rate(series: &[(f64, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, v)| t.is_finite() && *v > ISO_FLOOR && v.is_finite())
        .map(|&(t, v)| (t, v.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(FlowError::InsufficientData(format!(
            "{} usable points, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        let (dt, dy) = (t - mean_t, y - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(FlowError::InsufficientData("all points share one time".into()));
    }
    let slope = sty / stt;
    let ss_res: f64 = pts
        .iter()
        .map(|&(t, y)| {
            let e = y - (mean_y + slope * (t - mean_t));
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        r_squared,
        points: pts.len(),
    })
}

/// Fit over the run after the initial transient.
pub fn fit_log_decay(log: &DiagnosticsLog) -> Result<DecayFit> {
    let rows = require_rows(log)?;
    let t_start = rows[0].t + FIT_TRANSIENT_FRACTION * log.horizon();
    let window: Vec<(f64, f64)> = log.iso_series().into_iter().filter(|(t, _)| *t >= t_start).collect();
    fit_decay_rate(&window)
}

/// The fitted decay rate must not fall below the guaranteed one by more
/// than [`DECAY_RATE_TOLERANCE`], and the fit must be good.
pub fn check_isoperimetric_decay(log: &DiagnosticsLog, bounds: &GeometricBounds) -> Result<(ClaimResult, Option<DecayFit>)> {
    const ID: &str = "isoperimetric_decay";
    require_rows(log)?;
    if !log.is_circularizing() {
        return Ok((ClaimResult::skipped(ID, "initial curve is already circular"), None));
    }
    let fit = match fit_log_decay(log) {
        Ok(f) => f,
        Err(FlowError::InsufficientData(msg)) => {
            return Ok((ClaimResult::skipped(ID, format!("insufficient data: {msg}")), None))
        }
        Err(e) => return Err(e),
    };
    let margin = (fit.rate - bounds.decay_rate) / bounds.decay_rate;
    let holds = margin >= -DECAY_RATE_TOLERANCE && fit.r_squared > MIN_FIT_R_SQUARED;
    Ok((
        ClaimResult {
            id: ID.to_string(),
            holds,
            skipped: false,
            worst_margin: margin,
            worst_time: log.summaries.last().map_or(0.0, |s| s.t),
            detail: format!(
                "fitted rate {:.6} (r^2 = {:.8}, {} points) vs guaranteed {:.6}",
                fit.rate, fit.r_squared, fit.points, bounds.decay_rate
            ),
        },
        Some(fit),
    ))
}

/// Length flux `int rho^n - L lambda`: nonpositive at every instant,
/// consistent with the differenced length series, and decayed by a factor
/// of [`FLUX_DECAY_FACTOR`] by the end of a circularizing run.
pub fn check_length_flux(log: &DiagnosticsLog) -> Result<ClaimResult> {
    let rows = require_rows(log)?;
    if log.horizon() < ASYMPTOTIC_HORIZON {
        return Err(FlowError::InsufficientData(format!(
            "horizon {:.3} is shorter than {ASYMPTOTIC_HORIZON}",
            log.horizon()
        )));
    }
    let mut tr = Tracker::new("length_flux", 0.0);
    for s in rows {
        tr.observe(s.t, FLUX_SLACK - s.flux);
    }
    let mut worst_mismatch = 0.0_f64;
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        if dt <= 0.0 {
            continue;
        }
        let secant = (b.length - a.length) / dt;
        let trapezoid = 0.5 * (a.flux + b.flux);
        let allowed = (b.flux - a.flux).abs() + 1e-12 * a.length / dt;
        let excess = (secant - trapezoid).abs() - allowed;
        worst_mismatch = worst_mismatch.max(excess);
        if excess > 0.0 {
            tr.observe(b.t, -excess);
        }
    }
    let first = rows[0].flux.abs();
    let last = rows[rows.len() - 1].flux.abs();
    let mut detail = format!("flux(0) = {:.6e}, flux(end) = {:.6e}", rows[0].flux, rows[rows.len() - 1].flux);
    if log.is_circularizing() {
        let t_end = rows[rows.len() - 1].t;
        if first > 0.0 {
            tr.observe(t_end, (first / FLUX_DECAY_FACTOR - last) / first);
        }
        detail.push_str(", decay asserted");
    }
    Ok(tr.finish(detail))
}

/// Empirical uniform bounds on `|phi_theta|` and `|phi_theta theta|`: the
/// maxima over the run may not exceed twice those over its first tenth, and
/// on circularizing runs of sufficient length both must decay below
/// `1e-3` of their initial values.
pub fn check_derivative_bounds(log: &DiagnosticsLog) -> Result<ClaimResult> {
    let rows = require_rows(log)?;
    let t0 = rows[0].t;
    let early_end = t0 + DERIVATIVE_EARLY_FRACTION * log.horizon();
    let second: Option<Vec<f64>> = rows.iter().map(|s| s.phi_tt_max).collect();
    let mut series: Vec<(&str, Vec<f64>)> = vec![("phi_theta", rows.iter().map(|s| s.grad_phi_max).collect())];
    if let Some(v) = second {
        series.push(("phi_theta_theta", v));
    }
    let asymptotic = log.is_circularizing() && log.horizon() >= ASYMPTOTIC_HORIZON;
    let mut tr = Tracker::new("derivative_bounds", 0.0);
    let mut detail = Vec::new();
    for (name, values) in &series {
        let early = rows
            .iter()
            .zip(values)
            .filter(|(s, _)| s.t <= early_end)
            .map(|(_, v)| *v)
            .fold(0.0_f64, f64::max);
        let cap = DERIVATIVE_GROWTH_FACTOR * early + 1e-12;
        for (s, v) in rows.iter().zip(values) {
            tr.observe(s.t, (cap - v) / cap);
        }
        let (first, last) = (values[0], values[values.len() - 1]);
        if asymptotic && first > 0.0 {
            tr.observe(rows[rows.len() - 1].t, (DERIVATIVE_DECAY_FACTOR * first - last) / first);
        }
        detail.push(format!("{name}: early max {early:.6e}, final {last:.6e}"));
    }
    Ok(tr.finish(detail.join("; ")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub n: f64,
    pub passed: bool,
    pub run_error: Option<String>,
    pub claims: Vec<ClaimResult>,
    pub fitted_decay_rate: Option<f64>,
    pub fit_r_squared: Option<f64>,
    /// Guaranteed lower bound on the decay rate.
    #[serde(rename = "paper_decay_rate")]
    pub predicted_decay_rate: f64,
    /// `max |rho(., t_end) - sqrt(A0 / pi)|`.
    pub final_radius_error: f64,
    pub bounds: GeometricBounds,
    pub warnings: Vec<String>,
}

impl VerdictReport {
    pub fn claim(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// Runs every monitored claim over the log.
pub fn verdict(log: &DiagnosticsLog) -> Result<VerdictReport> {
    let rows = require_rows(log)?;
    let bounds = log.bounds()?;
    let mut claims = check_monotonicity(log)?;
    claims.extend(check_bounds(log, &bounds)?);
    claims.push(check_curvature_growth(log, &bounds)?);
    claims.push(check_limit_inequality_series(log)?);
    claims.push(match check_length_flux(log) {
        Ok(c) => c,
        Err(FlowError::InsufficientData(msg)) => ClaimResult::skipped("length_flux", msg),
        Err(e) => return Err(e),
    });
    claims.push(check_derivative_bounds(log)?);
    let (decay, fit) = check_isoperimetric_decay(log, &bounds)?;
    claims.push(decay);

    let last = &rows[rows.len() - 1];
    let r0 = bounds.limit_radius;
    let run_error = log.error.as_ref().map(|e| e.to_string());
    let passed = run_error.is_none() && claims.iter().all(|c| c.holds);
    Ok(VerdictReport {
        n: log.n,
        passed,
        run_error,
        claims,
        fitted_decay_rate: fit.map(|f| f.rate),
        fit_r_squared: fit.map(|f| f.r_squared),
        predicted_decay_rate: bounds.decay_rate,
        final_radius_error: (last.rho_max - r0).abs().max((last.rho_min - r0).abs()),
        bounds,
        warnings: log.warnings.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_model::{make_circle, make_fourier, FourierTerm};

    fn synthetic(rows: impl Iterator<Item = (f64, f64)>) -> DiagnosticsLog {
        let summaries = rows
            .map(|(t, iso)| GeometricSummary {
                t,
                length: 2.0 * PI,
                area: PI,
                lambda: 1.0,
                rho_min: 1.0,
                rho_max: 1.0,
                iso_diff: iso,
                iso_ratio: 1.0,
                closure_norm: 0.0,
                phi_max: 1.0,
                grad_phi_max: 0.0,
                phi_tt_max: Some(0.0),
                flux: 0.0,
            })
            .collect();
        DiagnosticsLog::from_summaries(2.0, summaries)
    }

    #[test]
    fn summary_of_unit_circle() {
        let s = summarize(&make_circle(1.0, 64).unwrap(), 2.0).unwrap();
        assert!((s.length - 2.0 * PI).abs() < 1e-13);
        assert!((s.area - PI).abs() < 1e-13);
        assert!((s.lambda - 1.0).abs() < 1e-13);
        assert_eq!(s.iso_diff, 0.0);
        assert!((s.phi_max - 1.0).abs() < 1e-13);
        assert!(s.grad_phi_max < 1e-13);
    }

    #[test]
    fn summary_of_perturbed_circle() {
        let state = make_fourier(1.0, &[FourierTerm::cos(2, 0.3)], 128).unwrap();
        let s = summarize(&state, 1.0).unwrap();
        assert!((s.iso_diff - 0.06 * PI * PI).abs() < 1e-13);
        assert!((s.iso_diff - 0.592176).abs() < 1e-6);
        assert!((s.flux - 2.0 * PI * (1.0 - 2.09 / 1.97)).abs() < 1e-12);
        assert!((s.flux + 0.382733).abs() < 1e-6);
        assert!(s.rho_min <= s.rho_max);
    }

    #[test]
    fn summary_of_radius_two_cubic() {
        let s = summarize(&make_circle(2.0, 32).unwrap(), 3.0).unwrap();
        assert!((s.lambda - 4.0).abs() < 1e-12);
        assert!((s.phi_max - 64.0).abs() < 1e-11);
    }

    #[test]
    fn exact_exponential_rate_is_recovered() {
        let series: Vec<(f64, f64)> = (0..200).map(|i| {
            let t = i as f64 * 0.05;
            (t, 3.0 * (-2.0 * t).exp())
        }).collect();
        let fit = fit_decay_rate(&series).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-8 * 2.0);
        assert!(fit.r_squared > 0.999999);
    }

    #[test]
    fn constant_series_has_zero_rate() {
        let series: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 0.5)).collect();
        let fit = fit_decay_rate(&series).unwrap();
        assert_eq!(fit.rate, 0.0);
    }

    #[test]
    fn fit_needs_points_above_floor() {
        let series: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, if i < 5 { 1.0 } else { 1e-14 })).collect();
        assert!(matches!(fit_decay_rate(&series), Err(FlowError::InsufficientData(_))));
    }

    #[test]
    fn limit_inequality_examples() {
        let li = check_limit_inequality(&make_circle(1.0, 64).unwrap(), 2.0).unwrap();
        assert!((li.lhs - 2.0 * PI).abs() < 1e-13);
        assert!(li.margin.abs() < 1e-12);

        let state = make_fourier(1.0, &[FourierTerm::cos(2, 0.3)], 128).unwrap();
        let li = check_limit_inequality(&state, 1.0).unwrap();
        assert!((li.lhs - 2.09 * PI).abs() < 1e-12);
        assert!((li.rhs - 1.97 * PI).abs() < 1e-12);
        assert!((li.margin - 0.12 * PI).abs() < 1e-12);
    }

    #[test]
    fn circle_claims_hold_with_zero_margin() {
        let rows = (0..100).map(|i| (i as f64 * 0.1, 0.0));
        let log = synthetic(rows);
        let bounds = log.bounds().unwrap();
        assert!((bounds.m1 - 1.0).abs() < 1e-14);
        for c in check_bounds(&log, &bounds).unwrap() {
            assert!(c.holds, "{c:?}");
            assert!(c.worst_margin.abs() < 1e-12, "{c:?}");
        }
        let v = verdict(&log).unwrap();
        assert!(v.passed, "{v:#?}");
        assert!(v.claim("isoperimetric_decay").unwrap().skipped);
    }

    #[test]
    fn claims_appear_once() {
        let log = synthetic((0..100).map(|i| (i as f64 * 0.1, 0.0)));
        let v = verdict(&log).unwrap();
        let mut ids: Vec<&str> = v.claims.iter().map(|c| c.id.as_str()).collect();
        let total = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), total);
    }

    #[test]
    fn violations_are_detected() {
        let mut log = synthetic((0..100).map(|i| (i as f64 * 0.1, 0.0)));
        log.summaries[50].length += 1e-3;
        log.summaries[60].lambda = 0.5;
        log.summaries[70].rho_min = 1.1;
        let v = verdict(&log).unwrap();
        assert!(!v.passed);
        for id in ["length_nonincreasing", "lambda_bounds", "radius_bracketing"] {
            let c = v.claim(id).unwrap();
            assert!(!c.holds, "{id}");
        }
        assert_eq!(v.claim("radius_bracketing").unwrap().worst_time, 7.0);
    }

    #[test]
    fn short_horizon_skips_flux() {
        let log = synthetic((0..10).map(|i| (i as f64 * 0.1, 0.0)));
        assert!(matches!(check_length_flux(&log), Err(FlowError::InsufficientData(_))));
        assert!(verdict(&log).unwrap().claim("length_flux").unwrap().skipped);
    }

    #[test]
    fn empty_log_is_rejected() {
        let log = DiagnosticsLog::new(1.0);
        let bounds = GeometricBounds::from_scalars(1.0, PI, 2.0 * PI, 1.0, 1.0);
        assert!(matches!(check_bounds(&log, &bounds), Err(FlowError::InvalidArgument(_))));
    }
}
