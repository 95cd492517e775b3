//! Semi-discrete right-hand side of the radius-of-curvature equation
//!
//! ```text
//! rho_t = (rho^n)'' + rho^n - lambda rho,   lambda = (1/2A) int rho^{n+1}
//! ```
//!
//! and its time integration. Differentiation in theta is either spectral or
//! second-order central differences; the enclosed area entering `lambda` is
//! recomputed from the current samples at every evaluation. With spectral
//! differentiation `<p, rhs>` vanishes identically because `d^2 + 1` is
//! self-adjoint under the grid inner product, which is the discrete form of
//! area conservation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve_model::{CurveState, DerivMethod, FlowParams, Scheme};
use crate::diagnostics::{summarize_with_tol, DiagnosticsLog, GeometricSummary};
use crate::error::{FlowError, Result};
use crate::geometry::{self, spectral};

/// Relative spectral-tail amplitude above which a run records an
/// under-resolution warning.
pub const SPECTRAL_TAIL_WARNING: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stabilizer {
    ClosureProjection,
    AreaRenormalization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub dt_used: f64,
    /// Max norm of the right-hand side at the start of the step.
    pub rhs_max_norm: f64,
    pub stabilizers_applied: Vec<Stabilizer>,
    pub post_step_summary: GeometricSummary,
}

fn check_floor(rho: &[f64], t: f64, params: &FlowParams) -> Result<()> {
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    let floor = params.positivity_floor * mean.abs();
    if let Some(index) = rho.iter().position(|&r| !(r > floor)) {
        if !rho[index].is_finite() {
            return Err(FlowError::NumericalBlowup { t });
        }
        return Err(FlowError::ConvexityViolation {
            index,
            theta: 2.0 * PI * index as f64 / rho.len() as f64,
            t,
            value: rho[index],
        });
    }
    Ok(())
}

fn rhs_samples(rho: &[f64], t: f64, params: &FlowParams) -> Result<Vec<f64>> {
    check_floor(rho, t, params)?;
    let n = params.n;
    let area = geometry::area_with_tol(rho, params.closure_tol)?;
    let lambda = geometry::lambda_from_rho(rho, n, area)?;
    let powered: Vec<f64> = rho.iter().map(|r| r.powf(n)).collect();
    let curvature_term = geometry::second_derivative(&powered, params.deriv_method);
    Ok(powered
        .iter()
        .zip(&curvature_term)
        .zip(rho)
        .map(|((pw, d2), r)| d2 + pw - lambda * r)
        .collect())
}

/// `(rho^n)'' + rho^n - lambda rho` with `lambda` built from the current area.
pub fn rhs_rho(state: &CurveState, params: &FlowParams) -> Result<Vec<f64>> {
    rhs_samples(&state.rho, state.t, params)
}

/// Right-hand side for `phi = rho^n`:
/// `n phi^{1-1/n} (phi'' + phi - lambda phi^{1/n})`.
///
/// Kept only to cross-check `rhs_rho` through `phi_t = n rho^{n-1} rho_t`.
pub fn rhs_phi(phi: &[f64], params: &FlowParams) -> Result<Vec<f64>> {
    let n = params.n;
    if let Some(index) = phi.iter().position(|&v| !(v > 0.0)) {
        return Err(FlowError::ConvexityViolation {
            index,
            theta: 2.0 * PI * index as f64 / phi.len() as f64,
            t: 0.0,
            value: phi[index],
        });
    }
    let rho: Vec<f64> = phi.iter().map(|v| v.powf(1.0 / n)).collect();
    let area = geometry::area_with_tol(&rho, params.closure_tol)?;
    let lifted: Vec<f64> = phi.iter().map(|v| v.powf(1.0 + 1.0 / n)).collect();
    let lambda = geometry::periodic_sum(&lifted) / (2.0 * area);
    let d2 = geometry::second_derivative(phi, params.deriv_method);
    Ok(phi
        .iter()
        .zip(&d2)
        .zip(&rho)
        .map(|((v, dd), r)| n * v.powf(1.0 - 1.0 / n) * (dd + v - lambda * r))
        .collect())
}

fn max_diffusivity(rho: &[f64], n: f64) -> f64 {
    rho.iter()
        .map(|r| n * r.powf(n - 1.0))
        .fold(0.0, f64::max)
}

/// `cfl * dtheta^2 / (2 max_j n rho_j^{n-1})`, capped by the snapshot
/// interval.
pub fn stable_dt(state: &CurveState, params: &FlowParams) -> f64 {
    let h = 2.0 * PI / state.len() as f64;
    let dt = params.cfl_factor * h * h / (2.0 * max_diffusivity(&state.rho, params.n));
    dt.min(params.snapshot_interval)
}

/// Time integrator bound to one initial area (needed for renormalization).
#[derive(Clone, Debug)]
pub struct FlowEngine {
    params: FlowParams,
    area0: f64,
}

/// Callbacks invoked synchronously from [`FlowEngine::run`].
pub trait RunObserver {
    fn on_summary(&mut self, _summary: &GeometricSummary) {}
    fn on_snapshot(&mut self, _index: usize, _state: &CurveState) {}
}

pub struct NoopObserver;

impl RunObserver for NoopObserver {}

impl FlowEngine {
    pub fn new(params: FlowParams, initial: &CurveState) -> Result<Self> {
        params.validate()?;
        if initial.len() != params.grid_size {
            return Err(FlowError::invalid(format!(
                "initial state has {} samples but grid_size is {}",
                initial.len(),
                params.grid_size
            )));
        }
        let area0 = geometry::area_with_tol(&initial.rho, params.closure_tol)?;
        Ok(FlowEngine { params, area0 })
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn initial_area(&self) -> f64 {
        self.area0
    }

    fn base_dt(&self, state: &CurveState) -> f64 {
        match self.params.fixed_dt {
            Some(dt) => dt.min(self.params.snapshot_interval),
            None => stable_dt(state, &self.params),
        }
    }

    pub fn step(&self, state: &CurveState) -> Result<(CurveState, StepReport)> {
        self.step_with_dt(state, self.base_dt(state))
    }

    pub fn step_with_dt(&self, state: &CurveState, dt: f64) -> Result<(CurveState, StepReport)> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(FlowError::invalid(format!("time step must be positive, got {dt}")));
        }
        let p = &self.params;
        let t_new = state.t + dt;
        let k1 = rhs_samples(&state.rho, state.t, p)?;
        let rhs_max_norm = k1.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        let mut rho = match p.scheme {
            Scheme::ExplicitRk4 => self.rk4(state, &k1, dt)?,
            Scheme::StabilizedSemiImplicit => self.semi_implicit(state, &k1, dt),
        };
        if rho.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::NumericalBlowup { t: t_new });
        }

        let mut applied = Vec::new();
        let s = spectral(rho.len());
        if p.project_closure {
            let mut c = s.forward(&rho);
            let m = c.len();
            c[1] = 0.0.into();
            c[m - 1] = 0.0.into();
            rho = s.inverse(&c);
            applied.push(Stabilizer::ClosureProjection);
        }
        if p.renormalize_area {
            let a = geometry::area_with_tol(&rho, p.closure_tol)?;
            let scale = (self.area0 / a).sqrt();
            rho.iter_mut().for_each(|r| *r *= scale);
            applied.push(Stabilizer::AreaRenormalization);
        }
        check_floor(&rho, t_new, p)?;

        let next = CurveState { rho, t: t_new };
        let summary = summarize_with_tol(&next, p.n, f64::INFINITY)?;
        Ok((
            next,
            StepReport {
                dt_used: dt,
                rhs_max_norm,
                stabilizers_applied: applied,
                post_step_summary: summary,
            },
        ))
    }

    fn rk4(&self, state: &CurveState, k1: &[f64], dt: f64) -> Result<Vec<f64>> {
        let p = &self.params;
        let t = state.t;
        let y = &state.rho;
        let axpy = |k: &[f64], a: f64| -> Vec<f64> {
            y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect()
        };
        let k2 = rhs_samples(&axpy(k1, 0.5 * dt), t + 0.5 * dt, p)?;
        let k3 = rhs_samples(&axpy(&k2, 0.5 * dt), t + 0.5 * dt, p)?;
        let k4 = rhs_samples(&axpy(&k3, dt), t + dt, p)?;
        Ok((0..y.len())
            .map(|j| y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect())
    }

    /// `(I - dt D L) rho_new = rho + dt (rhs - D L rho)` with `L` the second
    /// derivative operator and `D` the largest linearized diffusivity.
    fn semi_implicit(&self, state: &CurveState, k1: &[f64], dt: f64) -> Vec<f64> {
        let m = state.len();
        let d = max_diffusivity(&state.rho, self.params.n);
        let h = 2.0 * PI / m as f64;
        let symbol = |k: i64| -> f64 {
            match self.params.deriv_method {
                DerivMethod::Spectral => (k * k) as f64,
                DerivMethod::CentralFd2 => 4.0 / (h * h) * (0.5 * k as f64 * h).sin().powi(2),
            }
        };
        let lap = geometry::second_derivative(&state.rho, self.params.deriv_method);
        let explicit: Vec<f64> = (0..m)
            .map(|j| state.rho[j] + dt * (k1[j] - d * lap[j]))
            .collect();
        spectral(m).apply_multiplier(&explicit, |k| 1.0 / (1.0 + dt * d * symbol(k)))
    }

    /// Advances `initial` to `t_end`, logging a summary after every step and
    /// handing snapshots to the observer at multiples of the snapshot
    /// interval. A failing step ends the run; the error is kept in the log.
    pub fn run(&self, initial: &CurveState, observer: &mut dyn RunObserver) -> DiagnosticsLog {
        let p = &self.params;
        let mut log = DiagnosticsLog::new(p.n);
        let first = match summarize_with_tol(initial, p.n, p.closure_tol) {
            Ok(s) => s,
            Err(e) => {
                log.error = Some(e);
                return log;
            }
        };
        observer.on_summary(&first);
        log.push(first);
        observer.on_snapshot(0, initial);
        self.check_tail(initial, &mut log);

        let mut state = initial.clone();
        let mut next_snap = 1usize;
        let mut last_snapshot_t = initial.t;
        let end = initial.t + p.t_end;
        while state.t < end {
            let snap_t = initial.t + next_snap as f64 * p.snapshot_interval;
            let boundary = snap_t.min(end);
            let mut dt = self.base_dt(&state);
            let landing = state.t + dt >= boundary - 1e-3 * dt;
            if landing {
                dt = boundary - state.t;
            }
            match self.step_with_dt(&state, dt) {
                Ok((mut next, mut report)) => {
                    if landing {
                        next.t = boundary;
                        report.post_step_summary.t = boundary;
                    }
                    observer.on_summary(&report.post_step_summary);
                    log.push(report.post_step_summary);
                    state = next;
                    if landing && boundary == snap_t {
                        observer.on_snapshot(next_snap, &state);
                        self.check_tail(&state, &mut log);
                        last_snapshot_t = state.t;
                        next_snap += 1;
                    }
                }
                Err(e) => {
                    log.error = Some(e);
                    break;
                }
            }
        }
        if log.error.is_none() && state.t != last_snapshot_t {
            observer.on_snapshot(next_snap, &state);
        }
        log.final_state = Some(state);
        log
    }

    fn check_tail(&self, state: &CurveState, log: &mut DiagnosticsLog) {
        let tail = geometry::spectral_tail(state);
        if tail > SPECTRAL_TAIL_WARNING {
            log.warnings.push(format!(
                "spectral tail {tail:.3e} at t = {:.6} exceeds {SPECTRAL_TAIL_WARNING:.0e}; \
                 the grid of {} points under-resolves the curve",
                state.t,
                state.len()
            ));
        }
    }
}
