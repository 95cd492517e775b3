//! Evolving state, run parameters, and constructors for initial curves.
//!
//! A strictly convex closed curve is described by its radius of curvature
//! `rho(theta)` as a function of the tangent angle, sampled on a uniform grid
//! of `M` points. Closure of the curve is equivalent to `rho` having no first
//! harmonic; positivity of `rho` is strict convexity.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::geometry;

/// Smallest admissible grid.
pub const MIN_GRID: usize = 16;

/// Constructors reject curves whose minimum radius of curvature is below
/// this multiple of the mean radius.
pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-8;

pub const DEFAULT_CLOSURE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ExplicitRk4,
    StabilizedSemiImplicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivMethod {
    Spectral,
    CentralFd2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowParams {
    /// Exponent of the inverse curvature speed.
    pub n: f64,
    pub grid_size: usize,
    pub scheme: Scheme,
    pub cfl_factor: f64,
    pub t_end: f64,
    pub snapshot_interval: f64,
    pub closure_tol: f64,
    /// Relative to the mean of rho.
    pub positivity_floor: f64,
    pub project_closure: bool,
    pub renormalize_area: bool,
    pub deriv_method: DerivMethod,
    /// Overrides the CFL-derived step when set.
    pub fixed_dt: Option<f64>,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            n: 1.0,
            grid_size: 128,
            scheme: Scheme::ExplicitRk4,
            cfl_factor: 0.5,
            t_end: 10.0,
            snapshot_interval: 1.0,
            closure_tol: DEFAULT_CLOSURE_TOL,
            positivity_floor: DEFAULT_POSITIVITY_FLOOR,
            project_closure: false,
            renormalize_area: false,
            deriv_method: DerivMethod::Spectral,
            fixed_dt: None,
        }
    }
}

impl FlowParams {
    pub fn with_n(n: f64) -> Self {
        FlowParams {
            n,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(FlowError::config(key, msg))
            }
        };
        check(self.n.is_finite() && self.n > 0.0, "n", "must be finite and > 0")?;
        validate_grid(self.grid_size).map_err(|e| FlowError::config("grid_size", e.to_string()))?;
        check(
            self.cfl_factor > 0.0 && self.cfl_factor <= 1.0,
            "cfl_factor",
            "must lie in (0, 1]",
        )?;
        check(self.t_end.is_finite() && self.t_end >= 0.0, "t_end", "must be finite and >= 0")?;
        check(
            self.snapshot_interval.is_finite() && self.snapshot_interval > 0.0,
            "snapshot_interval",
            "must be finite and > 0",
        )?;
        check(self.closure_tol > 0.0, "closure_tol", "must be > 0")?;
        check(self.positivity_floor > 0.0, "positivity_floor", "must be > 0")?;
        if let Some(dt) = self.fixed_dt {
            check(dt.is_finite() && dt > 0.0, "fixed_dt", "must be finite and > 0")?;
        }
        Ok(())
    }
}

pub fn validate_grid(m: usize) -> Result<()> {
    if m < MIN_GRID {
        return Err(FlowError::invalid(format!("grid size {m} is below {MIN_GRID}")));
    }
    if !m.is_multiple_of(2) {
        return Err(FlowError::invalid(format!("grid size {m} must be even")));
    }
    Ok(())
}

/// Samples of the radius of curvature on the uniform tangent-angle grid,
/// together with the current time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveState {
    pub rho: Vec<f64>,
    pub t: f64,
}

impl CurveState {
    /// Wraps raw samples after checking grid size, finiteness and positivity.
    pub fn new(rho: Vec<f64>, t: f64) -> Result<Self> {
        validate_grid(rho.len())?;
        if !t.is_finite() {
            return Err(FlowError::invalid("time must be finite"));
        }
        if let Some(j) = rho.iter().position(|x| !x.is_finite()) {
            return Err(FlowError::invalid(format!("rho[{j}] is not finite")));
        }
        let state = CurveState { rho, t };
        state.check_positive(DEFAULT_POSITIVITY_FLOOR)?;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.rho.len() as f64
    }

    pub fn mean_rho(&self) -> f64 {
        self.rho.iter().sum::<f64>() / self.rho.len() as f64
    }

    pub fn rho_min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn rho_max(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fails with the first sample at or below `floor * mean(rho)`.
    pub fn check_positive(&self, floor: f64) -> Result<()> {
        let threshold = floor * self.mean_rho().abs();
        match self.rho.iter().position(|&r| r <= threshold) {
            Some(index) => Err(FlowError::ConvexityViolation {
                index,
                theta: self.theta(index),
                t: self.t,
                value: self.rho[index],
            }),
            None => Ok(()),
        }
    }

    pub fn check_closed(&self, tol: f64) -> Result<()> {
        let (cx, cy) = geometry::closure_residual(self);
        let residual = cx.hypot(cy);
        if residual > tol {
            return Err(FlowError::ClosureViolation {
                residual,
                tolerance: tol,
            });
        }
        Ok(())
    }

    /// Uniform scaling `rho -> s rho` scales the enclosed area by `s^2`.
    pub fn rescaled_to_area(&self, target_area: f64) -> Result<Self> {
        if !(target_area.is_finite() && target_area > 0.0) {
            return Err(FlowError::invalid("target area must be positive"));
        }
        let scale = (target_area / geometry::area(self)?).sqrt();
        Ok(CurveState {
            rho: self.rho.iter().map(|r| r * scale).collect(),
            t: self.t,
        })
    }

    /// Reads `{"theta_count": M, "rho": [...], "t": 0.0}` and validates it.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawState = serde_json::from_str(text)
            .map_err(|e| FlowError::invalid(format!("malformed state json: {e}")))?;
        if raw.theta_count != raw.rho.len() {
            return Err(FlowError::invalid(format!(
                "theta_count {} does not match {} rho samples",
                raw.theta_count,
                raw.rho.len()
            )));
        }
        let state = CurveState::new(raw.rho, raw.t)?;
        state.check_closed(DEFAULT_CLOSURE_TOL)?;
        Ok(state)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FlowError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawStateRef {
            theta_count: self.rho.len(),
            rho: &self.rho,
            t: self.t,
        };
        serde_json::to_string(&raw).expect("state serializes")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    theta_count: usize,
    rho: Vec<f64>,
    #[serde(default)]
    t: f64,
}

#[derive(Serialize)]
struct RawStateRef<'a> {
    theta_count: usize,
    rho: &'a [f64],
    t: f64,
}

/// One harmonic `a cos(k theta) + b sin(k theta)` with `k >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: usize,
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

impl FourierTerm {
    pub fn cos(k: usize, a: f64) -> Self {
        FourierTerm { k, a, b: 0.0 }
    }
}

pub fn make_circle(r: f64, m: usize) -> Result<CurveState> {
    if !(r.is_finite() && r > 0.0) {
        return Err(FlowError::invalid(format!("circle radius must be positive, got {r}")));
    }
    validate_grid(m)?;
    Ok(CurveState {
        rho: vec![r; m],
        t: 0.0,
    })
}

/// `rho(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta)`.
pub fn make_fourier(a0: f64, terms: &[FourierTerm], m: usize) -> Result<CurveState> {
    validate_grid(m)?;
    if !a0.is_finite() {
        return Err(FlowError::invalid("a0 must be finite"));
    }
    for term in terms {
        if term.k == 1 {
            let residual = PI * term.a.hypot(term.b);
            return Err(FlowError::ClosureViolation {
                residual,
                tolerance: 0.0,
            });
        }
        if term.k == 0 {
            return Err(FlowError::invalid("use a0 for the constant mode"));
        }
        if 2 * term.k >= m {
            return Err(FlowError::invalid(format!(
                "mode {} is not resolved on a grid of {m} points",
                term.k
            )));
        }
        if !(term.a.is_finite() && term.b.is_finite()) {
            return Err(FlowError::invalid("coefficients must be finite"));
        }
    }
    let rho: Vec<f64> = (0..m)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / m as f64;
            a0 + terms
                .iter()
                .map(|c| {
                    let kt = c.k as f64 * theta;
                    c.a * kt.cos() + c.b * kt.sin()
                })
                .sum::<f64>()
        })
        .collect();
    let state = CurveState { rho, t: 0.0 };
    state.check_positive(DEFAULT_POSITIVITY_FLOOR)?;
    Ok(state)
}

/// Ellipse with semi-axes `a` (along x) and `b`. Its support function is
/// `h = sqrt(a^2 cos^2 + b^2 sin^2)` and `rho = h + h'' = a^2 b^2 / h^3`.
pub fn make_ellipse(a: f64, b: f64, m: usize) -> Result<CurveState> {
    if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
        return Err(FlowError::invalid(format!("ellipse axes must be positive, got ({a}, {b})")));
    }
    validate_grid(m)?;
    let rho = (0..m)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let h = ellipse_support(a, b, theta);
            a * a * b * b / (h * h * h)
        })
        .collect();
    Ok(CurveState { rho, t: 0.0 })
}

pub fn ellipse_support(a: f64, b: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (a * a * c * c + b * b * s * s).sqrt()
}

/// Reference constants derived once from the initial curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricBounds {
    pub n: f64,
    pub area0: f64,
    /// Lower bound on the nonlocal term.
    pub m1: f64,
    /// Upper bound on the nonlocal term, its initial value.
    pub m2: f64,
    pub l_lower: f64,
    pub l_upper: f64,
    /// Guaranteed exponential decay rate of `L^2 - 4 pi A`.
    pub decay_rate: f64,
    pub limit_radius: f64,
    pub kappa_max0: f64,
}

impl GeometricBounds {
    pub fn from_initial(state: &CurveState, n: f64) -> Result<Self> {
        let area0 = geometry::area(state)?;
        let length0 = geometry::length(state);
        let lambda0 = geometry::lambda_nonlocal(state, n, area0)?;
        Ok(Self::from_scalars(n, area0, length0, lambda0, state.rho_min()))
    }

    pub fn from_scalars(n: f64, area0: f64, length0: f64, lambda0: f64, rho_min0: f64) -> Self {
        let m1 = (4.0 * PI * area0).powf((n + 1.0) / 2.0) / (2.0 * area0 * (2.0 * PI).powf(n));
        GeometricBounds {
            n,
            area0,
            m1,
            m2: lambda0,
            l_lower: (4.0 * PI * area0).sqrt(),
            l_upper: length0,
            decay_rate: 2.0 * (area0 / PI).powf((n - 1.0) / 2.0),
            limit_radius: (area0 / PI).sqrt(),
            kappa_max0: 1.0 / rho_min0,
        }
    }
}
