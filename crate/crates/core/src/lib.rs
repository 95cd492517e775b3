//! Simulation of the area-preserving inverse-curvature flow
//!
//! ```text
//! dX/dt = (p lambda(t) - kappa^{-n}) N,   lambda = (1/2A) int kappa^{-n} ds
//! ```
//!
//! for strictly convex closed plane curves, carried out on the radius of
//! curvature as a function of the tangent angle. The crate provides the
//! curve model and constructors, geometric functionals and oracles, the time
//! integrator, and a diagnostics layer that checks conservation,
//! monotonicity, explicit bounds, decay rates and the limiting circle.

pub mod cli_io;
pub mod curve_model;
pub mod diagnostics;
pub mod error;
pub mod flow_engine;
pub mod geometry;

pub use curve_model::{
    make_circle, make_ellipse, make_fourier, CurveState, DerivMethod, FlowParams, FourierTerm,
    GeometricBounds, Scheme,
};
pub use diagnostics::{summarize, DiagnosticsLog, GeometricSummary, VerdictReport};
pub use error::{FlowError, Result};
pub use flow_engine::{rhs_phi, rhs_rho, stable_dt, FlowEngine, NoopObserver, RunObserver, StepReport};
pub use geometry::EmbeddedCurve;
