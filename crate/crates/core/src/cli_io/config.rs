use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve_model::{
    make_circle, make_ellipse, make_fourier, CurveState, DerivMethod, FlowParams, FourierTerm, Scheme,
};
use crate::error::{FlowError, Result};

use super::args::{FlowArgs, RunArgs};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "AREAFLOW_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "out";

/// Initial curve family, written as `circle:R`, `ellipse:A:B`,
/// `fourier:A0[:TERM...]` with terms `a@k` or `a,b@k`, or `import:PATH`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitialCurve {
    Circle { r: f64 },
    Fourier { a0: f64, terms: Vec<FourierTerm> },
    Ellipse { a: f64, b: f64 },
    Import { path: PathBuf },
}

fn num(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| FlowError::config(key, format!("`{s}` is not a number")))
}

impl FromStr for InitialCurve {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let parts: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(':').collect() };
        let key = "initial";
        match kind {
            "circle" => match parts.as_slice() {
                [r] => Ok(InitialCurve::Circle { r: num(key, r)? }),
                _ => Err(FlowError::config(key, "expected circle:R")),
            },
            "ellipse" => match parts.as_slice() {
                [a, b] => Ok(InitialCurve::Ellipse {
                    a: num(key, a)?,
                    b: num(key, b)?,
                }),
                _ => Err(FlowError::config(key, "expected ellipse:A:B")),
            },
            "fourier" => {
                let (a0, terms) = parts
                    .split_first()
                    .ok_or_else(|| FlowError::config(key, "expected fourier:A0[:a@k...]"))?;
                let terms = terms
                    .iter()
                    .map(|t| {
                        let (coef, k) = t
                            .split_once('@')
                            .ok_or_else(|| FlowError::config(key, format!("term `{t}` lacks `@k`")))?;
                        let k = k
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| FlowError::config(key, format!("bad mode in `{t}`")))?;
                        let (a, b) = match coef.split_once(',') {
                            Some((a, b)) => (num(key, a)?, num(key, b)?),
                            None => (num(key, coef)?, 0.0),
                        };
                        Ok(FourierTerm { k, a, b })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(InitialCurve::Fourier {
                    a0: num(key, a0)?,
                    terms,
                })
            }
            "import" if !rest.is_empty() => Ok(InitialCurve::Import {
                path: PathBuf::from(rest),
            }),
            _ => Err(FlowError::config(key, format!("unknown initial curve `{s}`"))),
        }
    }
}

impl fmt::Display for InitialCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCurve::Circle { r } => write!(f, "circle:{r}"),
            InitialCurve::Ellipse { a, b } => write!(f, "ellipse:{a}:{b}"),
            InitialCurve::Fourier { a0, terms } => {
                write!(f, "fourier:{a0}")?;
                for t in terms {
                    if t.b == 0.0 {
                        write!(f, ":{}@{}", t.a, t.k)?;
                    } else {
                        write!(f, ":{},{}@{}", t.a, t.b, t.k)?;
                    }
                }
                Ok(())
            }
            InitialCurve::Import { path } => write!(f, "import:{}", path.display()),
        }
    }
}

impl TryFrom<String> for InitialCurve {
    type Error = FlowError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<InitialCurve> for String {
    fn from(c: InitialCurve) -> String {
        c.to_string()
    }
}

impl InitialCurve {
    pub fn build(&self, m: usize) -> Result<CurveState> {
        match self {
            InitialCurve::Circle { r } => make_circle(*r, m),
            InitialCurve::Ellipse { a, b } => make_ellipse(*a, *b, m),
            InitialCurve::Fourier { a0, terms } => make_fourier(*a0, terms, m),
            InitialCurve::Import { path } => {
                let s = CurveState::load(path)?;
                if s.len() != m {
                    return Err(FlowError::invalid(format!(
                        "imported state has {} samples, grid_size is {m}",
                        s.len()
                    )));
                }
                Ok(s)
            }
        }
    }
}

/// Everything needed for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub params: FlowParams,
    pub initial: InitialCurve,
    /// Rescale the initial curve to this enclosed area.
    #[serde(default)]
    pub target_area: Option<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "yes")]
    pub emit_snapshots: bool,
}

fn yes() -> bool {
    true
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: FlowParams::default(),
            initial: InitialCurve::Circle { r: 1.0 },
            target_area: None,
            output_dir: default_output_dir(),
            emit_snapshots: true,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        // flatten + deny_unknown_fields is unsupported by serde, so unknown
        // keys are caught against the known key list first
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| FlowError::config("<file>", e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| FlowError::config("<file>", "expected a JSON object"))?;
        for key in obj.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(FlowError::config(key.as_str(), "unknown key"));
            }
        }
        let mut merged = serde_json::to_value(FlowParams::default()).expect("params serialize");
        for (k, v) in obj {
            merged[k] = v.clone();
        }
        if merged.get("initial").is_none() {
            merged["initial"] = serde_json::Value::String("circle:1".into());
        }
        if let Err(e) = serde_json::from_value::<RunConfig>(merged.clone()) {
            let defaults = serde_json::to_value(RunConfig::default()).expect("config serializes");
            for (k, v) in obj {
                let mut probe = defaults.clone();
                probe[k] = v.clone();
                if let Err(e) = serde_json::from_value::<RunConfig>(probe) {
                    return Err(FlowError::config(k.as_str(), e.to_string()));
                }
            }
            return Err(FlowError::config("config", e.to_string()));
        }
        Ok(serde_json::from_value(merged).expect("checked above"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FlowError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Some(a) = self.target_area {
            if !(a.is_finite() && a > 0.0) {
                return Err(FlowError::config("target_area", "must be finite and > 0"));
            }
        }
        self.initial_state()?;
        Ok(())
    }

    /// The initial curve on the configured grid, rescaled if requested.
    pub fn initial_state(&self) -> Result<CurveState> {
        let wrap = |e: FlowError| FlowError::config("initial", e.to_string());
        let state = self.initial.build(self.params.grid_size).map_err(wrap)?;
        match self.target_area {
            Some(a) => state.rescaled_to_area(a).map_err(wrap),
            None => Ok(state),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "n",
    "grid_size",
    "scheme",
    "cfl_factor",
    "t_end",
    "snapshot_interval",
    "closure_tol",
    "positivity_floor",
    "project_closure",
    "renormalize_area",
    "deriv_method",
    "fixed_dt",
    "initial",
    "target_area",
    "output_dir",
    "emit_snapshots",
];

pub(crate) fn apply_flow_args(params: &mut FlowParams, a: &FlowArgs) {
    if let Some(v) = a.n {
        params.n = v;
    }
    if let Some(v) = a.grid_size {
        params.grid_size = v;
    }
    if let Some(v) = a.scheme {
        params.scheme = match v {
            super::args::SchemeArg::Rk4 => Scheme::ExplicitRk4,
            super::args::SchemeArg::SemiImplicit => Scheme::StabilizedSemiImplicit,
        };
    }
    if let Some(v) = a.cfl {
        params.cfl_factor = v;
    }
    if let Some(v) = a.t_end {
        params.t_end = v;
    }
    if let Some(v) = a.snapshot_interval {
        params.snapshot_interval = v;
    }
    if let Some(v) = a.closure_tol {
        params.closure_tol = v;
    }
    if let Some(v) = a.positivity_floor {
        params.positivity_floor = v;
    }
    if a.project_closure {
        params.project_closure = true;
    }
    if a.renormalize_area {
        params.renormalize_area = true;
    }
    if let Some(v) = a.deriv {
        params.deriv_method = match v {
            super::args::DerivArg::Spectral => DerivMethod::Spectral,
            super::args::DerivArg::Fd2 => DerivMethod::CentralFd2,
        };
    }
    if let Some(v) = a.dt {
        params.fixed_dt = Some(v);
    }
}

/// Builds a run configuration: file values first, then flags on top.
pub fn parse_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    apply_flow_args(&mut cfg.params, &args.flow);
    if let Some(init) = &args.initial {
        cfg.initial = init.parse()?;
    }
    if let Some(a) = args.target_area {
        cfg.target_area = Some(a);
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    if args.no_snapshots {
        cfg.emit_snapshots = false;
    }
    cfg.validate()?;
    Ok(cfg)
}
