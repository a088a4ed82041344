//! JSON run configuration.
//!
//! ```json
//! {
//!   "potential":    { "kind": "gaussian", "v0": -3.0, "width": 1.0 },
//!   "nonlinearity": { "kind": "saturating", "gamma": 1.0 },
//!   "geometry":     { "kind": "symmetric", "length": 5.0 },
//!   "integrator":   { "method": { "kind": "adaptive", "abs_tol": 1e-13, "rel_tol": 1e-13 } },
//!   "grid":         { "e_min": 0.1, "e_max": 10.0, "n_points": 200, "spacing": "linear" },
//!   "verify_convergence": true,
//!   "annotate_theorems": true,
//!   "output": "out.csv"
//! }
//! ```
//!
//! Unknown keys are rejected at every level.

use std::fs;
use std::path::{Path, PathBuf};

use nls_scatter::{
    ConfinementGeometryF64, GridSpacing, IntegratorConfigF64, Method, ModelError,
    NonlinearitySpecF64, OdeError, PotentialSpecF64, ScatterConfigF64, SweepSpecF64, K_MIN,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_e_min")]
    pub e_min: f64,
    #[serde(default = "default_e_max")]
    pub e_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default)]
    pub spacing: GridSpacing,
}

fn default_e_min() -> f64 {
    0.1
}

fn default_e_max() -> f64 {
    10.0
}

fn default_n_points() -> usize {
    200
}

fn default_true() -> bool {
    true
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            e_min: default_e_min(),
            e_max: default_e_max(),
            n_points: default_n_points(),
            spacing: GridSpacing::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpecF64,
    pub nonlinearity: NonlinearitySpecF64,
    pub geometry: ConfinementGeometryF64,
    #[serde(default)]
    pub integrator: IntegratorConfigF64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub verify_convergence: bool,
    #[serde(default = "default_true")]
    pub annotate_theorems: bool,
    /// CSV destination used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        key: key.into(),
        message: message.into(),
    }
}

fn model_error(section: &str, err: ModelError) -> CliError {
    match err {
        ModelError::InvalidParameter { key, reason } => invalid(format!("{section}.{key}"), reason),
        other => invalid(section, other.to_string()),
    }
}

impl RunConfig {
    /// Parses JSON text; errors carry the dotted key path and line/column.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                path: origin.to_path_buf(),
                line: inner.line(),
                column: inner.column(),
                key,
                message: inner.to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg = Self::from_json(&text, path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if !(g.e_min > 0.0) || !g.e_min.is_finite() {
            return Err(invalid(
                "grid.e_min",
                format!("must be > 0, got {}", g.e_min),
            ));
        }
        if g.e_min < K_MIN * K_MIN {
            return Err(invalid(
                "grid.e_min",
                format!(
                    "must be >= {} (k >= {K_MIN}), got {}",
                    K_MIN * K_MIN,
                    g.e_min
                ),
            ));
        }
        if !(g.e_max > g.e_min) || !g.e_max.is_finite() {
            return Err(invalid(
                "grid.e_max",
                format!("must exceed grid.e_min = {}, got {}", g.e_min, g.e_max),
            ));
        }
        if g.n_points < 2 {
            return Err(invalid(
                "grid.n_points",
                format!("must be >= 2, got {}", g.n_points),
            ));
        }
        self.potential
            .validate()
            .map_err(|e| model_error("potential", e))?;
        self.nonlinearity
            .validate()
            .map_err(|e| model_error("nonlinearity", e))?;
        self.geometry
            .validate()
            .map_err(|e| model_error("geometry", e))?;
        let (lo, hi) = self.geometry.interval();
        self.potential
            .covers(lo, hi)
            .map_err(|e| invalid("potential.samples", e.to_string()))?;
        self.integrator.validate().map_err(|e| match e {
            OdeError::InvalidConfig(msg) => invalid("integrator", msg),
            other => invalid("integrator", other.to_string()),
        })?;
        Ok(())
    }

    pub fn scatter_config(&self) -> ScatterConfigF64 {
        ScatterConfigF64::new(self.potential.clone(), self.nonlinearity, self.geometry)
            .with_integrator(self.integrator)
    }

    pub fn sweep_spec(&self) -> SweepSpecF64 {
        let mut spec = SweepSpecF64::new(self.scatter_config()).with_range(
            self.grid.e_min,
            self.grid.e_max,
            self.grid.n_points,
        );
        spec.grid = self.grid.spacing;
        spec.verify_convergence = self.verify_convergence;
        spec.annotate_theorems = self.annotate_theorems;
        spec
    }

    /// Same run with the nonlinearity switched off.
    pub fn linearized(mut self) -> Self {
        self.nonlinearity = self.nonlinearity.with_gamma(0.0);
        self
    }

    /// Replaces the adaptive tolerances (or the fixed step) with `tol`.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.integrator.method = match self.integrator.method {
            Method::FixedStep { .. } => Method::FixedStep { step: tol },
            Method::Adaptive { .. } => Method::Adaptive {
                abs_tol: tol,
                rel_tol: tol,
            },
        };
        self
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
