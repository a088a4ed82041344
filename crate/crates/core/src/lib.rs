//! Reflection and transmission of plane waves by real, spatially confined
//! potentials carrying a confined nonlinearity, in the stationary 1D
//! nonlinear Schrödinger equation
//!
//! ```text
//! ψ'' + [k² − V(x) + γ f(|ψ|)] ψ = 0   inside the confinement interval
//! ψ'' + k² ψ = 0                       outside
//! ```
//!
//! in units `ħ = 1`, `2m = 1`, `k = √E`. (Some sources write the unit choice
//! as `2m = 1 = ħ²`; with `ħ = 1` the two are the same.)
//!
//! Two confinements are supported: `[−L, L]` with the basis launched from the
//! centre, and `[0, L]` with the basis launched from the left edge. For the
//! first, a symmetric `V` keeps `R` and `T` reciprocal and `R + T = 1`, while
//! an asymmetric `V` keeps only `R` reciprocal. For the second, `R + T ≠ 1`
//! even when `V` is symmetric about `L/2`. The [`theorems`] module classifies
//! sweeps against these regimes.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below name the double precision instantiations used by the CLI.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod models;
pub mod ode;
pub mod scalar;
pub mod scattering;
pub mod sweep;
pub mod theorems;

pub use error::{Error, Result};
pub use models::{
    eval_nonlinearity, eval_potential, is_symmetric, ConfinementGeometry, ModelError,
    NonlinearityKind, NonlinearitySpec, PotentialSpec,
};
pub use ode::{
    integrate, integrate_sampled, IntegratorConfig, Method, OdeError, OdeProblem, Trajectory,
};
pub use scalar::Real;
pub use scattering::{
    amplitudes_half_interval, amplitudes_symmetric_closed_form, amplitudes_two_sided,
    integrate_basis, integrate_basis_sampled, right_incidence_shared_basis, scatter,
    scatter_energy, unitarity_defect, wronskian, wronskian_source_integral, BasisEndpointData,
    BasisSample, Endpoint, ScatterConfig, ScatteringResult, K_MIN,
};
pub use sweep::{
    energy_grid, run_sweep, run_sweep_with, summarize, Execution, GridSpacing, SweepRow, SweepSpec,
    SweepSummary, SweepTable,
};
pub use theorems::{theorem_report, Observation, Property, PropertyCheck, Regime, TheoremReport};

pub type PotentialSpecF64 = PotentialSpec<f64>;
pub type NonlinearitySpecF64 = NonlinearitySpec<f64>;
pub type ConfinementGeometryF64 = ConfinementGeometry<f64>;
pub type IntegratorConfigF64 = IntegratorConfig<f64>;
pub type ScatterConfigF64 = ScatterConfig<f64>;
pub type BasisEndpointDataF64 = BasisEndpointData<f64>;
pub type ScatteringResultF64 = ScatteringResult<f64>;
pub type SweepSpecF64 = SweepSpec<f64>;
pub type SweepTableF64 = SweepTable<f64>;

pub type ScatterConfigF32 = ScatterConfig<f32>;
pub type ScatteringResultF32 = ScatteringResult<f32>;
