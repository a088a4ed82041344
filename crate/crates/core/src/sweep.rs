//! Energy sweeps over a grid of incident energies.
//!
//! Every grid point is independent, so points are evaluated with rayon's
//! work stealing and collected back in grid order. All arithmetic is
//! point-local, which makes serial and parallel tables bit-identical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scattering::{scatter_energy, ScatterConfig, ScatteringResult, K_MIN};
use crate::theorems::{theorem_report, TheoremReport};

/// Shift of every probability under refinement below which a point counts
/// as converged.
pub const CONVERGENCE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct SweepSpec<T> {
    pub config: ScatterConfig<T>,
    pub e_min: T,
    pub e_max: T,
    pub n_points: usize,
    pub grid: GridSpacing,
    pub verify_convergence: bool,
    pub annotate_theorems: bool,
}

impl<T: Real> SweepSpec<T> {
    /// Default grid: 200 linear points on `[0.1, 10]`.
    pub fn new(config: ScatterConfig<T>) -> Self {
        Self {
            config,
            e_min: T::lit(0.1),
            e_max: T::lit(10.0),
            n_points: 200,
            grid: GridSpacing::Linear,
            verify_convergence: false,
            annotate_theorems: false,
        }
    }

    pub fn with_range(mut self, e_min: T, e_max: T, n_points: usize) -> Self {
        self.e_min = e_min;
        self.e_max = e_max;
        self.n_points = n_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_min > T::zero()) || !self.e_min.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "e_min must be > 0, got {}",
                self.e_min
            )));
        }
        if !(self.e_max > self.e_min) || !self.e_max.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "e_max must exceed e_min, got e_min = {}, e_max = {}",
                self.e_min, self.e_max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidSweep(format!(
                "n_points must be >= 2, got {}",
                self.n_points
            )));
        }
        if self.e_min < T::lit(K_MIN * K_MIN) {
            return Err(Error::InvalidSweep(format!(
                "e_min must be >= k_min² = {}",
                K_MIN * K_MIN
            )));
        }
        self.config.validate()
    }
}

/// Grid energies; the first and last equal `e_min` and `e_max` exactly.
pub fn energy_grid<T: Real>(spec: &SweepSpec<T>) -> Vec<T> {
    let n = spec.n_points;
    let last = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| {
            if i == 0 {
                return spec.e_min;
            }
            if i == n - 1 {
                return spec.e_max;
            }
            let t = T::from_usize(i).unwrap() / last;
            match spec.grid {
                GridSpacing::Linear => spec.e_min + (spec.e_max - spec.e_min) * t,
                GridSpacing::Log => {
                    let (a, b) = (spec.e_min.ln(), spec.e_max.ln());
                    (a + (b - a) * t).exp()
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub energy: T,
    pub outcome: std::result::Result<ScatteringResult<T>, Error>,
    /// Largest change of `R_left, R_right, T_left, T_right` under refinement.
    pub refinement_shift: Option<T>,
    /// `None` when convergence was not checked.
    pub converged: Option<bool>,
}

impl<T: Real> SweepRow<T> {
    pub fn result(&self) -> Option<&ScatteringResult<T>> {
        self.outcome.as_ref().ok()
    }
}

/// Maxima over successful rows.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepSummary<T> {
    pub max_reflectivity_gap: T,
    pub max_transmissivity_gap: T,
    pub max_defect_left: T,
    pub max_defect_right: T,
    /// `max |W1 − W2|`; symmetric geometry only.
    pub max_wronskian_gap: Option<T>,
    /// `max |W − 1|` over all reported Wronskians.
    pub max_wronskian_drift: T,
    pub failed_points: usize,
    pub unconverged_points: usize,
}

impl<T: Real> SweepSummary<T> {
    pub fn max_defect(&self) -> T {
        self.max_defect_left.max(self.max_defect_right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<T> {
    pub rows: Vec<SweepRow<T>>,
    pub summary: SweepSummary<T>,
    pub report: Option<TheoremReport>,
}

impl<T: Real> SweepTable<T> {
    pub fn results(&self) -> impl Iterator<Item = &ScatteringResult<T>> {
        self.rows.iter().filter_map(|r| r.result())
    }
}

/// Maxima computed by a direct scan of `rows`.
pub fn summarize<T: Real>(rows: &[SweepRow<T>]) -> SweepSummary<T> {
    let mut s = SweepSummary::<T> {
        max_wronskian_gap: None,
        ..Default::default()
    };
    for row in rows {
        if row.converged == Some(false) {
            s.unconverged_points += 1;
        }
        let Some(r) = row.result() else {
            s.failed_points += 1;
            continue;
        };
        s.max_reflectivity_gap = s
            .max_reflectivity_gap
            .max((r.reflectivity_left - r.reflectivity_right).abs());
        s.max_transmissivity_gap = s
            .max_transmissivity_gap
            .max((r.transmissivity_left - r.transmissivity_right).abs());
        s.max_defect_left = s.max_defect_left.max((r.sum_left - T::one()).abs());
        s.max_defect_right = s.max_defect_right.max((r.sum_right - T::one()).abs());
        let w1 = r.endpoint.w1();
        s.max_wronskian_drift = s.max_wronskian_drift.max((w1 - T::one()).abs());
        if let Some(w2) = r.endpoint.w2() {
            s.max_wronskian_drift = s.max_wronskian_drift.max((w2 - T::one()).abs());
            let gap = (w1 - w2).abs();
            s.max_wronskian_gap = Some(s.max_wronskian_gap.map_or(gap, |g| g.max(gap)));
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

fn evaluate_point<T: Real>(
    spec: &SweepSpec<T>,
    refined: &ScatterConfig<T>,
    energy: T,
) -> SweepRow<T> {
    let outcome = scatter_energy(&spec.config, energy);
    let (refinement_shift, converged) = match (&outcome, spec.verify_convergence) {
        (Ok(base), true) => match scatter_energy(refined, energy) {
            Ok(fine) => {
                let shift = base
                    .probabilities()
                    .iter()
                    .zip(fine.probabilities())
                    .map(|(a, b)| (*a - b).abs())
                    .fold(T::zero(), T::max);
                (Some(shift), Some(shift < T::lit(CONVERGENCE_TOL)))
            }
            Err(_) => (None, Some(false)),
        },
        (Err(_), true) => (None, Some(false)),
        (_, false) => (None, None),
    };
    SweepRow {
        energy,
        outcome,
        refinement_shift,
        converged,
    }
}

/// Runs the sweep in parallel.
pub fn run_sweep<T: Real>(spec: &SweepSpec<T>) -> Result<SweepTable<T>> {
    run_sweep_with(spec, Execution::Parallel)
}

/// Runs the sweep with the chosen execution strategy.
///
/// Per-point failures are stored in their rows; the sweep itself fails only
/// when every point fails.
pub fn run_sweep_with<T: Real>(spec: &SweepSpec<T>, exec: Execution) -> Result<SweepTable<T>> {
    spec.validate()?;
    let grid = energy_grid(spec);
    let refined = spec
        .config
        .clone()
        .with_integrator(spec.config.integrator.refined());
    let rows: Vec<SweepRow<T>> = match exec {
        Execution::Serial => grid
            .iter()
            .map(|&e| evaluate_point(spec, &refined, e))
            .collect(),
        Execution::Parallel => grid
            .par_iter()
            .map(|&e| evaluate_point(spec, &refined, e))
            .collect(),
    };
    if let Some(first) = rows.iter().find_map(|r| r.outcome.as_ref().err()) {
        if rows.iter().all(|r| r.outcome.is_err()) {
            return Err(Error::AllPointsFailed(Box::new(first.clone())));
        }
    }
    let summary = summarize(&rows);
    let mut table = SweepTable {
        rows,
        summary,
        report: None,
    };
    if spec.annotate_theorems {
        table.report = Some(theorem_report(&table, &spec.config));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ConfinementGeometry, NonlinearitySpec, PotentialSpec};

    fn free_spec() -> SweepSpec<f64> {
        let cfg = ScatterConfig::new(
            PotentialSpec::gaussian(0.0),
            NonlinearitySpec::none(),
            ConfinementGeometry::Symmetric { length: 5.0 },
        );
        SweepSpec::new(cfg).with_range(0.5, 10.0, 50)
    }

    #[test]
    fn grid_endpoints_exact() {
        let mut spec = free_spec().with_range(0.1, 10.0, 7);
        for grid in [GridSpacing::Linear, GridSpacing::Log] {
            spec.grid = grid;
            let g = energy_grid(&spec);
            assert_eq!(g.len(), 7);
            assert_eq!(g[0], 0.1);
            assert_eq!(g[6], 10.0);
            assert!(g.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn free_space_sweep() {
        let table = run_sweep(&free_spec()).unwrap();
        assert_eq!(table.rows.len(), 50);
        for r in table.results() {
            assert!(r.reflectivity_left < 1e-8);
            assert!((r.transmissivity_left - 1.0).abs() < 1e-8);
        }
        let s = table.summary;
        assert!(s.max_reflectivity_gap < 1e-8);
        assert!(s.max_transmissivity_gap < 1e-8);
        assert!(s.max_defect() < 1e-8);
        assert!(s.max_wronskian_gap.unwrap() < 1e-8);
        assert_eq!(s.failed_points, 0);
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            free_spec().with_range(0.0, 1.0, 10),
            free_spec().with_range(2.0, 1.0, 10),
            free_spec().with_range(0.5, 1.0, 1),
            free_spec().with_range(1e-8, 1.0, 10),
        ] {
            assert!(matches!(run_sweep(&spec), Err(Error::InvalidSweep(_))));
        }
    }

    #[test]
    fn all_failures_fail_the_sweep() {
        let mut spec = free_spec().with_range(0.5, 1.0, 4);
        spec.config.integrator = spec.config.integrator.with_max_steps(2);
        assert!(matches!(run_sweep(&spec), Err(Error::AllPointsFailed(_))));
    }
}
