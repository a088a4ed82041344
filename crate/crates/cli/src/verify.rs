//! Self-check battery behind `nls-scatter verify`.

use std::fmt;

use nls_scatter::sweep::CONVERGENCE_TOL;
use nls_scatter::theorems::{HOLDS_BELOW, VIOLATED_ABOVE};
use nls_scatter::{
    amplitudes_symmetric_closed_form, integrate_basis_sampled, right_incidence_shared_basis,
    run_sweep, scatter_energy, unitarity_defect, wronskian_source_integral, ConfinementGeometry,
    NonlinearitySpec, PotentialSpec, Property, ScatterConfigF64, SweepSpecF64, SweepTableF64,
};

use crate::config::RunConfig;
use crate::fixtures::{figure_config, FIGURES};
use crate::table::fmt_sig;

/// Environment variable overriding the integrator tolerance of every run in
/// the battery. Meant for perturbation experiments only.
pub const TOL_ENV: &str = "NLS_SEED_TOL";

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Force `γ = 0` everywhere.
    pub linear: bool,
    /// Replacement integrator tolerance.
    pub tolerance: Option<f64>,
}

impl VerifyOptions {
    pub fn from_env(linear: bool) -> Result<Self, String> {
        let tolerance = match std::env::var(TOL_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|t| *t > 0.0 && *t < 1.0)
                    .ok_or_else(|| format!("{TOL_ENV} must be a number in (0, 1), got {s:?}"))?,
            ),
            Err(_) => None,
        };
        Ok(Self { linear, tolerance })
    }

    fn run(&self, cfg: RunConfig) -> RunConfig {
        let cfg = if self.linear { cfg.linearized() } else { cfg };
        match self.tolerance {
            Some(t) => cfg.with_tolerance(t),
            None => cfg,
        }
    }

    fn scatter(&self, cfg: ScatterConfigF64) -> ScatterConfigF64 {
        let mut cfg = cfg;
        if self.linear {
            cfg.nonlinearity = cfg.nonlinearity.with_gamma(0.0);
        }
        if let Some(t) = self.tolerance {
            cfg.integrator = cfg.integrator.with_tolerance(t);
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Measured quantity; `NaN` when the computation failed.
    pub measured: f64,
    pub threshold: f64,
    /// `true`: pass iff `measured < threshold`; `false`: pass iff above.
    pub below: bool,
    pub detail: String,
}

impl CheckResult {
    fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            below: true,
            detail: String::new(),
        }
    }

    fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            below: false,
            ..Self::below(name, measured, threshold)
        }
    }

    fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            detail: detail.into(),
            ..Self::below(name, f64::NAN, 0.0)
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        if self.below {
            self.measured < self.threshold
        } else {
            self.measured > self.threshold
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4}  {:<44} {:>20} {} {:<8}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            fmt_sig(self.measured),
            if self.below { "<" } else { ">" },
            fmt_sig(self.threshold),
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

fn sweep(spec: &SweepSpecF64) -> Result<SweepTableF64, String> {
    run_sweep(spec).map_err(|e| e.to_string())
}

fn free_space(opts: &VerifyOptions) -> CheckResult {
    let name = "free space: |r|, |t - 1|";
    let mut worst = 0.0f64;
    for geometry in [
        ConfinementGeometry::Symmetric { length: 5.0 },
        ConfinementGeometry::HalfInterval { length: 5.0 },
    ] {
        let cfg = opts.scatter(ScatterConfigF64::new(
            PotentialSpec::gaussian(0.0),
            NonlinearitySpec::none(),
            geometry,
        ));
        let spec = SweepSpecF64::new(cfg).with_range(0.1, 10.0, 40);
        match sweep(&spec) {
            Ok(t) => {
                for r in t.results() {
                    for amp in [r.r_left, r.r_right] {
                        worst = worst.max(amp.norm());
                    }
                    for amp in [r.t_left, r.t_right] {
                        worst = worst.max((amp - 1.0).norm());
                    }
                }
                if t.summary.failed_points > 0 {
                    return CheckResult::failed(name, "failed points");
                }
            }
            Err(e) => return CheckResult::failed(name, e),
        }
    }
    CheckResult::below(name, worst, 1e-8)
}

/// `T` of a rectangular barrier (`E < V0`) or well/step above it (`E > V0`)
/// of height `v0` and width `w`.
pub fn rectangular_transmission(v0: f64, w: f64, e: f64) -> f64 {
    if e < v0 {
        let kappa = (v0 - e).sqrt();
        1.0 / (1.0 + v0 * v0 * (kappa * w).sinh().powi(2) / (4.0 * e * (v0 - e)))
    } else if e > v0 {
        let q = (e - v0).sqrt();
        1.0 / (1.0 + v0 * v0 * (q * w).sin().powi(2) / (4.0 * e * (e - v0)))
    } else {
        1.0 / (1.0 + v0 * w * w / 4.0)
    }
}

fn rectangular_barrier(opts: &VerifyOptions) -> CheckResult {
    let name = "rectangular barrier vs analytic T";
    let cfg = opts.scatter(ScatterConfigF64::new(
        PotentialSpec::Rectangular {
            v0: 2.0,
            a: -1.0,
            b: 1.0,
        },
        NonlinearitySpec::none(),
        ConfinementGeometry::Symmetric { length: 1.5 },
    ));
    let mut worst = 0.0f64;
    for e in [0.5, 1.0, 1.5, 3.0] {
        match scatter_energy(&cfg, e) {
            Ok(r) => {
                let want = rectangular_transmission(2.0, 2.0, e);
                worst = worst
                    .max((r.transmissivity_left - want).abs())
                    .max((r.transmissivity_right - want).abs());
            }
            Err(err) => return CheckResult::failed(name, err.to_string()),
        }
    }
    CheckResult::below(name, worst, 1e-6)
}

fn linear_wronskian(opts: &VerifyOptions) -> CheckResult {
    let name = "linear interior: |W - 1|";
    let mut worst = 0.0f64;
    for n in [1, 2, 4, 5] {
        let cfg = opts.run(figure_config(n).expect("fixture").linearized());
        let mut spec = cfg.sweep_spec().with_range(0.1, 10.0, 50);
        spec.verify_convergence = false;
        match sweep(&spec) {
            Ok(t) => worst = worst.max(t.summary.max_wronskian_drift),
            Err(e) => return CheckResult::failed(name, e),
        }
    }
    CheckResult::below(name, worst, 1e-8)
}

fn closed_form_cross_check(fig1: &SweepTableF64) -> CheckResult {
    let mut worst = 0.0f64;
    for r in fig1.results() {
        match amplitudes_symmetric_closed_form(&r.endpoint, r.k) {
            Ok((rr, tt)) => {
                worst = worst
                    .max((rr - r.reflectivity_left).abs())
                    .max((tt - r.transmissivity_left).abs())
            }
            Err(e) => {
                return CheckResult::failed("symmetric closed form vs general", e.to_string())
            }
        }
    }
    CheckResult::below("symmetric closed form vs general (fig 1)", worst, 1e-9)
}

fn defect_identity(fig4: &SweepTableF64) -> CheckResult {
    let mut worst = 0.0f64;
    for r in fig4.results() {
        match unitarity_defect(&r.endpoint, r.k) {
            Ok(d) => worst = worst.max((d - (r.sum_left - 1.0)).abs()),
            Err(e) => return CheckResult::failed("unitarity defect identity", e.to_string()),
        }
    }
    CheckResult::below("unitarity defect identity (fig 4)", worst, 1e-10)
}

fn wronskian_quadrature(opts: &VerifyOptions) -> CheckResult {
    let name = "W(L) - W(0) vs source integral (fig 4, E=1)";
    let cfg = opts
        .run(figure_config(4).expect("fixture"))
        .scatter_config();
    match integrate_basis_sampled(&cfg, 1.0, 20001) {
        Ok(ep) => {
            let q =
                wronskian_source_integral(ep.samples.as_deref().unwrap_or(&[]), &cfg.nonlinearity);
            let drift = ep.w1() - 1.0;
            CheckResult::below(name, (drift - q).abs(), 1e-7).with_detail(format!(
                "W(L) - 1 = {}, integral = {}",
                fmt_sig(drift),
                fmt_sig(q)
            ))
        }
        Err(e) => CheckResult::failed(name, e.to_string()),
    }
}

fn mirrored_cross_check(opts: &VerifyOptions) -> CheckResult {
    let name = "mirrored vs shared-basis right incidence";
    let cfg = opts
        .run(figure_config(5).expect("fixture").linearized())
        .scatter_config();
    let mut worst = 0.0f64;
    for i in 0..40 {
        let e = 0.1 + 9.9 * i as f64 / 39.0;
        match scatter_energy(&cfg, e) {
            Ok(r) => match right_incidence_shared_basis(&r.endpoint, r.k) {
                Ok((rr, tt)) => {
                    worst = worst
                        .max((rr.norm_sqr() - r.reflectivity_right).abs())
                        .max((tt.norm_sqr() - r.transmissivity_right).abs());
                }
                Err(err) => return CheckResult::failed(name, err.to_string()),
            },
            Err(err) => return CheckResult::failed(name, err.to_string()),
        }
    }
    CheckResult::below(name, worst, 1e-8).with_detail("linear fig 5 profile")
}

fn fixture_checks(n: u8, table: &SweepTableF64, out: &mut Vec<CheckResult>) {
    let s = &table.summary;
    let shift = table
        .rows
        .iter()
        .filter_map(|r| r.refinement_shift)
        .fold(0.0f64, f64::max);
    let conv = if s.unconverged_points > 0 || s.failed_points > 0 {
        CheckResult::below(
            format!("figure {n}: refinement shift"),
            shift.max(CONVERGENCE_TOL),
            CONVERGENCE_TOL,
        )
        .with_detail(format!(
            "{} unconverged, {} failed",
            s.unconverged_points, s.failed_points
        ))
    } else {
        CheckResult::below(
            format!("figure {n}: refinement shift"),
            shift,
            CONVERGENCE_TOL,
        )
    };
    out.push(conv);
    let report = table.report.as_ref().expect("fixtures annotate theorems");
    for p in [
        Property::ReflectivityReciprocity,
        Property::TransmissivityReciprocity,
        Property::Unitarity,
    ] {
        let c = report.check(p);
        let name = format!("figure {n}: {p}");
        let res = if c.expected_to_hold {
            CheckResult::below(name, c.measured_max, HOLDS_BELOW)
        } else {
            CheckResult::above(name, c.measured_max, VIOLATED_ABOVE)
        };
        out.push(res.with_detail(format!(
            "regime {}, {}",
            report.regime.number(),
            c.verdict()
        )));
    }
}

/// Runs every check. The five fixtures are swept once and shared between
/// the checks that need them.
pub fn run_verify(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut out = vec![
        free_space(opts),
        rectangular_barrier(opts),
        linear_wronskian(opts),
    ];
    let tables: Vec<(u8, Result<SweepTableF64, String>)> = FIGURES
        .map(|n| {
            let cfg = opts.run(figure_config(n).expect("fixture"));
            (n, sweep(&cfg.sweep_spec()))
        })
        .collect();
    let table = |n: u8| tables[n as usize - 1].1.as_ref();
    out.push(match table(1) {
        Ok(t) => closed_form_cross_check(t),
        Err(e) => CheckResult::failed("symmetric closed form vs general (fig 1)", e.clone()),
    });
    out.push(match table(4) {
        Ok(t) => defect_identity(t),
        Err(e) => CheckResult::failed("unitarity defect identity (fig 4)", e.clone()),
    });
    out.push(wronskian_quadrature(opts));
    out.push(mirrored_cross_check(opts));
    for (n, t) in &tables {
        match t {
            Ok(t) => fixture_checks(*n, t, &mut out),
            Err(e) => out.push(CheckResult::failed(format!("figure {n}"), e.clone())),
        }
    }
    out
}
