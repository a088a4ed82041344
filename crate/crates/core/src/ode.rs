//! Deterministic integration of real second-order ODEs `y'' = a(x, y, y')`.
//!
//! Two drivers are provided:
//!
//! * [`Method::FixedStep`]: classical 4th-order Runge–Kutta on a uniform grid
//!   anchored at `x_start`; the last step is shortened to land on `x_end`.
//! * [`Method::Adaptive`]: the Dormand–Prince 5(4) embedded pair with a
//!   per-component error test `|err_i| <= abs_tol + rel_tol * |y_i|`.
//!
//! Integration may run in either direction. Both drivers land exactly on any
//! caller-requested sample positions, so dense samples are exact solver states
//! rather than interpolants. Identical inputs always give identical bits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Failure modes of the integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("step limit of {max_steps} reached at x = {x}")]
    StepLimitExceeded { max_steps: usize, x: f64 },
    #[error("state became non-finite at x = {x}")]
    NonFiniteState { x: f64 },
    #[error("step size underflow at x = {x}")]
    StepSizeUnderflow { x: f64 },
    #[error("sample position {x} lies outside the integration span or out of order")]
    SampleOutOfSpan { x: f64 },
}

/// Right-hand side `y'' = a(x, y, y')`.
pub trait SecondOrderRhs<T> {
    fn accel(&self, x: T, y: T, dy: T) -> T;
}

impl<T, F> SecondOrderRhs<T> for F
where
    F: Fn(T, T, T) -> T,
{
    #[inline]
    fn accel(&self, x: T, y: T, dy: T) -> T {
        self(x, y, dy)
    }
}

/// Initial value problem on `[x_start, x_end]` (or the reversed interval).
#[derive(Debug, Clone)]
pub struct OdeProblem<T, F> {
    pub rhs: F,
    pub x_start: T,
    pub x_end: T,
    pub y0: T,
    pub dy0: T,
}

impl<T: Real, F: SecondOrderRhs<T>> OdeProblem<T, F> {
    pub fn new(rhs: F, x_start: T, x_end: T, y0: T, dy0: T) -> Self {
        Self {
            rhs,
            x_start,
            x_end,
            y0,
            dy0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method<T> {
    FixedStep { step: T },
    Adaptive { abs_tol: T, rel_tol: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig<T> {
    pub method: Method<T>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    IntegratorConfig::<f64>::DEFAULT_MAX_STEPS
}

impl<T: Real> Default for IntegratorConfig<T> {
    /// Adaptive with `abs_tol = rel_tol = 1e-13` in `f64` (256 ulp in `f32`).
    ///
    /// Near-singular matching denominators amplify endpoint errors by the
    /// size of `R + T`, which reaches ~10³ on Kerr barriers; `1e-10` leaves
    /// absolute errors of ~10⁻⁵ in `R` and `T` there.
    fn default() -> Self {
        let tol = T::lit(1e-13).max(T::epsilon() * T::lit(256.0));
        Self::adaptive(tol, tol)
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub const DEFAULT_MAX_STEPS: usize = 2_000_000;

    pub fn adaptive(abs_tol: T, rel_tol: T) -> Self {
        Self {
            method: Method::Adaptive { abs_tol, rel_tol },
            max_steps: Self::DEFAULT_MAX_STEPS,
        }
    }

    pub fn fixed(step: T) -> Self {
        Self {
            method: Method::FixedStep { step },
            max_steps: Self::DEFAULT_MAX_STEPS,
        }
    }

    /// Fixed-step configuration used for reproducibility fixtures (`h = 1e-3`).
    pub fn fixed_default() -> Self {
        Self::fixed(T::lit(1e-3))
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Same configuration with the tolerance scaled to `tol` (adaptive only).
    pub fn with_tolerance(mut self, tol: T) -> Self {
        if let Method::Adaptive { abs_tol, rel_tol } = &mut self.method {
            *abs_tol = tol;
            *rel_tol = tol;
        }
        self
    }

    /// Configuration one refinement level finer: half the step for the fixed
    /// driver, tolerances divided by 2^5 for the adaptive one (the local error
    /// of a 5th-order step shrinks by that factor when the step is halved).
    pub fn refined(&self) -> Self {
        let method = match self.method {
            Method::FixedStep { step } => Method::FixedStep {
                step: step / T::lit(2.0),
            },
            Method::Adaptive { abs_tol, rel_tol } => Method::Adaptive {
                abs_tol: abs_tol / T::lit(32.0),
                rel_tol: rel_tol / T::lit(32.0),
            },
        };
        Self {
            method,
            max_steps: self.max_steps.saturating_mul(4),
        }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if self.max_steps == 0 {
            return Err(OdeError::InvalidConfig("max_steps must be >= 1".into()));
        }
        match self.method {
            Method::FixedStep { step } => {
                if !(step > T::zero()) || !step.is_finite() {
                    return Err(OdeError::InvalidConfig(format!(
                        "step must be positive and finite, got {step}"
                    )));
                }
            }
            Method::Adaptive { abs_tol, rel_tol } => {
                for (name, tol) in [("abs_tol", abs_tol), ("rel_tol", rel_tol)] {
                    if !(tol > T::zero() && tol < T::one()) {
                        return Err(OdeError::InvalidConfig(format!(
                            "{name} must lie in (0, 1), got {tol}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Solver state at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub x: T,
    pub value: T,
    pub slope: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub final_value: T,
    pub final_slope: T,
    /// Step attempts, including rejected adaptive steps.
    pub steps_taken: usize,
    /// States at the requested sample positions, in request order.
    pub samples: Vec<Sample<T>>,
}

/// Integrates `problem` from `x_start` to `x_end`.
pub fn integrate<T, F>(
    problem: &OdeProblem<T, F>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>, OdeError>
where
    T: Real,
    F: SecondOrderRhs<T>,
{
    integrate_sampled(problem, cfg, &[])
}

/// Integrates `problem` and records the state at each position of `sample_at`.
///
/// Sample positions must lie inside the integration span and be ordered in the
/// direction of integration; the drivers step onto them exactly.
pub fn integrate_sampled<T, F>(
    problem: &OdeProblem<T, F>,
    cfg: &IntegratorConfig<T>,
    sample_at: &[T],
) -> Result<Trajectory<T>, OdeError>
where
    T: Real,
    F: SecondOrderRhs<T>,
{
    cfg.validate()?;
    check_samples(problem.x_start, problem.x_end, sample_at)?;
    if !problem.y0.is_finite() || !problem.dy0.is_finite() {
        return Err(OdeError::NonFiniteState {
            x: problem.x_start.as_f64(),
        });
    }
    if problem.x_start == problem.x_end {
        let s = Sample {
            x: problem.x_start,
            value: problem.y0,
            slope: problem.dy0,
        };
        return Ok(Trajectory {
            final_value: problem.y0,
            final_slope: problem.dy0,
            steps_taken: 0,
            samples: sample_at.iter().map(|_| s).collect(),
        });
    }
    match cfg.method {
        Method::FixedStep { step } => rk4_fixed(problem, step, cfg.max_steps, sample_at),
        Method::Adaptive { abs_tol, rel_tol } => {
            dopri5(problem, abs_tol, rel_tol, cfg.max_steps, sample_at)
        }
    }
}

fn check_samples<T: Real>(x_start: T, x_end: T, sample_at: &[T]) -> Result<(), OdeError> {
    let dir = if x_end >= x_start {
        T::one()
    } else {
        -T::one()
    };
    let mut prev = x_start;
    for &s in sample_at {
        let inside = (s - x_start) * dir >= T::zero() && (x_end - s) * dir >= T::zero();
        if !s.is_finite() || !inside || (s - prev) * dir < T::zero() {
            return Err(OdeError::SampleOutOfSpan { x: s.as_f64() });
        }
        prev = s;
    }
    Ok(())
}

type State<T> = [T; 2];

#[inline]
fn deriv<T: Real, F: SecondOrderRhs<T>>(rhs: &F, x: T, s: &State<T>) -> State<T> {
    [s[1], rhs.accel(x, s[0], s[1])]
}

#[inline]
fn axpy<T: Real>(s: &State<T>, h: T, terms: &[(T, &State<T>)]) -> State<T> {
    let mut out = *s;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + *c * k[i];
        }
        *o = *o + h * acc;
    }
    out
}

#[inline]
fn finite<T: Real>(s: &State<T>) -> bool {
    s[0].is_finite() && s[1].is_finite()
}

/// Collects states at the samples that coincide with position `x`.
fn record<T: Real>(
    x: T,
    s: &State<T>,
    sample_at: &[T],
    next: &mut usize,
    out: &mut Vec<Sample<T>>,
) {
    while *next < sample_at.len() && sample_at[*next] == x {
        out.push(Sample {
            x,
            value: s[0],
            slope: s[1],
        });
        *next += 1;
    }
}

fn rk4_step<T: Real, F: SecondOrderRhs<T>>(rhs: &F, x: T, s: &State<T>, h: T) -> State<T> {
    let half = T::lit(0.5);
    let k1 = deriv(rhs, x, s);
    let k2 = deriv(rhs, x + half * h, &axpy(s, half * h, &[(T::one(), &k1)]));
    let k3 = deriv(rhs, x + half * h, &axpy(s, half * h, &[(T::one(), &k2)]));
    let k4 = deriv(rhs, x + h, &axpy(s, h, &[(T::one(), &k3)]));
    let sixth = T::one() / T::lit(6.0);
    let third = T::one() / T::lit(3.0);
    axpy(
        s,
        h,
        &[(sixth, &k1), (third, &k2), (third, &k3), (sixth, &k4)],
    )
}

fn rk4_fixed<T, F>(
    problem: &OdeProblem<T, F>,
    step: T,
    max_steps: usize,
    sample_at: &[T],
) -> Result<Trajectory<T>, OdeError>
where
    T: Real,
    F: SecondOrderRhs<T>,
{
    let span = problem.x_end - problem.x_start;
    let dir = span.signum();
    let ratio = span.abs() / step;
    // A ratio within rounding of an integer must not produce a sliver step.
    let nearest = ratio.round();
    let n_uniform = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) {
        nearest
    } else {
        ratio.ceil()
    }
    .to_usize()
    .unwrap_or(usize::MAX)
    .max(1);

    // Breakpoints: uniform grid plus requested samples, ordered along `dir`.
    let mut breaks: Vec<T> = Vec::with_capacity(n_uniform + sample_at.len() + 1);
    let mut si = 0;
    for i in 1..=n_uniform {
        let xi = if i == n_uniform {
            problem.x_end
        } else {
            problem.x_start + dir * step * T::from_usize(i).unwrap()
        };
        while si < sample_at.len() && (xi - sample_at[si]) * dir > T::zero() {
            breaks.push(sample_at[si]);
            si += 1;
        }
        breaks.push(xi);
    }
    breaks.dedup();
    let steps = breaks.len();
    if steps > max_steps {
        return Err(OdeError::StepLimitExceeded {
            max_steps,
            x: problem.x_start.as_f64(),
        });
    }

    let mut samples = Vec::with_capacity(sample_at.len());
    let mut next = 0;
    let mut x = problem.x_start;
    let mut s = [problem.y0, problem.dy0];
    record(x, &s, sample_at, &mut next, &mut samples);
    let mut taken = 0;
    for &xb in &breaks {
        if xb == x {
            continue;
        }
        s = rk4_step(&problem.rhs, x, &s, xb - x);
        taken += 1;
        x = xb;
        if !finite(&s) {
            return Err(OdeError::NonFiniteState { x: x.as_f64() });
        }
        record(x, &s, sample_at, &mut next, &mut samples);
    }
    Ok(Trajectory {
        final_value: s[0],
        final_slope: s[1],
        steps_taken: taken,
        samples,
    })
}

/// Dormand–Prince 5(4) coefficients converted once per call.
struct Tableau<T> {
    c: [T; 6],
    a: [[T; 6]; 6],
    b: [T; 6],
    e: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let l = T::lit;
        let z = T::zero();
        Self {
            c: [l(0.2), l(0.3), l(0.8), l(8.0 / 9.0), l(1.0), l(1.0)],
            a: [
                [l(0.2), z, z, z, z, z],
                [l(3.0 / 40.0), l(9.0 / 40.0), z, z, z, z],
                [l(44.0 / 45.0), l(-56.0 / 15.0), l(32.0 / 9.0), z, z, z],
                [
                    l(19372.0 / 6561.0),
                    l(-25360.0 / 2187.0),
                    l(64448.0 / 6561.0),
                    l(-212.0 / 729.0),
                    z,
                    z,
                ],
                [
                    l(9017.0 / 3168.0),
                    l(-355.0 / 33.0),
                    l(46732.0 / 5247.0),
                    l(49.0 / 176.0),
                    l(-5103.0 / 18656.0),
                    z,
                ],
                [z; 6],
            ],
            b: [
                l(35.0 / 384.0),
                z,
                l(500.0 / 1113.0),
                l(125.0 / 192.0),
                l(-2187.0 / 6784.0),
                l(11.0 / 84.0),
            ],
            e: [
                l(71.0 / 57600.0),
                z,
                l(-71.0 / 16695.0),
                l(71.0 / 1920.0),
                l(-17253.0 / 339200.0),
                l(22.0 / 525.0),
                l(-1.0 / 40.0),
            ],
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn initial_step<T, F>(
    rhs: &F,
    x0: T,
    s0: &State<T>,
    f0: &State<T>,
    dir: T,
    span: T,
    atol: T,
    rtol: T,
) -> T
where
    T: Real,
    F: SecondOrderRhs<T>,
{
    // Hairer–Nørsett–Wanner starting step heuristic, order 5.
    let sc = |y: T| atol + rtol * y.abs();
    let norm = |v: &State<T>, s: &State<T>| {
        let a = v[0] / sc(s[0]);
        let b = v[1] / sc(s[1]);
        ((a * a + b * b) / T::lit(2.0)).sqrt()
    };
    let d0 = norm(s0, s0);
    let d1 = norm(f0, s0);
    let tiny = T::lit(1e-5);
    let mut h0 = if d0 < tiny || d1 < tiny {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h0 = h0.min(span);
    let s1 = axpy(s0, dir * h0, &[(T::one(), f0)]);
    let f1 = deriv(rhs, x0 + dir * h0, &s1);
    let df = [f1[0] - f0[0], f1[1] - f0[1]];
    let d2 = norm(&df, s0) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= T::lit(1e-15) {
        (T::lit(1e-6)).max(h0 * T::lit(1e-3))
    } else {
        (T::lit(0.01) / dmax).powf(T::lit(0.2))
    };
    (T::lit(100.0) * h0).min(h1).min(span)
}

fn dopri5<T, F>(
    problem: &OdeProblem<T, F>,
    atol: T,
    rtol: T,
    max_steps: usize,
    sample_at: &[T],
) -> Result<Trajectory<T>, OdeError>
where
    T: Real,
    F: SecondOrderRhs<T>,
{
    let tab = Tableau::<T>::new();
    let rhs = &problem.rhs;
    let x_end = problem.x_end;
    let span = (x_end - problem.x_start).abs();
    let dir = (x_end - problem.x_start).signum();

    let safety = T::lit(0.9);
    let fac_min = T::lit(0.2);
    let fac_max = T::lit(10.0);
    let expo = T::lit(0.2);

    let mut x = problem.x_start;
    let mut s = [problem.y0, problem.dy0];
    let mut k1 = deriv(rhs, x, &s);
    if !finite(&k1) {
        return Err(OdeError::NonFiniteState { x: x.as_f64() });
    }
    let mut h = initial_step(rhs, x, &s, &k1, dir, span, atol, rtol);

    let mut samples = Vec::with_capacity(sample_at.len());
    let mut next = 0;
    record(x, &s, sample_at, &mut next, &mut samples);

    let mut attempts = 0usize;
    let mut last_rejected = false;
    loop {
        if x == x_end {
            break;
        }
        let target = if next < sample_at.len() {
            sample_at[next]
        } else {
            x_end
        };
        let remaining = (target - x).abs();
        let (h_try, lands) = if h >= remaining {
            (remaining, true)
        } else {
            (h, false)
        };
        if h_try <= T::epsilon() * T::lit(16.0) * x.abs().max(T::one()) && !lands {
            return Err(OdeError::StepSizeUnderflow { x: x.as_f64() });
        }
        if attempts >= max_steps {
            return Err(OdeError::StepLimitExceeded {
                max_steps,
                x: x.as_f64(),
            });
        }
        attempts += 1;

        let hs = dir * h_try;
        let mut k = [k1; 7];
        for stage in 1..6 {
            let mut ys = s;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (aj, kj) in tab.a[stage - 1].iter().zip(&k).take(stage) {
                    acc = acc + *aj * kj[i];
                }
                *yi = *yi + hs * acc;
            }
            k[stage] = deriv(rhs, x + tab.c[stage - 1] * hs, &ys);
        }
        let y_new = axpy(
            &s,
            hs,
            &[
                (tab.b[0], &k[0]),
                (tab.b[2], &k[2]),
                (tab.b[3], &k[3]),
                (tab.b[4], &k[4]),
                (tab.b[5], &k[5]),
            ],
        );
        let x_new = if lands { target } else { x + hs };
        k[6] = deriv(rhs, x_new, &y_new);

        let mut err = T::zero();
        for i in 0..2 {
            let mut e = T::zero();
            for (j, kj) in k.iter().enumerate() {
                e = e + tab.e[j] * kj[i];
            }
            let sc = atol + rtol * s[i].abs().max(y_new[i].abs());
            err = err.max((hs * e).abs() / sc);
        }

        if !finite(&y_new) || !finite(&k[6]) || !err.is_finite() {
            // Treat as a rejected step; shrink hard and retry.
            h = h_try * fac_min;
            last_rejected = true;
            if h <= T::epsilon() * x.abs().max(T::one()) {
                return Err(OdeError::NonFiniteState { x: x.as_f64() });
            }
            continue;
        }

        if err <= T::one() {
            x = x_new;
            s = y_new;
            k1 = k[6];
            record(x, &s, sample_at, &mut next, &mut samples);
            let mut fac = if err == T::zero() {
                fac_max
            } else {
                (safety * err.powf(-expo)).min(fac_max).max(fac_min)
            };
            if last_rejected {
                fac = fac.min(T::one());
            }
            // A step clipped onto a landing point keeps the free step length.
            let base = if lands { h.max(h_try) } else { h_try };
            h = (base * fac).min(span);
            last_rejected = false;
        } else {
            let fac = (safety * err.powf(-expo)).max(fac_min).min(T::one());
            h = h_try * fac;
            last_rejected = true;
        }
    }

    Ok(Trajectory {
        final_value: s[0],
        final_slope: s[1],
        steps_taken: attempts,
        samples,
    })
}
