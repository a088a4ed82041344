//! Basis solutions, endpoint Wronskians and reflection/transmission amplitudes.
//!
//! Inside the confinement interval we solve
//!
//! ```text
//! ψ'' + [k² − V(x) + γ f(|ψ|)] ψ = 0
//! ```
//!
//! so `V > 0` is a barrier and `V < 0` a well; outside, `ψ'' + k²ψ = 0`.
//! Units are `ħ = 1`, `2m = 1`, `k = √E`.
//!
//! Two real basis solutions are launched from `x = 0` with `u(0) = 1,
//! u'(0) = 0` and `v(0) = 0, v'(0) = 1`. Each basis function feels the
//! nonlinearity through its own amplitude. The interior wave is taken as a
//! combination `αu + βv`, and matching to plane waves at the interval edges
//! gives the amplitudes. Because the interior map `(ψ, ψ')(0) → (ψ, ψ')(L)`
//! then has determinant `W = uv' − u'v`, which drifts from 1 once `γ ≠ 0`,
//! the flux is no longer conserved:
//!
//! ```text
//! dW/dx = γ [f(|u|) − f(|v|)] u v
//! ```
//!
//! (This sign follows from the interior equation as written above; it is the
//! opposite of the sign sometimes quoted for the same derivative.)
//!
//! Amplitudes carry the physical phase of plane waves referenced to `x = 0`:
//! `r = B/A`, `t = C/A` for incoming `A e^{ikx}` from the left (mirror image
//! for the right).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ConfinementGeometry, NonlinearitySpec, PotentialSpec};
use crate::ode::{integrate_sampled, IntegratorConfig, OdeError, OdeProblem, Trajectory};
use crate::scalar::Real;

/// Smallest wavenumber accepted; amplitudes degrade as `k → 0`.
pub const K_MIN: f64 = 1e-3;

/// Relative threshold below which a matching denominator counts as zero.
pub const DEGENERATE_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct ScatterConfig<T> {
    pub potential: PotentialSpec<T>,
    pub nonlinearity: NonlinearitySpec<T>,
    pub geometry: ConfinementGeometry<T>,
    #[serde(default)]
    pub integrator: IntegratorConfig<T>,
}

impl<T: Real> ScatterConfig<T> {
    pub fn new(
        potential: PotentialSpec<T>,
        nonlinearity: NonlinearitySpec<T>,
        geometry: ConfinementGeometry<T>,
    ) -> Self {
        Self {
            potential,
            nonlinearity,
            geometry,
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn with_integrator(mut self, integrator: IntegratorConfig<T>) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        self.nonlinearity.validate()?;
        self.geometry.validate()?;
        self.integrator.validate()?;
        let (lo, hi) = self.geometry.interval();
        self.potential.covers(lo, hi)?;
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.potential.is_symmetric(&self.geometry)
    }
}

/// Basis values and slopes at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint<T> {
    pub u: T,
    pub du: T,
    pub v: T,
    pub dv: T,
}

impl<T: Real> Endpoint<T> {
    pub fn wronskian(&self) -> T {
        wronskian(self.u, self.du, self.v, self.dv)
    }

    fn is_finite(&self) -> bool {
        self.u.is_finite() && self.du.is_finite() && self.v.is_finite() && self.dv.is_finite()
    }
}

/// Basis state at one interior position of the `[0, +L]` run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSample<T> {
    pub x: T,
    pub u: T,
    pub du: T,
    pub v: T,
    pub dv: T,
}

/// Endpoint data of the basis solutions.
///
/// * `plus`: `u, u', v, v'` at `x = +L` (`u₁, u₁', v₁, v₁'`).
/// * `minus`: the same at `x = −L` (`u₂ …`); symmetric geometry only.
/// * `mirrored`: half-interval geometry only. Endpoint data at `x = L` of the
///   basis for the reflected profile `V(L − x)`; this is the left-incidence
///   problem that is the mirror image of right incidence on `V`.
/// * `samples`: dense states of the `[0, +L]` run, present only when requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct BasisEndpointData<T> {
    pub geometry: ConfinementGeometry<T>,
    pub plus: Endpoint<T>,
    pub minus: Option<Endpoint<T>>,
    pub mirrored: Option<Endpoint<T>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<Vec<BasisSample<T>>>,
}

impl<T: Real> BasisEndpointData<T> {
    /// Wronskian at `x = +L`.
    pub fn w1(&self) -> T {
        self.plus.wronskian()
    }

    /// Wronskian at `x = −L` (symmetric geometry).
    pub fn w2(&self) -> Option<T> {
        self.minus.map(|e| e.wronskian())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct ScatteringResult<T> {
    pub k: T,
    pub r_left: Complex<T>,
    pub r_right: Complex<T>,
    pub t_left: Complex<T>,
    pub t_right: Complex<T>,
    pub reflectivity_left: T,
    pub reflectivity_right: T,
    pub transmissivity_left: T,
    pub transmissivity_right: T,
    pub sum_left: T,
    pub sum_right: T,
    pub endpoint: BasisEndpointData<T>,
}

impl<T: Real> ScatteringResult<T> {
    pub fn energy(&self) -> T {
        self.k * self.k
    }

    /// The four probabilities `[R_left, R_right, T_left, T_right]`.
    pub fn probabilities(&self) -> [T; 4] {
        [
            self.reflectivity_left,
            self.reflectivity_right,
            self.transmissivity_left,
            self.transmissivity_right,
        ]
    }
}

/// `u·v' − u'·v`.
#[inline]
pub fn wronskian<T: Real>(u: T, du: T, v: T, dv: T) -> T {
    u * dv - du * v
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if !(k >= T::lit(K_MIN)) || !k.is_finite() {
        return Err(Error::KTooSmall {
            k: k.as_f64(),
            k_min: K_MIN,
        });
    }
    Ok(())
}

/// Integrates one basis solution from 0 to `x_end`, restarting at each of
/// `cuts` that falls strictly inside the span.
#[allow(clippy::too_many_arguments)]
fn solve_one<T, P>(
    potential: &P,
    cuts: &[T],
    nonlinearity: &NonlinearitySpec<T>,
    k2: T,
    x_end: T,
    initial: (T, T),
    integrator: &IntegratorConfig<T>,
    sample_at: &[T],
) -> Result<Trajectory<T>>
where
    T: Real,
    P: Fn(T) -> T,
{
    let dir = if x_end >= T::zero() {
        T::one()
    } else {
        -T::one()
    };
    let margin = |x: T| T::epsilon() * T::lit(16.0) * (T::one() + x.abs());
    let mut knots = vec![T::zero()];
    let mut inner: Vec<T> = cuts
        .iter()
        .copied()
        .filter(|&c| c * dir > margin(c) && (x_end - c) * dir > margin(c))
        .collect();
    inner.sort_by(|a, b| (*a * dir).partial_cmp(&(*b * dir)).unwrap());
    for c in inner {
        if (c - knots[knots.len() - 1]) * dir > margin(c) {
            knots.push(c);
        }
    }
    knots.push(x_end);

    let mut state = initial;
    let mut steps = 0;
    let mut samples = Vec::with_capacity(sample_at.len());
    let mut next = 0;
    for seg in knots.windows(2) {
        let (x0, x1) = (seg[0], seg[1]);
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        // One-sided limits at the segment edges: V is read a few ulps inside.
        let (lo_in, hi_in) = (lo + margin(lo) * T::lit(0.5), hi - margin(hi) * T::lit(0.5));
        let rhs = |x: T, y: T, _dy: T| {
            let xv = x.max(lo_in).min(hi_in);
            -(k2 - potential(xv) + nonlinearity.value(y.abs())) * y
        };
        let start = next;
        while next < sample_at.len() && (x1 - sample_at[next]) * dir >= T::zero() {
            next += 1;
        }
        let problem = OdeProblem::new(rhs, x0, x1, state.0, state.1);
        // The step budget is shared by all segments.
        let limit = |x: f64| OdeError::StepLimitExceeded {
            max_steps: integrator.max_steps,
            x,
        };
        if steps >= integrator.max_steps {
            return Err(limit(x0.as_f64()).into());
        }
        let budget = integrator.with_max_steps(integrator.max_steps - steps);
        let run =
            integrate_sampled(&problem, &budget, &sample_at[start..next]).map_err(|e| match e {
                OdeError::StepLimitExceeded { x, .. } => limit(x),
                e => e,
            })?;
        state = (run.final_value, run.final_slope);
        steps += run.steps_taken;
        samples.extend(run.samples);
    }
    Ok(Trajectory {
        final_value: state.0,
        final_slope: state.1,
        steps_taken: steps,
        samples,
    })
}

type PairRun<T> = (Endpoint<T>, Option<Vec<BasisSample<T>>>);

fn solve_pair<T, P>(
    potential: &P,
    cuts: &[T],
    cfg: &ScatterConfig<T>,
    k2: T,
    x_end: T,
    sample_at: &[T],
) -> Result<PairRun<T>>
where
    T: Real,
    P: Fn(T) -> T,
{
    let nl = &cfg.nonlinearity;
    let integ = &cfg.integrator;
    let u = solve_one(
        potential,
        cuts,
        nl,
        k2,
        x_end,
        (T::one(), T::zero()),
        integ,
        sample_at,
    )?;
    let v = solve_one(
        potential,
        cuts,
        nl,
        k2,
        x_end,
        (T::zero(), T::one()),
        integ,
        sample_at,
    )?;
    let end = Endpoint {
        u: u.final_value,
        du: u.final_slope,
        v: v.final_value,
        dv: v.final_slope,
    };
    if !end.is_finite() {
        return Err(OdeError::NonFiniteState { x: x_end.as_f64() }.into());
    }
    let samples = (!sample_at.is_empty()).then(|| {
        u.samples
            .iter()
            .zip(&v.samples)
            .map(|(a, b)| BasisSample {
                x: a.x,
                u: a.value,
                du: a.slope,
                v: b.value,
                dv: b.slope,
            })
            .collect()
    });
    Ok((end, samples))
}

/// Integrates the basis pair `u`, `v` from `x = 0` to the interval edges.
pub fn integrate_basis<T: Real>(cfg: &ScatterConfig<T>, k: T) -> Result<BasisEndpointData<T>> {
    basis_impl(cfg, k, &[])
}

/// [`integrate_basis`] that also records `n` equally spaced states of the
/// `[0, +L]` run (endpoints included) for Wronskian diagnostics.
pub fn integrate_basis_sampled<T: Real>(
    cfg: &ScatterConfig<T>,
    k: T,
    n: usize,
) -> Result<BasisEndpointData<T>> {
    let l = cfg.geometry.length();
    let n = n.max(2);
    let last = T::from_usize(n - 1).unwrap();
    let at: Vec<T> = (0..n)
        .map(|i| {
            if i == n - 1 {
                l
            } else {
                l * T::from_usize(i).unwrap() / last
            }
        })
        .collect();
    basis_impl(cfg, k, &at)
}

fn basis_impl<T: Real>(
    cfg: &ScatterConfig<T>,
    k: T,
    sample_at: &[T],
) -> Result<BasisEndpointData<T>> {
    check_k(k)?;
    cfg.validate()?;
    let k2 = k * k;
    let spec = &cfg.potential;
    // Coverage was validated, so evaluation inside the interval cannot fail.
    let potential = |x: T| spec.value(x).unwrap_or_else(|_| T::nan());
    let l = cfg.geometry.length();
    let cuts = spec.breakpoints();
    match cfg.geometry {
        ConfinementGeometry::Symmetric { .. } => {
            let (plus, samples) = solve_pair(&potential, &cuts, cfg, k2, l, sample_at)?;
            let (minus, _) = solve_pair(&potential, &cuts, cfg, k2, -l, &[])?;
            Ok(BasisEndpointData {
                geometry: cfg.geometry,
                plus,
                minus: Some(minus),
                mirrored: None,
                samples,
            })
        }
        ConfinementGeometry::HalfInterval { .. } => {
            let (plus, samples) = solve_pair(&potential, &cuts, cfg, k2, l, sample_at)?;
            let reflected = |x: T| potential(l - x);
            let mirrored_cuts: Vec<T> = cuts.iter().map(|&c| l - c).collect();
            let (mirrored, _) = solve_pair(&reflected, &mirrored_cuts, cfg, k2, l, &[])?;
            Ok(BasisEndpointData {
                geometry: cfg.geometry,
                plus,
                minus: None,
                mirrored: Some(mirrored),
                samples,
            })
        }
    }
}

#[inline]
fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

fn degenerate<T: Real>(modulus: T, scale: T, k: T) -> Result<()> {
    if !(modulus > T::lit(DEGENERATE_REL) * scale) || !modulus.is_finite() {
        return Err(Error::DegenerateDenominator { k: k.as_f64() });
    }
    Ok(())
}

/// Amplitudes for confinement on `[−L, L]` from the endpoint data at both edges.
///
/// With `a = u₂'v₁' − u₁'v₂'`, `d = u₁v₂ − u₂v₁` the shared denominator is
///
/// ```text
/// D = a − k²d + ik[(u₁v₂' − u₁'v₂) + (u₂v₁' − u₂'v₁)]
/// ```
///
/// and the reflection numerators are complex conjugates of each other,
/// `−a − k²d ± ik[(u₂v₁' + u₂'v₁) − (u₁v₂' + u₁'v₂)]`, so `R_left = R_right`
/// for any real data. Transmission numerators are `2ik·W₁` (left) and
/// `2ik·W₂` (right).
pub fn amplitudes_two_sided<T: Real>(
    ep: &BasisEndpointData<T>,
    k: T,
) -> Result<ScatteringResult<T>> {
    check_k(k)?;
    let ConfinementGeometry::Symmetric { length } = ep.geometry else {
        return Err(Error::GeometryMismatch {
            expected: "symmetric",
        });
    };
    let minus = ep.minus.ok_or(Error::GeometryMismatch {
        expected: "symmetric",
    })?;
    let Endpoint {
        u: u1,
        du: du1,
        v: v1,
        dv: dv1,
    } = ep.plus;
    let Endpoint {
        u: u2,
        du: du2,
        v: v2,
        dv: dv2,
    } = minus;
    let k2 = k * k;

    let a = du2 * dv1 - du1 * dv2;
    let d = u1 * v2 - u2 * v1;
    let cross = (u1 * dv2 - du1 * v2) + (u2 * dv1 - du2 * v1);
    let den = Complex::new(a - k2 * d, k * cross);

    let scale = (du2 * dv1).abs()
        + (du1 * dv2).abs()
        + k * ((u1 * dv2).abs() + (du1 * v2).abs() + (u2 * dv1).abs() + (du2 * v1).abs())
        + k2 * ((u1 * v2).abs() + (u2 * v1).abs());
    let den_sq = den.norm_sqr();
    degenerate(den_sq.sqrt(), scale, k)?;

    let im = k * ((u2 * dv1 + du2 * v1) - (u1 * dv2 + du1 * v2));
    let n_left = Complex::new(-a - k2 * d, im);
    let n_right = n_left.conj();
    let w1 = ep.plus.wronskian();
    let w2 = minus.wronskian();

    let two = T::lit(2.0);
    let phase = cis(-two * k * length);
    let r_left = phase * n_left / den;
    let r_right = phase * n_right / den;
    let t_left = phase * Complex::new(T::zero(), two * k * w1) / den;
    let t_right = phase * Complex::new(T::zero(), two * k * w2) / den;

    // Probabilities from the moduli directly so the two reflectivities share
    // one expression.
    let refl = n_left.norm_sqr() / den_sq;
    let four_k2 = T::lit(4.0) * k2;
    let tl = four_k2 * w1 * w1 / den_sq;
    let tr = four_k2 * w2 * w2 / den_sq;
    Ok(ScatteringResult {
        k,
        r_left,
        r_right,
        t_left,
        t_right,
        reflectivity_left: refl,
        reflectivity_right: refl,
        transmissivity_left: tl,
        transmissivity_right: tr,
        sum_left: refl + tl,
        sum_right: refl + tr,
        endpoint: ep.clone(),
    })
}

/// Left-incidence amplitudes for confinement on `[0, L]` from the data at
/// `x = L`:
///
/// ```text
/// r = [k²v + u' + ik(v' − u)] / [k²v − u' + ik(v' + u)]
/// t = 2ik·W·e^{−ikL} / [k²v − u' + ik(v' + u)]
/// ```
fn half_interval_left<T: Real>(
    e: &Endpoint<T>,
    k: T,
    length: T,
) -> Result<(Complex<T>, Complex<T>, T, T)> {
    let k2 = k * k;
    let den = Complex::new(k2 * e.v - e.du, k * (e.dv + e.u));
    let scale = k2 * e.v.abs() + e.du.abs() + k * (e.dv.abs() + e.u.abs());
    let den_sq = den.norm_sqr();
    degenerate(den_sq.sqrt(), scale, k)?;
    let num = Complex::new(k2 * e.v + e.du, k * (e.dv - e.u));
    let w = e.wronskian();
    let r = num / den;
    let t = cis(-k * length) * Complex::new(T::zero(), T::lit(2.0) * k * w) / den;
    let refl = num.norm_sqr() / den_sq;
    let trans = T::lit(4.0) * k2 * w * w / den_sq;
    Ok((r, t, refl, trans))
}

/// Amplitudes for confinement on `[0, L]`.
///
/// Left incidence uses the basis launched at `x = 0`. Right incidence on `V`
/// is the mirror image of left incidence on `V(L − x)`, so it uses the
/// `mirrored` endpoint set, i.e. the basis launched from the right edge. In
/// the linear case this coincides with [`right_incidence_shared_basis`].
pub fn amplitudes_half_interval<T: Real>(
    ep: &BasisEndpointData<T>,
    k: T,
) -> Result<ScatteringResult<T>> {
    check_k(k)?;
    let ConfinementGeometry::HalfInterval { length } = ep.geometry else {
        return Err(Error::GeometryMismatch {
            expected: "half_interval",
        });
    };
    let mirrored = ep.mirrored.ok_or(Error::GeometryMismatch {
        expected: "half_interval",
    })?;
    let (r_left, t_left, rl, tl) = half_interval_left(&ep.plus, k, length)?;
    let (r_m, t_right, rr, tr) = half_interval_left(&mirrored, k, length)?;
    let r_right = r_m * cis(-T::lit(2.0) * k * length);
    Ok(ScatteringResult {
        k,
        r_left,
        r_right,
        t_left,
        t_right,
        reflectivity_left: rl,
        reflectivity_right: rr,
        transmissivity_left: tl,
        transmissivity_right: tr,
        sum_left: rl + tl,
        sum_right: rr + tr,
        endpoint: ep.clone(),
    })
}

/// Right-incidence amplitudes `(r, t)` on `[0, L]` obtained by reusing the
/// left-launched basis: `ψ = F(u − ikv)` inside, matched at `x = L` to
/// `A e^{−ikx} + B e^{ikx}`.
///
/// Exact for a linear interior only. With nonlinearity it yields
/// `T_left = W²·T_right` for every profile, so it is kept as a cross-check
/// rather than as the right-incidence route.
pub fn right_incidence_shared_basis<T: Real>(
    ep: &BasisEndpointData<T>,
    k: T,
) -> Result<(Complex<T>, Complex<T>)> {
    check_k(k)?;
    let length = ep.geometry.length();
    let e = ep.plus;
    let ik = Complex::new(T::zero(), k);
    let psi = Complex::new(e.u, -k * e.v);
    let dpsi = Complex::new(e.du, -k * e.dv);
    let den = ik * psi - dpsi;
    let scale = k * (e.u.abs() + k * e.v.abs()) + e.du.abs() + k * e.dv.abs();
    degenerate(den.norm(), scale, k)?;
    let two_ik = ik * T::lit(2.0);
    let t = two_ik * cis(-k * length) / den;
    let r = cis(-T::lit(2.0) * k * length) * (ik * psi + dpsi) / den;
    Ok((r, t))
}

/// `(R, T)` for a parity-symmetric profile on `[−L, L]` from the `x = +L`
/// data only:
///
/// ```text
/// Δ = (k²u₁v₁ − u₁'v₁')² + k²(u₁v₁' + u₁'v₁)²
/// R = (k²u₁v₁ + u₁'v₁')² / Δ,   T = k²(u₁v₁' − u₁'v₁)² / Δ
/// ```
pub fn amplitudes_symmetric_closed_form<T: Real>(
    ep: &BasisEndpointData<T>,
    k: T,
) -> Result<(T, T)> {
    check_k(k)?;
    let Endpoint { u, du, v, dv } = ep.plus;
    let k2 = k * k;
    let p = k2 * u * v - du * dv;
    let q = u * dv + du * v;
    let delta = p * p + k2 * q * q;
    let scale = k2 * (u * v).abs() + (du * dv).abs() + k * ((u * dv).abs() + (du * v).abs());
    degenerate(delta.sqrt(), scale, k)?;
    let rn = k2 * u * v + du * dv;
    let w = u * dv - du * v;
    Ok((rn * rn / delta, k2 * w * w / delta))
}

/// `(R + T) − 1` for left incidence on `[0, L]` in closed form:
///
/// ```text
/// S = k⁴v² + u'² + k²v'² + k²u²
/// R + T = [S + 2k²W(2W − 1)] / [S + 2k²W]
/// ```
///
/// where `S + 2k²W = |k²v − u' + ik(v' + u)|²`.
pub fn unitarity_defect<T: Real>(ep: &BasisEndpointData<T>, k: T) -> Result<T> {
    check_k(k)?;
    endpoint_unitarity_defect(&ep.plus, k)
}

/// [`unitarity_defect`] for an explicit endpoint set (e.g. the mirrored one).
///
/// Near resonances `S` and `2k²W` nearly cancel, so the expression is
/// evaluated in double-double arithmetic, using
/// `num − den = 4k²W(W − 1)`.
pub fn endpoint_unitarity_defect<T: Real>(e: &Endpoint<T>, k: T) -> Result<T> {
    let k = Dd::new(k);
    let (u, du, v, dv) = (Dd::new(e.u), Dd::new(e.du), Dd::new(e.v), Dd::new(e.dv));
    let k2 = k * k;
    let w = u * dv - du * v;
    let s = k2 * k2 * v * v + du * du + k2 * dv * dv + k2 * u * u;
    let k2w = k2 * w;
    let den = s + k2w.scale(T::lit(2.0));
    let excess = (k2w * (w - Dd::new(T::one()))).scale(T::lit(4.0));
    let (den, s, k2w) = (den.value(), s.value(), k2w.value());
    degenerate(den, s + T::lit(2.0) * k2w.abs(), k.value())?;
    Ok(excess.value() / den)
}

/// Unevaluated sum `hi + lo` carrying about twice the working precision.
#[derive(Debug, Clone, Copy)]
struct Dd<T> {
    hi: T,
    lo: T,
}

impl<T: Real> Dd<T> {
    fn new(x: T) -> Self {
        Self {
            hi: x,
            lo: T::zero(),
        }
    }

    fn two_sum(a: T, b: T) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn quick_two_sum(a: T, b: T) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn scale(self, c: T) -> Self {
        self * Dd::new(c)
    }

    fn value(self) -> T {
        self.hi + self.lo
    }
}

impl<T: Real> std::ops::Add for Dd<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let s = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl<T: Real> std::ops::Sub for Dd<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + Self {
            hi: -o.hi,
            lo: -o.lo,
        }
    }
}

impl<T: Real> std::ops::Mul for Dd<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Self::quick_two_sum(p, e)
    }
}

/// Full scattering result at wavenumber `k`.
pub fn scatter<T: Real>(cfg: &ScatterConfig<T>, k: T) -> Result<ScatteringResult<T>> {
    let ep = integrate_basis(cfg, k)?;
    match cfg.geometry {
        ConfinementGeometry::Symmetric { .. } => amplitudes_two_sided(&ep, k),
        ConfinementGeometry::HalfInterval { .. } => amplitudes_half_interval(&ep, k),
    }
}

/// Full scattering result at energy `E` (`k = √E`).
pub fn scatter_energy<T: Real>(cfg: &ScatterConfig<T>, energy: T) -> Result<ScatteringResult<T>> {
    if !(energy > T::zero()) {
        return Err(Error::KTooSmall {
            k: 0.0,
            k_min: K_MIN,
        });
    }
    scatter(cfg, energy.sqrt())
}

/// Composite Simpson quadrature of `γ[f(|u|) − f(|v|)]·u·v` over dense basis
/// samples (uniform spacing, odd count; an even count drops to the trapezoid
/// rule on the last panel).
///
/// For the exact solution this equals `W(x_last) − W(x_first)`.
pub fn wronskian_source_integral<T: Real>(
    samples: &[BasisSample<T>],
    nl: &NonlinearitySpec<T>,
) -> T {
    let g =
        |s: &BasisSample<T>| nl.gamma * (nl.profile(s.u.abs()) - nl.profile(s.v.abs())) * s.u * s.v;
    let n = samples.len();
    if n < 2 || nl.kind == crate::models::NonlinearityKind::None {
        return T::zero();
    }
    let h = (samples[n - 1].x - samples[0].x) / T::from_usize(n - 1).unwrap();
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 2 };
    let mut acc = T::zero();
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    for (i, s) in samples.iter().enumerate().take(simpson_end + 1) {
        let w = if i == 0 || i == simpson_end {
            T::one()
        } else if i % 2 == 1 {
            four
        } else {
            two
        };
        acc = acc + w * g(s);
    }
    let mut total = acc * h / T::lit(3.0);
    if simpson_end != n - 1 {
        total = total + (g(&samples[n - 2]) + g(&samples[n - 1])) * h / two;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{NonlinearitySpec, PotentialSpec};
    use std::f64::consts::PI;

    fn free(geometry: ConfinementGeometry<f64>) -> ScatterConfig<f64> {
        ScatterConfig::new(
            PotentialSpec::gaussian(0.0),
            NonlinearitySpec::none(),
            geometry,
        )
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian(1.0, 0.0, 0.0, 1.0), 1.0);
        assert_eq!(wronskian(-1.0, 0.0, 0.0, -1.0), 1.0);
        assert_eq!(wronskian(2.0, 1.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn free_space_basis_symmetric() {
        let ep =
            integrate_basis(&free(ConfinementGeometry::Symmetric { length: PI }), 1.0).unwrap();
        let m = ep.minus.unwrap();
        for (got, want) in [
            (ep.plus.u, -1.0),
            (ep.plus.du, 0.0),
            (ep.plus.v, 0.0),
            (ep.plus.dv, -1.0),
            (m.u, -1.0),
            (m.du, 0.0),
            (m.v, 0.0),
            (m.dv, -1.0),
        ] {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        assert!((ep.w1() - 1.0).abs() < 1e-8);
        assert!((ep.w2().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn free_space_basis_half_interval() {
        let (k, l) = (1.7, 2.3);
        let ep =
            integrate_basis(&free(ConfinementGeometry::HalfInterval { length: l }), k).unwrap();
        assert!((ep.plus.u - (k * l).cos()).abs() < 1e-8);
        assert!((ep.plus.v - (k * l).sin() / k).abs() < 1e-8);
        assert!((ep.w1() - 1.0).abs() < 1e-8);
        assert!(ep.minus.is_none());
    }

    #[test]
    fn free_space_amplitudes() {
        for geom in [
            ConfinementGeometry::Symmetric { length: 5.0 },
            ConfinementGeometry::HalfInterval { length: 5.0 },
        ] {
            for k in [0.3, 1.0, 2.9] {
                let res = scatter(&free(geom), k).unwrap();
                assert!(res.reflectivity_left < 1e-16 + 1e-9, "{res:?}");
                assert!(res.reflectivity_right < 1e-9);
                assert!((res.transmissivity_left - 1.0).abs() < 1e-8);
                assert!((res.transmissivity_right - 1.0).abs() < 1e-8);
                // Free propagation: t = 1 exactly in the origin-referenced convention.
                assert!((res.t_left - Complex::new(1.0, 0.0)).norm() < 1e-8);
                assert!((res.t_right - Complex::new(1.0, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn closed_form_free_space_quarter() {
        let s = 0.5f64.sqrt();
        let ep = BasisEndpointData {
            geometry: ConfinementGeometry::Symmetric { length: PI / 4.0 },
            plus: Endpoint {
                u: s,
                du: -s,
                v: s,
                dv: s,
            },
            minus: None,
            mirrored: None,
            samples: None,
        };
        let (r, t) = amplitudes_symmetric_closed_form(&ep, 1.0).unwrap();
        assert!(r.abs() < 1e-15);
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn defect_vanishes_for_unit_wronskian() {
        let ep = BasisEndpointData {
            geometry: ConfinementGeometry::HalfInterval { length: 1.0 },
            plus: Endpoint {
                u: 2.0,
                du: 1.0,
                v: 1.0,
                dv: 1.0,
            },
            minus: None,
            mirrored: Some(Endpoint {
                u: 2.0,
                du: 1.0,
                v: 1.0,
                dv: 1.0,
            }),
            samples: None,
        };
        assert_eq!(unitarity_defect(&ep, 1.3).unwrap(), 0.0);
        let res = amplitudes_half_interval(&ep, 1.3).unwrap();
        assert!((res.sum_left - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let zero = Endpoint {
            u: 0.0,
            du: 0.0,
            v: 0.0,
            dv: 0.0,
        };
        let ep = BasisEndpointData {
            geometry: ConfinementGeometry::Symmetric { length: 1.0 },
            plus: zero,
            minus: Some(zero),
            mirrored: None,
            samples: None,
        };
        assert!(matches!(
            amplitudes_two_sided(&ep, 1.0),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(matches!(
            amplitudes_symmetric_closed_form(&ep, 1.0),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(matches!(
            amplitudes_half_interval(&ep, 1.0),
            Err(Error::GeometryMismatch { .. })
        ));
        let cfg = free(ConfinementGeometry::Symmetric { length: 1.0 });
        assert!(matches!(scatter(&cfg, 1e-4), Err(Error::KTooSmall { .. })));
    }

    #[test]
    fn tabulated_must_cover_interval() {
        let cfg = ScatterConfig::new(
            PotentialSpec::Tabulated {
                samples: vec![[0.0, 1.0], [1.0, 1.0]],
            },
            NonlinearitySpec::none(),
            ConfinementGeometry::Symmetric { length: 1.0 },
        );
        assert!(matches!(
            integrate_basis(&cfg, 1.0),
            Err(Error::Model(
                crate::models::ModelError::TabulatedOutOfRange { .. }
            ))
        ));
    }

    #[test]
    fn shared_basis_matches_mirror_when_linear() {
        let cfg = ScatterConfig::new(
            PotentialSpec::ShiftedGaussian {
                v0: 3.0,
                mu: 0.4,
                length: 5.0,
                width: 1.0,
            },
            NonlinearitySpec::none(),
            ConfinementGeometry::HalfInterval { length: 5.0 },
        );
        for k in [0.5, 1.3, 2.2] {
            let res = scatter(&cfg, k).unwrap();
            let (r, t) = right_incidence_shared_basis(&res.endpoint, k).unwrap();
            assert!(
                (r - res.r_right).norm() < 1e-7,
                "k={k}: {r} vs {}",
                res.r_right
            );
            assert!(
                (t - res.t_right).norm() < 1e-7,
                "k={k}: {t} vs {}",
                res.t_right
            );
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn defect_accurate_near_resonance() {
        // Endpoint data close to a transmission resonance, where S and 2k²W
        // cancel to about three digits. Reference from 50-digit arithmetic.
        let e = Endpoint {
            u: 1.52561763224679181,
            du: -3.13516058560033395e-1,
            v: -3.05083658255661416e-1,
            dv: -1.46522461916685476,
        };
        let k = 1.09291919271693883f64;
        let d = endpoint_unitarity_defect(&e, k).unwrap();
        assert!((d - 5340.0920710088148876).abs() < 1e-11, "{d}");
    }
}
