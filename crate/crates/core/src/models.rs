//! Potential profiles `V(x)`, nonlinearity profiles `f(|ψ|)` and the two
//! confinement geometries.
//!
//! Units: `2m = ħ = 1`, so energies and potential heights share units and the
//! exterior wavenumber is `k = √E`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{one, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("tabulated potential queried at x = {x}, outside its span [{lo}, {hi}]")]
    TabulatedOutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        key,
        reason: reason.into(),
    }
}

/// Real potential profile.
///
/// Gaussian widths generalize `e^{-x²}` to `e^{-(x/w)²}`; `w = 1` by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub enum PotentialSpec<T> {
    /// `v0 · exp(-(x/width)²)`.
    Gaussian {
        v0: T,
        #[serde(default = "one")]
        width: T,
    },
    /// `v0 · exp(-((x - mu·length)/width)²)`; `mu` is the centre as a
    /// fraction of `length`.
    ShiftedGaussian {
        v0: T,
        mu: T,
        length: T,
        #[serde(default = "one")]
        width: T,
    },
    /// Gaussian with different widths on `x <= 0` and `x > 0`; continuous at 0.
    PiecewiseGaussian {
        v0: T,
        width_left: T,
        width_right: T,
    },
    /// `v0` on `[a, b]`, zero elsewhere.
    Rectangular { v0: T, a: T, b: T },
    /// Linear interpolation through `(x, V)` pairs with strictly increasing `x`.
    Tabulated { samples: Vec<[T; 2]> },
}

impl<T: Real> PotentialSpec<T> {
    pub fn gaussian(v0: T) -> Self {
        Self::Gaussian {
            v0,
            width: T::one(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = |key: &'static str, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, "must be finite"))
            }
        };
        let positive = |key: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, format!("must be positive, got {v}")))
            }
        };
        match self {
            Self::Gaussian { v0, width } => {
                finite("v0", *v0)?;
                positive("width", *width)
            }
            Self::ShiftedGaussian {
                v0,
                mu,
                length,
                width,
            } => {
                finite("v0", *v0)?;
                finite("mu", *mu)?;
                positive("length", *length)?;
                positive("width", *width)
            }
            Self::PiecewiseGaussian {
                v0,
                width_left,
                width_right,
            } => {
                finite("v0", *v0)?;
                positive("width_left", *width_left)?;
                positive("width_right", *width_right)
            }
            Self::Rectangular { v0, a, b } => {
                finite("v0", *v0)?;
                finite("a", *a)?;
                finite("b", *b)?;
                if a < b {
                    Ok(())
                } else {
                    Err(invalid("b", "rectangle needs a < b"))
                }
            }
            Self::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(invalid("samples", "need at least two samples"));
                }
                for w in samples.windows(2) {
                    if !(w[1][0] > w[0][0]) {
                        return Err(invalid("samples", "positions must be strictly increasing"));
                    }
                }
                if samples
                    .iter()
                    .any(|p| !p[0].is_finite() || !p[1].is_finite())
                {
                    return Err(invalid("samples", "must be finite"));
                }
                Ok(())
            }
        }
    }

    /// `V(x)`.
    pub fn value(&self, x: T) -> Result<T, ModelError> {
        let gauss = |v0: T, d: T, w: T| {
            let s = d / w;
            v0 * (-s * s).exp()
        };
        Ok(match self {
            Self::Gaussian { v0, width } => gauss(*v0, x, *width),
            Self::ShiftedGaussian {
                v0,
                mu,
                length,
                width,
            } => gauss(*v0, x - *mu * *length, *width),
            Self::PiecewiseGaussian {
                v0,
                width_left,
                width_right,
            } => {
                if x <= T::zero() {
                    gauss(*v0, x, *width_left)
                } else {
                    gauss(*v0, x, *width_right)
                }
            }
            Self::Rectangular { v0, a, b } => {
                if x >= *a && x <= *b {
                    *v0
                } else {
                    T::zero()
                }
            }
            Self::Tabulated { samples } => interpolate(samples, x)?,
        })
    }

    /// Positions where `V` or its derivative jumps. Integrators restart
    /// there so the step never straddles a discontinuity.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Self::PiecewiseGaussian { .. } => vec![T::zero()],
            Self::Rectangular { a, b, .. } => vec![*a, *b],
            Self::Tabulated { samples } => samples.iter().map(|p| p[0]).collect(),
            Self::Gaussian { .. } | Self::ShiftedGaussian { .. } => Vec::new(),
        }
    }

    /// Checks that `V` can be evaluated everywhere on `[lo, hi]`.
    pub fn covers(&self, lo: T, hi: T) -> Result<(), ModelError> {
        if let Self::Tabulated { samples } = self {
            let (first, last) = (samples[0][0], samples[samples.len() - 1][0]);
            for x in [lo, hi] {
                if x < first || x > last {
                    return Err(ModelError::TabulatedOutOfRange {
                        x: x.as_f64(),
                        lo: first.as_f64(),
                        hi: last.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Whether `V` is even about the midpoint of the confinement interval.
    ///
    /// Built-in kinds are decided analytically; only the part of `V` inside
    /// the interval matters. Tabulated profiles are compared numerically on
    /// 200 mirrored sample pairs with tolerance `1e-12`.
    pub fn is_symmetric(&self, geometry: &ConfinementGeometry<T>) -> bool {
        let (lo, hi) = geometry.interval();
        let mid = geometry.midpoint();
        let zero = T::zero();
        match self {
            Self::Gaussian { v0, .. } => *v0 == zero || mid == zero,
            Self::ShiftedGaussian { v0, mu, length, .. } => *v0 == zero || *mu * *length == mid,
            Self::PiecewiseGaussian {
                v0,
                width_left,
                width_right,
            } => *v0 == zero || (mid == zero && width_left == width_right),
            Self::Rectangular { v0, a, b } => {
                let (ca, cb) = (a.max(lo), b.min(hi));
                if *v0 == zero || ca > cb {
                    return true;
                }
                // Both clipped edges must mirror about the midpoint.
                ca - lo == hi - cb
            }
            Self::Tabulated { .. } => sampled_symmetry(self, lo, hi, 200, T::lit(1e-12)),
        }
    }
}

fn interpolate<T: Real>(samples: &[[T; 2]], x: T) -> Result<T, ModelError> {
    let n = samples.len();
    let (lo, hi) = (samples[0][0], samples[n - 1][0]);
    if !(x >= lo && x <= hi) {
        return Err(ModelError::TabulatedOutOfRange {
            x: x.as_f64(),
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let i = samples.partition_point(|p| p[0] <= x).clamp(1, n - 1);
    let (p, q) = (samples[i - 1], samples[i]);
    let t = (x - p[0]) / (q[0] - p[0]);
    Ok(p[1] + t * (q[1] - p[1]))
}

/// Brute-force midpoint reflection test: `|V(m + d) - V(m - d)| <= tol` on
/// `n` offsets spread over the half-width of `[lo, hi]`.
pub fn sampled_symmetry<T: Real>(spec: &PotentialSpec<T>, lo: T, hi: T, n: usize, tol: T) -> bool {
    let mid = (lo + hi) / T::lit(2.0);
    let half = (hi - lo) / T::lit(2.0);
    (0..n).all(|i| {
        let d = half * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
        match (spec.value(mid + d), spec.value(mid - d)) {
            (Ok(a), Ok(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    None,
    Kerr,
    Saturating,
}

/// Nonlinear term `γ·f(|ψ|)`.
///
/// * `Kerr`: `f = |ψ|²`
/// * `Saturating`: `f = 1 / (1 + (|ψ|/saturation)²)`, `saturation = 1` by default
/// * `None`: `f = 0`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct NonlinearitySpec<T> {
    pub kind: NonlinearityKind,
    #[serde(default)]
    pub gamma: T,
    #[serde(default = "one")]
    pub saturation: T,
}

impl<T: Real> NonlinearitySpec<T> {
    pub fn none() -> Self {
        Self {
            kind: NonlinearityKind::None,
            gamma: T::zero(),
            saturation: T::one(),
        }
    }

    pub fn kerr(gamma: T) -> Self {
        Self {
            kind: NonlinearityKind::Kerr,
            gamma,
            saturation: T::one(),
        }
    }

    pub fn saturating(gamma: T) -> Self {
        Self {
            kind: NonlinearityKind::Saturating,
            gamma,
            saturation: T::one(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.gamma.is_finite() {
            return Err(invalid("gamma", "must be finite"));
        }
        if !(self.saturation > T::zero() && self.saturation.is_finite()) {
            return Err(invalid(
                "saturation",
                format!("must be positive, got {}", self.saturation),
            ));
        }
        Ok(())
    }

    /// True when the interior equation is linear.
    pub fn is_linear(&self) -> bool {
        self.kind == NonlinearityKind::None || self.gamma == T::zero()
    }

    /// Same profile with the strength replaced.
    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    /// Profile `f(amplitude)` without the strength factor.
    #[inline]
    pub fn profile(&self, amplitude: T) -> T {
        match self.kind {
            NonlinearityKind::None => T::zero(),
            NonlinearityKind::Kerr => amplitude * amplitude,
            NonlinearityKind::Saturating => {
                let s = amplitude / self.saturation;
                T::one() / (T::one() + s * s)
            }
        }
    }

    /// `γ·f(amplitude)`.
    #[inline]
    pub fn value(&self, amplitude: T) -> T {
        match self.kind {
            NonlinearityKind::None => T::zero(),
            _ => self.gamma * self.profile(amplitude),
        }
    }
}

/// Support of both `V` and the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConfinementGeometry<T> {
    /// `[-length, length]`, basis launched from the centre.
    Symmetric { length: T },
    /// `[0, length]`, basis launched from the left edge.
    HalfInterval { length: T },
}

impl<T: Real> ConfinementGeometry<T> {
    pub fn length(&self) -> T {
        match *self {
            Self::Symmetric { length } | Self::HalfInterval { length } => length,
        }
    }

    pub fn interval(&self) -> (T, T) {
        match *self {
            Self::Symmetric { length } => (-length, length),
            Self::HalfInterval { length } => (T::zero(), length),
        }
    }

    pub fn midpoint(&self) -> T {
        match *self {
            Self::Symmetric { .. } => T::zero(),
            Self::HalfInterval { length } => length / T::lit(2.0),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let l = self.length();
        if l > T::zero() && l.is_finite() {
            Ok(())
        } else {
            Err(invalid("length", format!("must be positive, got {l}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Symmetric { .. } => "symmetric",
            Self::HalfInterval { .. } => "half_interval",
        }
    }
}

/// `V(x)` as a free function.
pub fn eval_potential<T: Real>(spec: &PotentialSpec<T>, x: T) -> Result<T, ModelError> {
    spec.value(x)
}

/// `γ·f(amplitude)` as a free function.
pub fn eval_nonlinearity<T: Real>(spec: &NonlinearitySpec<T>, amplitude: T) -> T {
    spec.value(amplitude)
}

pub fn is_symmetric<T: Real>(spec: &PotentialSpec<T>, geometry: &ConfinementGeometry<T>) -> bool {
    spec.is_symmetric(geometry)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> PotentialSpec<f64> {
        PotentialSpec::PiecewiseGaussian {
            v0: -3.0,
            width_left: 1.0,
            width_right: (2.0f64 / 3.0).sqrt(),
        }
    }

    #[test]
    fn gaussian_peak() {
        assert_eq!(PotentialSpec::gaussian(-3.0).value(0.0).unwrap(), -3.0);
    }

    #[test]
    fn shifted_gaussian_peak_at_centre() {
        let v = PotentialSpec::ShiftedGaussian {
            v0: 3.0,
            mu: 0.5,
            length: 5.0,
            width: 1.0,
        };
        assert_eq!(v.value(2.5).unwrap(), 3.0);
    }

    #[test]
    fn piecewise_continuity_and_shape() {
        let v = fig2();
        assert_eq!(v.value(0.0).unwrap(), -3.0);
        assert_eq!(v.value(1e-300).unwrap(), -3.0);
        let x = 0.7f64;
        assert!((v.value(x).unwrap() + 3.0 * (-1.5 * x * x).exp()).abs() < 1e-15);
        assert!((v.value(-x).unwrap() + 3.0 * (-x * x).exp()).abs() < 1e-15);
    }

    #[test]
    fn rectangular_and_tabulated() {
        let r = PotentialSpec::Rectangular {
            v0: 2.0,
            a: -1.0,
            b: 1.0,
        };
        assert_eq!(r.value(0.5).unwrap(), 2.0);
        assert_eq!(r.value(1.5).unwrap(), 0.0);
        let t = PotentialSpec::Tabulated {
            samples: vec![[0.0, 0.0], [1.0, 2.0], [3.0, 0.0]],
        };
        assert_eq!(t.value(0.5).unwrap(), 1.0);
        assert_eq!(t.value(2.0).unwrap(), 1.0);
        assert_eq!(t.value(3.0).unwrap(), 0.0);
        assert!(matches!(
            t.value(3.5),
            Err(ModelError::TabulatedOutOfRange { .. })
        ));
        assert!(t.covers(0.0, 3.0).is_ok());
        assert!(t.covers(-1.0, 3.0).is_err());
        assert_eq!(r.breakpoints(), [-1.0, 1.0]);
        assert_eq!(t.breakpoints(), [0.0, 1.0, 3.0]);
        assert!(PotentialSpec::gaussian(1.0).breakpoints().is_empty());
    }

    #[test]
    fn tabulated_must_increase() {
        let t = PotentialSpec::Tabulated {
            samples: vec![[0.0, 0.0], [0.0, 2.0]],
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn nonlinearity_values() {
        assert_eq!(NonlinearitySpec::saturating(1.0).value(0.0), 1.0);
        assert_eq!(NonlinearitySpec::kerr(1.0).value(2.0), 4.0);
        assert_eq!(NonlinearitySpec::<f64>::none().value(7.3), 0.0);
        let mut s = NonlinearitySpec::saturating(1.0);
        s.saturation = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn symmetry_examples() {
        let sym = ConfinementGeometry::Symmetric { length: 5.0 };
        let half = ConfinementGeometry::HalfInterval { length: 5.0 };
        assert!(PotentialSpec::gaussian(-3.0).is_symmetric(&sym));
        assert!(!fig2().is_symmetric(&sym));
        let shifted = |mu| PotentialSpec::ShiftedGaussian {
            v0: 3.0,
            mu,
            length: 5.0,
            width: 1.0,
        };
        assert!(!shifted(0.4).is_symmetric(&half));
        assert!(shifted(0.5).is_symmetric(&half));
        assert!(!PotentialSpec::gaussian(-3.0).is_symmetric(&half));
    }

    #[test]
    fn tabulated_symmetry_numeric() {
        let half = ConfinementGeometry::HalfInterval { length: 2.0 };
        let tent = PotentialSpec::Tabulated {
            samples: vec![[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]],
        };
        assert!(tent.is_symmetric(&half));
        let skew = PotentialSpec::Tabulated {
            samples: vec![[0.0, 0.0], [0.8, 1.0], [2.0, 0.0]],
        };
        assert!(!skew.is_symmetric(&half));
        // Table not covering the interval cannot be certified.
        let short = PotentialSpec::Tabulated {
            samples: vec![[0.0, 0.0], [1.0, 0.0]],
        };
        assert!(!short.is_symmetric(&half));
    }

    #[test]
    fn json_shapes() {
        let v: PotentialSpec<f64> = serde_json::from_str(r#"{"kind":"gaussian","v0":-3}"#).unwrap();
        assert_eq!(v, PotentialSpec::gaussian(-3.0));
        assert!(serde_json::from_str::<PotentialSpec<f64>>(
            r#"{"kind":"gaussian","v0":-3,"bogus":1}"#
        )
        .is_err());
        let n: NonlinearitySpec<f64> =
            serde_json::from_str(r#"{"kind":"saturating","gamma":1}"#).unwrap();
        assert_eq!(n, NonlinearitySpec::saturating(1.0));
        let g: ConfinementGeometry<f64> =
            serde_json::from_str(r#"{"kind":"half_interval","length":5}"#).unwrap();
        assert_eq!(g, ConfinementGeometry::HalfInterval { length: 5.0 });
    }
}
