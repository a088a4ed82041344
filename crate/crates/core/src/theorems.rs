//! Classification of a sweep against the reciprocity/unitarity regimes.
//!
//! | regime | geometry       | profile    | R reciprocal | T reciprocal | R + T = 1 |
//! |--------|----------------|------------|--------------|--------------|-----------|
//! | 1      | `[−L, L]`      | symmetric  | yes          | yes          | yes       |
//! | 2      | `[−L, L]`      | asymmetric | yes          | no           | no        |
//! | 3      | `[0, L]`       | symmetric  | yes          | yes          | no        |
//! | 4      | `[0, L]`       | asymmetric | no           | no           | no        |
//!
//! A linear interior (`γ = 0`) restores all three properties in every regime.

use std::fmt;

use serde::Serialize;

use crate::models::ConfinementGeometry;
use crate::scalar::Real;
use crate::scattering::ScatterConfig;
use crate::sweep::SweepTable;

/// A measured maximum below this means the property holds.
pub const HOLDS_BELOW: f64 = 1e-6;
/// A measured maximum above this means the property is violated.
pub const VIOLATED_ABOVE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    SymmetricConfinementEvenProfile,
    SymmetricConfinementAsymmetricProfile,
    HalfIntervalEvenProfile,
    HalfIntervalAsymmetricProfile,
}

impl Regime {
    pub fn classify<T: Real>(cfg: &ScatterConfig<T>) -> Self {
        match (cfg.geometry, cfg.is_symmetric()) {
            (ConfinementGeometry::Symmetric { .. }, true) => Self::SymmetricConfinementEvenProfile,
            (ConfinementGeometry::Symmetric { .. }, false) => {
                Self::SymmetricConfinementAsymmetricProfile
            }
            (ConfinementGeometry::HalfInterval { .. }, true) => Self::HalfIntervalEvenProfile,
            (ConfinementGeometry::HalfInterval { .. }, false) => {
                Self::HalfIntervalAsymmetricProfile
            }
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            Self::SymmetricConfinementEvenProfile => 1,
            Self::SymmetricConfinementAsymmetricProfile => 2,
            Self::HalfIntervalEvenProfile => 3,
            Self::HalfIntervalAsymmetricProfile => 4,
        }
    }

    /// Expected `[R reciprocity, T reciprocity, unitarity]` with nonlinearity on.
    fn expected_nonlinear(&self) -> [bool; 3] {
        match self {
            Self::SymmetricConfinementEvenProfile => [true, true, true],
            Self::SymmetricConfinementAsymmetricProfile => [true, false, false],
            Self::HalfIntervalEvenProfile => [true, true, false],
            Self::HalfIntervalAsymmetricProfile => [false, false, false],
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::SymmetricConfinementEvenProfile => "confinement [-L, L], symmetric V",
            Self::SymmetricConfinementAsymmetricProfile => "confinement [-L, L], asymmetric V",
            Self::HalfIntervalEvenProfile => "confinement [0, L], V symmetric about L/2",
            Self::HalfIntervalAsymmetricProfile => "confinement [0, L], asymmetric V",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    ReflectivityReciprocity,
    TransmissivityReciprocity,
    Unitarity,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ReflectivityReciprocity => "R reciprocity",
            Self::TransmissivityReciprocity => "T reciprocity",
            Self::Unitarity => "unitarity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Observation {
    Holds,
    Violated,
    Inconclusive,
}

impl Observation {
    pub fn from_max(measured: f64) -> Self {
        if measured < HOLDS_BELOW {
            Self::Holds
        } else if measured > VIOLATED_ABOVE {
            Self::Violated
        } else {
            Self::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: Property,
    pub expected_to_hold: bool,
    pub measured_max: f64,
    pub observed: Observation,
}

impl PropertyCheck {
    /// Observation agrees with the regime's prediction.
    pub fn as_expected(&self) -> bool {
        matches!(
            (self.expected_to_hold, self.observed),
            (true, Observation::Holds) | (false, Observation::Violated)
        )
    }

    /// Observation contradicts the prediction (inconclusive is not a contradiction).
    pub fn contradicts(&self) -> bool {
        matches!(
            (self.expected_to_hold, self.observed),
            (true, Observation::Violated) | (false, Observation::Holds)
        )
    }

    pub fn verdict(&self) -> &'static str {
        match (self.observed, self.as_expected()) {
            (Observation::Holds, true) => "PASS",
            (Observation::Violated, true) => "FAIL-as-expected",
            (Observation::Inconclusive, _) => "INCONCLUSIVE",
            (Observation::Holds, false) => "PASS-unexpected",
            (Observation::Violated, false) => "FAIL-unexpected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub regime: Regime,
    pub linear: bool,
    pub checks: Vec<PropertyCheck>,
}

impl TheoremReport {
    pub fn check(&self, property: Property) -> &PropertyCheck {
        self.checks
            .iter()
            .find(|c| c.property == property)
            .expect("every property is checked")
    }

    /// No property contradicts the regime's prediction.
    pub fn conforms(&self) -> bool {
        !self.checks.iter().any(PropertyCheck::contradicts)
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "regime {} ({}){}",
            self.regime.number(),
            self.regime.description(),
            if self.linear { ", linear interior" } else { "" }
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<15} expected {:<8} max = {:.11e}  {}",
                c.property.to_string(),
                if c.expected_to_hold {
                    "holds"
                } else {
                    "violated"
                },
                c.measured_max,
                c.verdict()
            )?;
        }
        Ok(())
    }
}

/// Compares the measured maxima of `table` with the regime predicted by `cfg`.
pub fn theorem_report<T: Real>(table: &SweepTable<T>, cfg: &ScatterConfig<T>) -> TheoremReport {
    let regime = Regime::classify(cfg);
    let linear = cfg.nonlinearity.is_linear();
    let expected = if linear {
        [true; 3]
    } else {
        regime.expected_nonlinear()
    };
    let s = &table.summary;
    let measured = [
        s.max_reflectivity_gap.as_f64(),
        s.max_transmissivity_gap.as_f64(),
        s.max_defect().as_f64(),
    ];
    let props = [
        Property::ReflectivityReciprocity,
        Property::TransmissivityReciprocity,
        Property::Unitarity,
    ];
    let checks = props
        .iter()
        .zip(expected)
        .zip(measured)
        .map(
            |((&property, expected_to_hold), measured_max)| PropertyCheck {
                property,
                expected_to_hold,
                measured_max,
                observed: Observation::from_max(measured_max),
            },
        )
        .collect();
    TheoremReport {
        regime,
        linear,
        checks,
    }
}
