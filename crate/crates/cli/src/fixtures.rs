//! Frozen run configurations for the five reference regimes.
//!
//! | n | potential                                   | f          | geometry  |
//! |---|---------------------------------------------|------------|-----------|
//! | 1 | `-3 e^{-x²}`                                | saturating | `[-5, 5]` |
//! | 2 | `-3 e^{-x²}` (x ≤ 0), `-3 e^{-3x²/2}` (x > 0) | saturating | `[-5, 5]` |
//! | 3 | as 2                                        | Kerr       | `[-5, 5]` |
//! | 4 | `3 e^{-(x - 2.5)²}`                         | Kerr       | `[0, 5]`  |
//! | 5 | `3 e^{-(x - 2)²}`                           | Kerr       | `[0, 5]`  |
//!
//! All use `γ = 1` and the default grid of 200 points on `[0.1, 10]`.

use std::path::Path;

use crate::config::RunConfig;

pub const FIGURES: std::ops::RangeInclusive<u8> = 1..=5;

const JSON: [&str; 5] = [
    include_str!("fixtures/fig1.json"),
    include_str!("fixtures/fig2.json"),
    include_str!("fixtures/fig3.json"),
    include_str!("fixtures/fig4.json"),
    include_str!("fixtures/fig5.json"),
];

/// Embedded JSON text of fixture `n`.
pub fn figure_json(n: u8) -> Option<&'static str> {
    FIGURES.contains(&n).then(|| JSON[n as usize - 1])
}

pub fn figure_config(n: u8) -> Option<RunConfig> {
    let text = figure_json(n)?;
    let cfg = RunConfig::from_json(text, Path::new(&format!("fig{n}.json")))
        .expect("embedded fixture parses");
    cfg.validate().expect("embedded fixture validates");
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nls_scatter::{ConfinementGeometry, NonlinearityKind, PotentialSpec, Regime};

    #[test]
    fn all_fixtures_load() {
        for n in FIGURES {
            let cfg = figure_config(n).unwrap();
            assert_eq!(cfg.nonlinearity.gamma, 1.0);
            assert_eq!(cfg.geometry.length(), 5.0);
            assert_eq!(cfg.grid.n_points, 200);
            assert!(cfg.verify_convergence);
        }
        assert!(figure_config(0).is_none());
        assert!(figure_config(9).is_none());
    }

    #[test]
    fn fixtures_match_reference_parameters() {
        let f = |n| figure_config(n).unwrap();
        assert_eq!(
            f(1).potential,
            PotentialSpec::Gaussian {
                v0: -3.0,
                width: 1.0
            }
        );
        assert_eq!(f(1).nonlinearity.kind, NonlinearityKind::Saturating);
        let piecewise = PotentialSpec::PiecewiseGaussian {
            v0: -3.0,
            width_left: 1.0,
            width_right: (2.0f64 / 3.0).sqrt(),
        };
        assert_eq!(f(2).potential, piecewise);
        assert_eq!(f(2).nonlinearity.kind, NonlinearityKind::Saturating);
        assert_eq!(f(3).potential, piecewise);
        assert_eq!(f(3).nonlinearity.kind, NonlinearityKind::Kerr);
        for (n, mu) in [(4, 0.5), (5, 0.4)] {
            assert_eq!(
                f(n).potential,
                PotentialSpec::ShiftedGaussian {
                    v0: 3.0,
                    mu,
                    length: 5.0,
                    width: 1.0
                }
            );
            assert_eq!(f(n).nonlinearity.kind, NonlinearityKind::Kerr);
            assert_eq!(
                f(n).geometry,
                ConfinementGeometry::HalfInterval { length: 5.0 }
            );
        }
        let regimes: Vec<u8> = FIGURES
            .map(|n| Regime::classify(&f(n).scatter_config()).number())
            .collect();
        assert_eq!(regimes, [1, 2, 2, 3, 4]);
    }
}
