//! Least-squares fits of the regime scaling laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::analytic_energy;

/// Minimum number of points accepted by any fit.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `Δt = A log10(v) + B`; `slope` is A, `intercept` is B.
    LogLaw,
    /// `Δt = α v + β`; `slope` is α, `intercept` is β.
    LinearLaw,
    /// One segment of a two-piece line.
    PiecewiseLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        let abscissa = match self.model {
            FitModel::LogLaw => x.log10(),
            _ => x,
        };
        self.slope * abscissa + self.intercept
    }
}

/// Ordinary least-squares line through `(x, y)` pairs.
pub fn fit_line(points: &[(f64, f64)], model: FitModel) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(sxx, sxy), &(x, y)| {
        let dx = x - mean_x;
        (sxx + dx * dx, sxy + dx * (y - mean_y))
    });
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "abscissae are all equal".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss = points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>();
    Ok(FitResult {
        model,
        slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
        points: points.len(),
    })
}

/// Fits `Δt = A log10(v) + B` to `(v, Δt)` points with negative incident
/// energy.
pub fn fit_log_law(points: &[(f64, f64)], u: f64) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    for &(v, _) in points {
        if !(v > 0.0) || analytic_energy(v, u).e0 >= 0.0 {
            return Err(Error::OutOfRegime { v, regime: "I" });
        }
    }
    let logged: Vec<_> = points.iter().map(|&(v, t)| (v.log10(), t)).collect();
    fit_line(&logged, FitModel::LogLaw)
}

/// Fits `Δt = α v + β` to `(v, Δt)` points with `0 < E0 < q`.
pub fn fit_linear_law(points: &[(f64, f64)], q: f64, u: f64) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    for &(v, _) in points {
        let e0 = analytic_energy(v, u).e0;
        if !(e0 > 0.0 && e0 < q) {
            return Err(Error::OutOfRegime { v, regime: "II" });
        }
    }
    fit_line(points, FitModel::LinearLaw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_log_law() {
        let pts: Vec<_> = [0.15, 0.25, 0.35, 0.45, 0.55]
            .iter()
            .map(|&v: &f64| (v, 0.66 * v.log10() + 0.55))
            .collect();
        let fit = fit_log_law(&pts, 2.0).unwrap();
        assert!((fit.slope - 0.66).abs() < 1e-6);
        assert!((fit.intercept - 0.55).abs() < 1e-6);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.points, 5);
        assert!((fit.predict(0.3) - (0.66 * 0.3f64.log10() + 0.55)).abs() < 1e-9);
    }

    #[test]
    fn recovers_linear_law() {
        let pts: Vec<_> = (0..10)
            .map(|i| {
                let v = 0.7 + 0.13 * i as f64;
                (v, 0.045 * v + 0.404)
            })
            .collect();
        let fit = fit_linear_law(&pts, 2.0, 2.0).unwrap();
        assert!((fit.slope - 0.045).abs() < 1e-6);
        assert!((fit.intercept - 0.404).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        let three = [(0.2, 0.1), (0.3, 0.2), (0.4, 0.3)];
        assert_eq!(
            fit_log_law(&three, 2.0),
            Err(Error::InsufficientPoints { needed: 4, got: 3 })
        );
        let mixed = [(0.2, 0.1), (0.3, 0.2), (0.4, 0.3), (0.7, 0.4)];
        assert!(matches!(fit_log_law(&mixed, 2.0), Err(Error::OutOfRegime { v, .. }) if v == 0.7));
        let high = [(0.7, 0.1), (1.0, 0.2), (1.5, 0.3), (2.5, 0.4)];
        assert!(matches!(fit_linear_law(&high, 2.0, 2.0), Err(Error::OutOfRegime { .. })));
        let flat = [(1.0, 0.1), (1.0, 0.2), (1.0, 0.3), (1.0, 0.4)];
        assert!(fit_line(&flat, FitModel::PiecewiseLinear).is_err());
    }

    proptest! {
        #[test]
        fn exact_lines_recovered(a in -5.0f64..5.0, b in -5.0f64..5.0, x0 in -3.0f64..3.0, n in 4usize..30) {
            let pts: Vec<_> = (0..n).map(|i| { let x = x0 + 0.1 * i as f64; (x, a * x + b) }).collect();
            let fit = fit_line(&pts, FitModel::PiecewiseLinear).unwrap();
            prop_assert!((fit.slope - a).abs() < 1e-8);
            prop_assert!((fit.intercept - b).abs() < 1e-8);
            prop_assert!(fit.residual_rms.is_finite());
        }
    }
}
