//! Scenario ingredients: the sech soliton, the square barrier, energy
//! functionals and the classical reference times.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, WaveField};

/// Soliton amplitude `1/√2`.
pub const SOLITON_AMPLITUDE: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Soliton width `2 asech(1/2) = 2 ln(2 + √3)`.
pub fn soliton_width() -> f64 {
    2.0 * (2.0 + 3f64.sqrt()).ln()
}

/// Square barrier of height `q` and width `w` centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub q: f64,
    pub w: f64,
}

impl BarrierSpec {
    pub fn new(q: f64, w: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("barrier height must be positive, got {q}"),
            });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "w",
                reason: format!("barrier width must be positive, got {w}"),
            });
        }
        Ok(Self { q, w })
    }

    pub fn x_left(&self) -> f64 {
        -0.5 * self.w
    }

    pub fn x_right(&self) -> f64 {
        0.5 * self.w
    }
}

/// Incident packet: centre `x0` and velocity `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub x0: f64,
    pub v: f64,
}

impl PacketSpec {
    pub fn new(x0: f64, v: f64) -> Self {
        Self { x0, v }
    }

    /// The packet must start more than 5 length units left of the barrier.
    pub fn check_clear_of(&self, barrier: &BarrierSpec) -> Result<()> {
        if self.x0 < barrier.x_left() - 5.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "x0",
                reason: format!(
                    "packet centre {} must lie left of {}",
                    self.x0,
                    barrier.x_left() - 5.0
                ),
            })
        }
    }
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self { x0: -15.0, v: 1.0 }
    }
}

/// Closed-form split of the initial soliton energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub e0: f64,
    /// intrinsic kinetic energy of the sech shape
    pub e_ks: f64,
    /// centre-of-mass kinetic energy
    pub e_kv: f64,
    /// interaction energy
    pub e_p: f64,
}

/// `ψ(x, 0) = (1/√2) sech(x - x0) e^{i v x}`, peaked at `x0`.
///
/// Fails if the packet density at either domain edge exceeds 1e-10.
pub fn init_soliton(grid: Arc<Grid>, spec: &PacketSpec) -> Result<WaveField> {
    let edge = |x: f64| 0.5 / (x - spec.x0).cosh().powi(2);
    let density = edge(grid.x_min()).max(edge(grid.x_max()));
    if !(density <= 1e-10) {
        return Err(Error::PacketTooWide { density });
    }
    let (x0, v) = (spec.x0, spec.v);
    Ok(WaveField::from_fn(grid, |x| {
        Complex64::from_polar(SOLITON_AMPLITUDE / (x - x0).cosh(), v * x)
    }))
}

/// Sharp square barrier: `q` where `|x| ≤ w/2`, zero elsewhere.
pub fn square_barrier(grid: &Grid, barrier: &BarrierSpec) -> Result<Vec<f64>> {
    if barrier.w >= grid.length() / 4.0 {
        return Err(Error::InvalidParameter {
            name: "w",
            reason: format!(
                "barrier width {} must be below a quarter of the domain ({})",
                barrier.w,
                grid.length() / 4.0
            ),
        });
    }
    let half = 0.5 * barrier.w;
    Ok(grid
        .positions()
        .map(|x| if x.abs() <= half { barrier.q } else { 0.0 })
        .collect())
}

/// Discrete energy `Σ (½|∂ψ/∂x|² + V|ψ|² - (u/2)|ψ|⁴) dx`, with the
/// gradient taken spectrally. The potential term is skipped when `potential`
/// is `None`.
pub fn energy(field: &WaveField, u: f64, potential: Option<&[f64]>) -> f64 {
    let grid = field.grid();
    let n = grid.len();
    let mut spectrum = field.amplitudes.clone();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut spectrum);
    let scale = 1.0 / n as f64;
    for (c, &k) in spectrum.iter_mut().zip(grid.k()) {
        *c *= Complex64::new(0.0, k * scale);
    }
    planner.plan_fft_inverse(n).process(&mut spectrum);

    let mut total = 0.0;
    for (i, (a, g)) in field.amplitudes.iter().zip(&spectrum).enumerate() {
        let rho = a.norm_sqr();
        let v = potential.map_or(0.0, |p| p[i]);
        total += 0.5 * g.norm_sqr() + v * rho - 0.5 * u * rho * rho;
    }
    total * grid.dx()
}

/// `E0(v, u) = (1 - u + 3v²) / 6` and its parts.
pub fn analytic_energy(v: f64, u: f64) -> EnergyBreakdown {
    let e_ks = 1.0 / 6.0;
    let e_kv = 0.5 * v * v;
    let e_p = -u / 6.0;
    EnergyBreakdown {
        e0: (1.0 - u + 3.0 * v * v) / 6.0,
        e_ks,
        e_kv,
        e_p,
    }
}

/// Inverse of [`analytic_energy`] in `v ≥ 0`: `v = √(2 E0 + (u - 1)/3)`.
///
/// For `u = 2` this is `√(2 E0 + 1/3)`. Energies below the resting soliton
/// are rejected.
pub fn velocity_at_energy(e0: f64, u: f64) -> Result<f64> {
    let floor = (1.0 - u) / 6.0;
    // tolerate round-off at the resting-soliton floor
    if e0 < floor - 1e-15 || !e0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "E0",
            reason: format!("energy {e0} lies below the resting soliton energy {floor}"),
        });
    }
    Ok((2.0 * e0 + (u - 1.0) / 3.0).max(0.0).sqrt())
}

fn positive_velocity(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "v",
            reason: format!("velocity must be positive, got {v}"),
        })
    }
}

/// De Broglie wavelength `2π / v`.
pub fn de_broglie(v: f64) -> Result<f64> {
    positive_velocity(v)?;
    Ok(2.0 * std::f64::consts::PI / v)
}

/// Free-flight traversal time `w / v`.
pub fn classical_time(w: f64, v: f64) -> Result<f64> {
    positive_velocity(v)?;
    Ok(w / v)
}

/// `w / √(2 |q - E0|)`; diverges when `|q - E0| < 1e-9`.
pub fn semiclassical_time(w: f64, q: f64, e0: f64) -> Result<f64> {
    let gap = (q - e0).abs();
    if gap < 1e-9 {
        return Err(Error::Divergent { gap });
    }
    Ok(w / (2.0 * gap).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(-60.0, 60.0, 4096).unwrap())
    }

    #[test]
    fn soliton_peak_sits_at_x0() {
        let g = grid();
        let field = init_soliton(g.clone(), &PacketSpec::new(-15.0, 0.0)).unwrap();
        let rho = field.density();
        let (imax, &peak) = rho
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((g.x(imax) + 15.0).abs() <= g.dx());
        assert_relative_eq!(peak, 0.5, epsilon = 1e-3);
        assert_relative_eq!(field.norm(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(soliton_width(), 2.634, epsilon = 1e-3);
    }

    #[test]
    fn soliton_rejects_wide_packet() {
        let g = Arc::new(Grid::new(-20.0, 20.0, 1024).unwrap());
        let err = init_soliton(g, &PacketSpec::new(-15.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::PacketTooWide { .. }));
    }

    #[test]
    fn barrier_sampling() {
        let g = grid();
        let b = BarrierSpec::new(2.0, 1.0).unwrap();
        let v = square_barrier(&g, &b).unwrap();
        let nonzero = v.iter().filter(|&&x| x != 0.0).count();
        assert!((33..=35).contains(&nonzero), "{nonzero} nonzero samples");
        assert!(v.iter().all(|&x| x == 0.0 || x == 2.0));
        assert_eq!(v.iter().cloned().fold(f64::MIN, f64::max), 2.0);
        assert_eq!(v.iter().cloned().fold(f64::MAX, f64::min), 0.0);
        let integral: f64 = v.iter().sum::<f64>() * g.dx();
        assert!((integral - 2.0).abs() <= 2.0 * g.dx());
        assert!(square_barrier(&g, &BarrierSpec::new(2.0, 31.0).unwrap()).is_err());
        assert!(BarrierSpec::new(-1.0, 1.0).is_err());
        assert!(BarrierSpec::new(1.0, 0.0).is_err());
    }

    #[test]
    fn numeric_energy_matches_closed_form() {
        let g = grid();
        for (v, expected) in [(0.0, -1.0 / 6.0), (2.0, 11.0 / 6.0)] {
            let f = init_soliton(g.clone(), &PacketSpec::new(-15.0, v)).unwrap();
            assert_relative_eq!(energy(&f, 2.0, None), expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn gaussian_at_rest_has_positive_energy() {
        let g = grid();
        let f = WaveField::from_fn(g, |x| Complex64::new((-x * x / 50.0).exp(), 0.0));
        assert!(energy(&f, 0.0, None) > 0.0);
    }

    #[test]
    fn closed_form_energy() {
        let e = analytic_energy(0.0, 2.0);
        assert_relative_eq!(e.e0, -1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(analytic_energy((1.0f64 / 3.0).sqrt(), 2.0).e0, 0.0, epsilon = 1e-15);
        assert_relative_eq!(analytic_energy((13.0f64 / 3.0).sqrt(), 2.0).e0, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn velocity_inversion() {
        assert_relative_eq!(velocity_at_energy(0.0, 2.0).unwrap(), 0.57735, epsilon = 1e-5);
        assert_relative_eq!(velocity_at_energy(2.0, 2.0).unwrap(), 2.08167, epsilon = 1e-5);
        assert_eq!(velocity_at_energy(-1.0 / 6.0, 2.0).unwrap(), 0.0);
        assert!(velocity_at_energy(-0.2, 2.0).is_err());
    }

    #[test]
    fn reference_lengths_and_times() {
        assert_relative_eq!(de_broglie((1.0f64 / 3.0).sqrt()).unwrap(), 10.883, epsilon = 1e-3);
        assert_relative_eq!(de_broglie(2.0 * std::f64::consts::PI).unwrap(), 1.0);
        assert_relative_eq!(de_broglie(2.0).unwrap(), std::f64::consts::PI);
        assert!(de_broglie(0.0).is_err());

        assert_eq!(classical_time(1.0, 2.0).unwrap(), 0.5);
        assert_eq!(classical_time(1.0, 4.0).unwrap(), 0.25);
        assert_eq!(classical_time(2.0, 2.0).unwrap(), 1.0);
        assert!(classical_time(1.0, -1.0).is_err());

        assert_relative_eq!(semiclassical_time(1.0, 2.0, 11.0 / 6.0).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(semiclassical_time(1.0, 2.0, 4.0).unwrap(), 0.5);
        assert!(matches!(semiclassical_time(1.0, 2.0, 2.0), Err(Error::Divergent { .. })));
    }

    proptest! {
        #[test]
        fn breakdown_sums(v in -5.0f64..5.0, u in 0.0f64..4.0) {
            let e = analytic_energy(v, u);
            prop_assert!((e.e0 - (e.e_ks + e.e_kv + e.e_p)).abs() < 1e-12);
        }

        #[test]
        fn velocity_energy_round_trip(e0 in -1.0f64 / 6.0..20.0) {
            let v = velocity_at_energy(e0, 2.0).unwrap();
            prop_assert!((analytic_energy(v, 2.0).e0 - e0).abs() < 1e-12);
        }

        #[test]
        fn semiclassical_symmetric(w in 0.1f64..3.0, q in 0.5f64..4.0, d in 0.01f64..3.0) {
            let above = semiclassical_time(w, q, q + d).unwrap();
            let below = semiclassical_time(w, q, q - d).unwrap();
            prop_assert!(above >= 0.0);
            prop_assert!((above - below).abs() < 1e-12);
        }
    }
}
