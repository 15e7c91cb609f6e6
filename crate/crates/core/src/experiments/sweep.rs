//! Tunneling time as a function of incident velocity.

use serde::{Deserialize, Serialize};

use super::exec::Executor;
use super::fit::{fit_linear_law, fit_log_law, FitResult};
use super::scenario::{initial_energy, simulate, ScenarioConfig};
use crate::error::{Error, Result};
use crate::physics::{analytic_energy, classical_time, semiclassical_time, velocity_at_energy};

/// Incident-energy regime. `E0 ≤ 0` is I, `0 < E0 ≤ q` is II, `E0 > q` is
/// III; rows exactly on a boundary go to the lower regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regime {
    I,
    II,
    III,
}

impl Regime {
    pub fn classify(e0: f64, q: f64) -> Self {
        if e0 <= 0.0 {
            Regime::I
        } else if e0 <= q {
            Regime::II
        } else {
            Regime::III
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::I => "I",
            Regime::II => "II",
            Regime::III => "III",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub v: f64,
    /// Two-term energy of the discretised initial packet.
    pub e0: f64,
    pub t_in: Option<f64>,
    pub t_out: Option<f64>,
    pub dt_tunnel: Option<f64>,
    pub transmission: Option<f64>,
    pub t_classical: f64,
    /// `None` where the semiclassical time diverges.
    pub t_semiclassical: Option<f64>,
    pub regime: Regime,
    /// `"ok"` or the failure message.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.dt_tunnel.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub q: f64,
    pub w: f64,
    pub u: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Velocities where `E0 = 0` and `E0 = q`.
    pub fn regime_edges(&self) -> (f64, f64) {
        regime_edges(self.q, self.u)
    }

    /// Successful `(v, Δt)` pairs in `regime` with `lo ≤ v ≤ hi`, skipping
    /// rows within `guard` of either regime edge.
    pub fn regime_points(&self, regime: Regime, lo: f64, hi: f64, guard: f64) -> Vec<(f64, f64)> {
        let (v0, vq) = self.regime_edges();
        self.rows
            .iter()
            .filter(|r| r.regime == regime && r.v >= lo - 1e-12 && r.v <= hi + 1e-12)
            .filter(|r| (r.v - v0).abs() >= guard && (r.v - vq).abs() >= guard)
            .filter_map(|r| r.dt_tunnel.map(|dt| (r.v, dt)))
            .collect()
    }

    /// Velocities of regime-III rows whose Δt falls outside
    /// `[w/v, w/√(2(E0 - q))]`.
    pub fn regime_iii_violations(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.regime == Regime::III)
            .filter_map(|r| {
                let dt = r.dt_tunnel?;
                let upper = r.t_semiclassical.unwrap_or(f64::INFINITY);
                (dt < r.t_classical || dt > upper).then_some(r.v)
            })
            .collect()
    }

    pub fn fit_regime_i(&self, lo: f64, hi: f64, guard: f64) -> Result<FitResult> {
        fit_log_law(&self.regime_points(Regime::I, lo, hi, guard), self.u)
    }

    pub fn fit_regime_ii(&self, lo: f64, hi: f64, guard: f64) -> Result<FitResult> {
        fit_linear_law(&self.regime_points(Regime::II, lo, hi, guard), self.q, self.u)
    }
}

/// `(v(E0 = 0), v(E0 = q))`.
pub fn regime_edges(q: f64, u: f64) -> (f64, f64) {
    let v0 = velocity_at_energy(0.0, u).unwrap_or(0.0);
    let vq = velocity_at_energy(q, u).unwrap_or(f64::NAN);
    (v0, vq)
}

/// `from, from + step, …` up to `to` inclusive (within round-off).
pub fn linspace_step(from: f64, to: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || to < from {
        return Vec::new();
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            // 0.4 + 2 * 0.1 is 0.6000000000000001; snap such values back
            let x = from + i as f64 * step;
            let snapped = (x * 1e9).round() / 1e9;
            if (x - snapped).abs() < 1e-12 {
                snapped
            } else {
                x
            }
        })
        .collect()
}

fn sweep_row(base: &ScenarioConfig, v: f64) -> SweepRow {
    let cfg = base.with_velocity(v);
    let e0_closed = analytic_energy(v, cfg.u).e0;
    let e0 = initial_energy(&cfg).unwrap_or(e0_closed);
    let mut row = SweepRow {
        v,
        e0,
        t_in: None,
        t_out: None,
        dt_tunnel: None,
        transmission: None,
        t_classical: classical_time(cfg.w, v).unwrap_or(f64::INFINITY),
        t_semiclassical: semiclassical_time(cfg.w, cfg.q, e0_closed).ok(),
        regime: Regime::classify(e0_closed, cfg.q),
        status: String::new(),
    };
    match simulate(&cfg, false) {
        Ok(run) => {
            row.t_in = Some(run.result.t_in);
            row.t_out = Some(run.result.t_out);
            row.dt_tunnel = Some(run.result.dt_tunnel);
            row.transmission = Some(run.result.transmission);
            row.status = "ok".into();
        }
        Err(e) => row.status = e.to_string(),
    }
    row
}

/// One collision per velocity. Failed rows are kept with their error in
/// `status`.
pub fn velocity_sweep(base: &ScenarioConfig, v_list: &[f64], exec: &Executor) -> Result<SweepTable> {
    base.with_velocity(v_list.first().copied().unwrap_or(1.0)).validate()?;
    if v_list.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "v_list",
            reason: "velocities must be positive".into(),
        });
    }
    if v_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "v_list",
            reason: "velocities must be strictly increasing".into(),
        });
    }
    let rows = exec.map(v_list, |&v| sweep_row(base, v));
    Ok(SweepTable {
        q: base.q,
        w: base.w,
        u: base.u,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn regime_labels() {
        assert_eq!(Regime::classify(-0.1, 2.0), Regime::I);
        assert_eq!(Regime::classify(0.0, 2.0), Regime::I);
        assert_eq!(Regime::classify(0.1, 2.0), Regime::II);
        assert_eq!(Regime::classify(2.0, 2.0), Regime::II);
        assert_eq!(Regime::classify(2.1, 2.0), Regime::III);
        let (v0, vq) = regime_edges(2.0, 2.0);
        assert!((v0 - 0.5774).abs() < 1e-4);
        assert!((vq - 2.0817).abs() < 1e-4);
    }

    #[test]
    fn step_lists() {
        let v = linspace_step(0.1, 4.0, 0.05);
        assert_eq!(v.len(), 79);
        assert_eq!(v[78], 4.0);
        assert_eq!(linspace_step(0.4, 1.6, 0.1)[2], 0.6);
        assert_eq!(linspace_step(1.0, 1.0, 0.1), vec![1.0]);
        assert!(linspace_step(2.0, 1.0, 0.1).is_empty());
    }

    #[test]
    fn rejects_unsorted() {
        let exec = Executor::sequential();
        let base = ScenarioConfig::default();
        assert!(velocity_sweep(&base, &[1.0, 0.5], &exec).is_err());
        assert!(velocity_sweep(&base, &[-1.0], &exec).is_err());
    }

    #[test]
    fn single_velocity_single_row() {
        let base = ScenarioConfig {
            n: 2048,
            ..Default::default()
        };
        let table = velocity_sweep(&base, &[3.0], &Executor::sequential()).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert!(row.is_ok(), "{}", row.status);
        assert_eq!(row.regime, Regime::III);
        assert!(table.regime_iii_violations().is_empty());
    }

    proptest! {
        #[test]
        fn regimes_partition_velocities(v in 0.0f64..6.0, q in 0.1f64..5.0) {
            let e0 = (3.0 * v * v - 1.0) / 6.0;
            let r = Regime::classify(e0, q);
            let expected = [e0 <= 0.0, e0 > 0.0 && e0 <= q, e0 > q];
            prop_assert_eq!(expected.iter().filter(|&&b| b).count(), 1);
            let idx = [Regime::I, Regime::II, Regime::III].iter().position(|&x| x == r).unwrap();
            prop_assert!(expected[idx]);
        }

        #[test]
        fn step_lists_are_sorted_and_bounded(from in 0.01f64..3.0, span in 0.0f64..3.0, step in 0.01f64..0.5) {
            let v = linspace_step(from, from + span, step);
            prop_assert!(!v.is_empty());
            prop_assert_eq!(v[0], from);
            prop_assert!(v.windows(2).all(|p| p[1] > p[0]));
            prop_assert!(*v.last().unwrap() <= from + span + 1e-9);
        }
    }
}
