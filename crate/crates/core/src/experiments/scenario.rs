use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chronometry::{
    density_at, extract_peaks, region_probability, BoundaryRecord, Diagnostics,
    TunnelingResult, CLEAR_DENSITY, DECAY_FRACTION,
};
use crate::error::{Error, Result};
use crate::physics::{energy, init_soliton, square_barrier, BarrierSpec, PacketSpec};
use crate::spectral::{Grid, SplitStepper, StepperConfig, WaveField};
use crate::units::Species;

/// Everything needed to run one collision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub q: f64,
    pub w: f64,
    pub u: f64,
    pub x0: f64,
    pub v: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dt: f64,
    pub sample_every: usize,
    /// Upper bound on simulated time; runs stop as soon as the collision
    /// is complete.
    pub t_final_cap: f64,
    pub species: Species,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            q: 2.0,
            w: 1.0,
            u: 2.0,
            x0: -15.0,
            v: 1.0,
            x_min: -60.0,
            x_max: 60.0,
            n: 4096,
            dt: 1e-3,
            sample_every: 10,
            t_final_cap: 400.0,
            species: Species::Rb87,
        }
    }
}

fn bounded(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("{value} outside [{lo}, {hi}]"),
        })
    }
}

impl ScenarioConfig {
    pub fn with_velocity(&self, v: f64) -> Self {
        Self { v, ..self.clone() }
    }

    pub fn with_width(&self, w: f64) -> Self {
        Self { w, ..self.clone() }
    }

    pub fn barrier(&self) -> BarrierSpec {
        BarrierSpec { q: self.q, w: self.w }
    }

    pub fn packet(&self) -> PacketSpec {
        PacketSpec::new(self.x0, self.v)
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig {
            dt: self.dt,
            sample_every: self.sample_every,
            t_final: self.t_final_cap,
        }
    }

    /// Range checks on every field; the error names the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0) || !self.q.is_finite() || self.q > 100.0 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("{} outside (0, 100]", self.q),
            });
        }
        if !(self.w > 0.0) || !self.w.is_finite() || self.w > 20.0 {
            return Err(Error::InvalidParameter {
                name: "w",
                reason: format!("{} outside (0, 20]", self.w),
            });
        }
        bounded("u", self.u, 0.0, 20.0)?;
        bounded("v", self.v, -20.0, 20.0)?;
        bounded("x_min", self.x_min, -1e4, 0.0)?;
        bounded("x_max", self.x_max, 0.0, 1e4)?;
        if !(self.x_min < 0.0 && self.x_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "x_min",
                reason: "domain must contain the origin strictly".into(),
            });
        }
        if self.n < 8 || !self.n.is_power_of_two() || self.n > 1 << 20 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("{} must be a power of two in [8, 2^20]", self.n),
            });
        }
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("{} outside (0, 0.1]", self.dt),
            });
        }
        if self.sample_every == 0 || self.sample_every > 1_000_000 {
            return Err(Error::InvalidParameter {
                name: "sample_every",
                reason: format!("{} outside [1, 1e6]", self.sample_every),
            });
        }
        if !(self.t_final_cap > 0.0 && self.t_final_cap <= 1e5) {
            return Err(Error::InvalidParameter {
                name: "t_final_cap",
                reason: format!("{} outside (0, 1e5]", self.t_final_cap),
            });
        }
        if self.w >= (self.x_max - self.x_min) / 4.0 {
            return Err(Error::InvalidParameter {
                name: "w",
                reason: "barrier wider than a quarter of the domain".into(),
            });
        }
        if !(self.x0 - self.x_min > 15.0) {
            return Err(Error::InvalidParameter {
                name: "x0",
                reason: format!("packet centre {} too close to x_min = {}", self.x0, self.x_min),
            });
        }
        self.packet().check_clear_of(&self.barrier())
    }
}

/// Energy bookkeeping over a run, potential term included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub initial: f64,
    pub last: f64,
    /// Largest `|E(t) - E(0)| / |E(0)|` seen at any sample.
    pub max_excursion: f64,
}

impl EnergyTrace {
    /// `|E(end) - E(0)| / |E(0)|`.
    pub fn relative_drift(&self) -> f64 {
        (self.last - self.initial).abs() / self.initial.abs()
    }
}

/// Full output of a collision run.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub result: TunnelingResult,
    pub record: BoundaryRecord,
    /// Two-term energy of the initial packet (no potential).
    pub initial_energy: f64,
    pub energy: Option<EnergyTrace>,
    /// `|N(t) - 1|` at each sample.
    pub norm_errors: Vec<f64>,
    pub final_field: WaveField,
}

struct CollisionWatch<'a> {
    barrier: BarrierSpec,
    record: BoundaryRecord,
    peak_l: (usize, f64),
    peak_r: (usize, f64),
    norm_errors: Vec<f64>,
    max_edge: f64,
    potential: Option<&'a [f64]>,
    u: f64,
    energy: Option<EnergyTrace>,
    measured: Option<(f64, f64)>,
}

impl CollisionWatch<'_> {
    fn complete(&self, rho_l: f64, rho_r: f64) -> bool {
        let last = self.record.len() - 1;
        self.peak_l.0 < last
            && self.peak_r.0 < last
            && rho_l < DECAY_FRACTION * self.peak_l.1
            && rho_r < DECAY_FRACTION * self.peak_r.1
            && rho_l < CLEAR_DENSITY
            && rho_r < CLEAR_DENSITY
    }

    fn observe(&mut self, field: &WaveField) -> ControlFlow<()> {
        self.norm_errors.push((field.norm() - 1.0).abs());
        self.max_edge = self.max_edge.max(field.edge_probability(2));
        if let (Some(potential), Some(trace)) = (self.potential, self.energy.as_mut()) {
            let e = energy(field, self.u, Some(potential));
            trace.last = e;
            let rel = (e - trace.initial).abs() / trace.initial.abs();
            trace.max_excursion = trace.max_excursion.max(rel);
        }

        let rho_l = density_at(field, self.barrier.x_left());
        let rho_r = density_at(field, self.barrier.x_right());
        let idx = self.record.len();
        self.record.push(field.t, rho_l, rho_r);
        if idx == 0 || rho_l > self.peak_l.1 {
            self.peak_l = (idx, rho_l);
        }
        if idx == 0 || rho_r > self.peak_r.1 {
            self.peak_r = (idx, rho_r);
        }
        if self.complete(rho_l, rho_r) {
            let x_r = self.barrier.x_right();
            let transmission = region_probability(field, |x| x > x_r).clamp(0.0, 1.0);
            self.measured = Some((field.t, transmission));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    }
}

/// Runs one collision until the chronometry completeness test passes.
///
/// With `track_energy` the full energy (potential included) is evaluated at
/// every sample, which costs one extra FFT pair per sample.
pub fn simulate(cfg: &ScenarioConfig, track_energy: bool) -> Result<ScenarioRun> {
    cfg.validate()?;
    let grid = Arc::new(Grid::new(cfg.x_min, cfg.x_max, cfg.n)?);
    let barrier = cfg.barrier();
    let field = init_soliton(grid.clone(), &cfg.packet())?;
    let potential = square_barrier(&grid, &barrier)?;
    let initial_energy = energy(&field, cfg.u, None);

    let energy_trace = track_energy.then(|| {
        let e = energy(&field, cfg.u, Some(&potential));
        EnergyTrace {
            initial: e,
            last: e,
            max_excursion: 0.0,
        }
    });

    let mut stepper = SplitStepper::new(grid, potential.clone(), cfg.u, cfg.dt)?;
    let mut watch = CollisionWatch {
        barrier,
        record: BoundaryRecord::new(),
        peak_l: (0, 0.0),
        peak_r: (0, 0.0),
        norm_errors: Vec::new(),
        max_edge: 0.0,
        potential: track_energy.then_some(&potential[..]),
        u: cfg.u,
        energy: energy_trace,
        measured: None,
    };
    let final_field = stepper.propagate(field, &cfg.stepper_config(), &mut |f: &WaveField| {
        watch.observe(f)
    })?;

    let Some((t_measure, transmission)) = watch.measured else {
        return Err(Error::TFinalCapExceeded {
            cap: cfg.t_final_cap,
        });
    };
    let (left, right) = extract_peaks(&watch.record)?;
    let max_norm_error = watch.norm_errors.iter().cloned().fold(0.0, f64::max);
    let result = TunnelingResult {
        t_in: left.time,
        t_out: right.time,
        dt_tunnel: right.time - left.time,
        transmission,
        diagnostics: Diagnostics {
            peak_rho_l: left.density,
            peak_rho_r: right.density,
            sharpness_l: left.sharpness,
            sharpness_r: right.sharpness,
            max_norm_error,
            max_edge_probability: watch.max_edge,
            t_measure,
        },
    };
    Ok(ScenarioRun {
        result,
        record: watch.record,
        initial_energy,
        energy: watch.energy,
        norm_errors: watch.norm_errors,
        final_field,
    })
}

/// Builds the grid, soliton and barrier, propagates, and measures the
/// tunneling time and transmission.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TunnelingResult> {
    simulate(cfg, false).map(|run| run.result)
}

/// Two-term energy of the initial packet on the configured grid.
pub fn initial_energy(cfg: &ScenarioConfig) -> Result<f64> {
    let grid = Arc::new(Grid::new(cfg.x_min, cfg.x_max, cfg.n)?);
    let field = init_soliton(grid, &cfg.packet())?;
    Ok(energy(&field, cfg.u, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn validation_names_the_field() {
        let cfg = ScenarioConfig {
            q: -1.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter { name: "q", .. })));
        let cfg = ScenarioConfig {
            n: 1000,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter { name: "n", .. })));
        let cfg = ScenarioConfig {
            x0: -2.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter { name: "x0", .. })));
    }

    #[test]
    fn slow_packet_hits_the_cap() {
        let cfg = ScenarioConfig {
            v: 0.5,
            t_final_cap: 5.0,
            n: 1024,
            ..Default::default()
        };
        assert_eq!(run_scenario(&cfg), Err(Error::TFinalCapExceeded { cap: 5.0 }));
    }
}
