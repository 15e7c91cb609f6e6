//! Boundary-density recording and the entry/exit-time measurement.
//!
//! The entry moment `t_in` is the time at which the density at the left
//! barrier edge is globally maximal, the exit moment `t_out` the same for
//! the right edge. Their difference is the tunneling time.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Boundary, Error, Result};
use crate::physics::BarrierSpec;
use crate::spectral::{Grid, WaveField};

/// Density threshold below which the packet counts as clear of an edge.
pub const CLEAR_DENSITY: f64 = 1e-4;

/// Fraction of its peak a boundary series must decay to before the
/// collision counts as complete.
pub const DECAY_FRACTION: f64 = 0.01;

/// Time series of `|ψ|²` at the two barrier edges.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub times: Vec<f64>,
    pub rho_l: Vec<f64>,
    pub rho_r: Vec<f64>,
}

impl BoundaryRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Appends one sample. Times must strictly increase.
    pub fn push(&mut self, t: f64, rho_l: f64, rho_r: f64) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.rho_l.push(rho_l);
        self.rho_r.push(rho_r);
    }

    /// CSV with header `t,rho_L,rho_R` and shortest round-trip floats.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,rho_L,rho_R")?;
        for ((t, l), r) in self.times.iter().zip(&self.rho_l).zip(&self.rho_r) {
            writeln!(out, "{t:?},{l:?},{r:?}")?;
        }
        Ok(())
    }
}

/// Peak shape at one boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakInfo {
    pub time: f64,
    pub density: f64,
    /// `-ρ''/ρ` at the peak from the three-point stencil (units of 1/time²).
    pub sharpness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub peak_rho_l: f64,
    pub peak_rho_r: f64,
    pub sharpness_l: f64,
    pub sharpness_r: f64,
    /// Largest `|N(t) - 1|` over all samples.
    pub max_norm_error: f64,
    /// Largest probability within two points of the domain edge.
    pub max_edge_probability: f64,
    /// Time at which the transmission was measured.
    pub t_measure: f64,
}

/// Outcome of one collision run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelingResult {
    pub t_in: f64,
    pub t_out: f64,
    pub dt_tunnel: f64,
    pub transmission: f64,
    pub diagnostics: Diagnostics,
}

/// `|ψ|²` linearly interpolated at position `x` (periodic wrap at the end).
pub fn density_at(field: &WaveField, x: f64) -> f64 {
    let grid: &Grid = field.grid();
    let n = grid.len();
    let f = (x - grid.x_min()) / grid.dx();
    let i = f.floor();
    let a = f - i;
    let i = (i as i64).rem_euclid(n as i64) as usize;
    let j = (i + 1) % n;
    (1.0 - a) * field.amplitudes[i].norm_sqr() + a * field.amplitudes[j].norm_sqr()
}

/// Appends `(t, ρ(x_L), ρ(x_R))` for the current field.
pub fn sample_boundaries(field: &WaveField, barrier: &BarrierSpec, record: &mut BoundaryRecord) {
    record.push(
        field.t,
        density_at(field, barrier.x_left()),
        density_at(field, barrier.x_right()),
    );
}

fn argmax(series: &[f64]) -> Option<usize> {
    series
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &y)| match best {
            Some((_, b)) if b >= y => best,
            _ => Some((i, y)),
        })
        .map(|(i, _)| i)
}

/// Global maximum refined by the vertex of the parabola through the three
/// samples around it.
fn refined_peak(times: &[f64], series: &[f64], side: Boundary) -> Result<PeakInfo> {
    let i = argmax(series).ok_or(Error::DegeneratePeak(side))?;
    if i == 0 || i + 1 == series.len() {
        return Err(Error::DegeneratePeak(side));
    }
    let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
    let (y0, y1, y2) = (series[i - 1], series[i], series[i + 1]);
    // divided differences
    let d01 = (y1 - y0) / (t1 - t0);
    let d12 = (y2 - y1) / (t2 - t1);
    let curvature = (d12 - d01) / (t2 - t0);
    let (time, density) = if curvature < 0.0 {
        let vertex = 0.5 * (t0 + t1) - 0.5 * d01 / curvature;
        let vertex = vertex.clamp(t0, t2);
        let value = y1 + (vertex - t1) * (d01 + curvature * (vertex - t0));
        (vertex, value.max(y1))
    } else {
        (t1, y1)
    };
    let sharpness = if y1 > 0.0 { -2.0 * curvature / y1 } else { 0.0 };
    Ok(PeakInfo {
        time,
        density,
        sharpness,
    })
}

/// Peak information at both boundaries, in `(left, right)` order.
///
/// Errors with `DegeneratePeak` when a maximum sits on the first or last
/// sample, and with `CollisionIncomplete` when a series has not decayed
/// below 1% of its peak by the final sample.
pub fn extract_peaks(record: &BoundaryRecord) -> Result<(PeakInfo, PeakInfo)> {
    let left = refined_peak(&record.times, &record.rho_l, Boundary::Left)?;
    let right = refined_peak(&record.times, &record.rho_r, Boundary::Right)?;
    for (series, side) in [(&record.rho_l, Boundary::Left), (&record.rho_r, Boundary::Right)] {
        let peak = series.iter().cloned().fold(f64::MIN, f64::max);
        let last = *series.last().expect("non-empty after peak search");
        if !(last < DECAY_FRACTION * peak) {
            return Err(Error::CollisionIncomplete(side));
        }
    }
    Ok((left, right))
}

/// `(t_in, t_out)` from a completed boundary record.
pub fn extract_times(record: &BoundaryRecord) -> Result<(f64, f64)> {
    let (l, r) = extract_peaks(record)?;
    Ok((l.time, r.time))
}

/// Probability right of the barrier, `Σ_{x_i > x_R} |ψ_i|² dx`.
///
/// Only meaningful once the packet has left the barrier: fails when either
/// boundary density is at or above 1e-4.
pub fn tunneling_probability(field: &WaveField, barrier: &BarrierSpec) -> Result<f64> {
    let density = density_at(field, barrier.x_left()).max(density_at(field, barrier.x_right()));
    if density >= CLEAR_DENSITY {
        return Err(Error::InteractionOngoing { density });
    }
    Ok(region_probability(field, |x| x > barrier.x_right()))
}

/// `Σ |ψ_i|² dx` over grid points satisfying `inside`.
pub fn region_probability(field: &WaveField, inside: impl Fn(f64) -> bool) -> f64 {
    let grid = field.grid();
    field
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| inside(grid.x(*i)))
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        * grid.dx()
}
