//! Periodic grid, wave-field storage and the Strang split-step integrator
//! for the attractive cubic Schrödinger equation
//!
//! ```text
//! i ∂ψ/∂t = [ -½ ∂²/∂x² + V(x) - u |ψ|² ] ψ
//! ```
//!
//! The kinetic part is solved exactly in Fourier space, the potential and
//! nonlinear part exactly in real space (|ψ|² is invariant under the
//! pointwise phase, so the nonlinear sub-step needs no iteration).

use std::f64::consts::PI;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic lattice on `[x_min, x_max)` with its FFT wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
    k: Vec<f64>,
}

impl Grid {
    /// Builds a grid of `n` points. `n` must be a power of two, at least 8.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count {n} must be a power of two and at least 8"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "degenerate interval [{x_min}, {x_max}]"
            )));
        }
        let length = x_max - x_min;
        let dx = length / n as f64;
        let dk = 2.0 * PI / length;
        let half = (n / 2) as i64;
        let k = (0..n as i64)
            .map(|j| {
                let signed = if j < half { j } else { j - n as i64 };
                dk * signed as f64
            })
            .collect();
        Ok(Self {
            x_min,
            x_max,
            n,
            dx,
            k,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Wavenumbers in standard FFT ordering.
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }
}

/// Complex amplitudes on a grid at simulation time `t`.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: Arc<Grid>,
    pub amplitudes: Vec<Complex64>,
    pub t: f64,
}

impl WaveField {
    pub fn new(grid: Arc<Grid>, amplitudes: Vec<Complex64>, t: f64) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            t,
        })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.positions().map(f).collect();
        Self {
            grid,
            amplitudes,
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Discrete norm `Σ |ψ_i|² dx`.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Centre of mass `Σ x_i |ψ_i|² dx / N`.
    pub fn centroid(&self) -> f64 {
        let dx = self.grid.dx();
        let first = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| self.grid.x(i) * a.norm_sqr())
            .sum::<f64>()
            * dx;
        first / self.norm()
    }

    /// Probability held within `points` grid points of either domain edge.
    pub fn edge_probability(&self, points: usize) -> f64 {
        let n = self.amplitudes.len();
        let points = points.min(n / 2);
        let head = &self.amplitudes[..points];
        let tail = &self.amplitudes[n - points..];
        head.iter().chain(tail).map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Time-stepping controls for [`SplitStepper::propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub sample_every: usize,
    pub t_final: f64,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_every",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                reason: format!("must be positive, got {}", self.t_final),
            });
        }
        Ok(())
    }

    /// Whole number of steps covering `t_final`.
    pub fn steps(&self) -> u64 {
        let raw = self.t_final / self.dt;
        let rounded = raw.round();
        // absorb representation error in t_final / dt before rounding up
        if (raw - rounded).abs() < 1e-9 * raw.max(1.0) {
            rounded as u64
        } else {
            raw.ceil() as u64
        }
    }
}

/// Receives the field at each sampling point of a propagation.
///
/// Returning `ControlFlow::Break` ends the propagation after the current
/// sample.
pub trait Observer {
    fn observe(&mut self, field: &WaveField) -> ControlFlow<()>;
}

impl<F: FnMut(&WaveField) -> ControlFlow<()>> Observer for F {
    fn observe(&mut self, field: &WaveField) -> ControlFlow<()> {
        self(field)
    }
}

/// Observer that ignores every sample.
pub struct NoObserver;

impl Observer for NoObserver {
    fn observe(&mut self, _: &WaveField) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

/// Strang splitting integrator with cached FFT plans and kinetic phases.
pub struct SplitStepper {
    grid: Arc<Grid>,
    potential: Vec<f64>,
    u: f64,
    dt: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `exp(-i k² dt / 2) / n`, folding the inverse-FFT normalisation in.
    kinetic: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(grid: Arc<Grid>, potential: Vec<f64>, u: f64, dt: f64) -> Result<Self> {
        if potential.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "potential has {} samples for a grid of {} points",
                potential.len(),
                grid.len()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scale = 1.0 / n as f64;
        let kinetic = grid
            .k()
            .iter()
            .map(|&k| Complex64::from_polar(scale, -0.5 * k * k * dt))
            .collect();
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            grid,
            potential,
            u,
            dt,
            forward,
            inverse,
            kinetic,
            scratch: vec![Complex64::default(); scratch_len],
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Pointwise `exp(-i [V - u|ψ|²] h)`.
    fn nonlinear_phase(&self, amplitudes: &mut [Complex64], h: f64) {
        let u = self.u;
        for (a, &v) in amplitudes.iter_mut().zip(&self.potential) {
            let phase = -(v - u * a.norm_sqr()) * h;
            let (s, c) = phase.sin_cos();
            *a *= Complex64::new(c, s);
        }
    }

    fn kinetic_step(&mut self, amplitudes: &mut [Complex64]) {
        self.forward
            .process_with_scratch(amplitudes, &mut self.scratch);
        for (a, f) in amplitudes.iter_mut().zip(&self.kinetic) {
            *a *= f;
        }
        self.inverse
            .process_with_scratch(amplitudes, &mut self.scratch);
    }

    /// One full Strang step: half nonlinear, full kinetic, half nonlinear.
    pub fn step(&mut self, field: &mut WaveField) {
        let half = 0.5 * self.dt;
        self.nonlinear_phase(&mut field.amplitudes, half);
        self.kinetic_step(&mut field.amplitudes);
        self.nonlinear_phase(&mut field.amplitudes, half);
        field.t += self.dt;
    }

    /// Advances `field` to `cfg.t_final` past its current time.
    ///
    /// The observer sees the field at the start, after every
    /// `cfg.sample_every` steps, and at the final step (once, if that step
    /// is also a sampling step). Between samples, the trailing half-step of
    /// one step and the leading half-step of the next are fused into a
    /// single full nonlinear phase, which is the same map since |ψ|² is
    /// unchanged by it. Amplitudes are checked for NaN/Inf at each sample.
    pub fn propagate<O: Observer + ?Sized>(
        &mut self,
        mut field: WaveField,
        cfg: &StepperConfig,
        observer: &mut O,
    ) -> Result<WaveField> {
        cfg.validate()?;
        if (cfg.dt - self.dt).abs() > f64::EPSILON * self.dt {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!(
                    "stepper was built for dt = {}, config asks for {}",
                    self.dt, cfg.dt
                ),
            });
        }
        let steps = cfg.steps();
        let every = cfg.sample_every as u64;
        let t0 = field.t;
        let half = 0.5 * self.dt;

        if observer.observe(&field).is_break() {
            return Ok(field);
        }
        // true when the leading half-step of the upcoming step was already applied
        let mut open = false;
        for s in 1..=steps {
            if !open {
                self.nonlinear_phase(&mut field.amplitudes, half);
            }
            self.kinetic_step(&mut field.amplitudes);
            let sample = s % every == 0 || s == steps;
            if sample {
                self.nonlinear_phase(&mut field.amplitudes, half);
                open = false;
                field.t = t0 + s as f64 * self.dt;
                if !field.is_finite() {
                    return Err(Error::NumericsFailure { step: s });
                }
                if observer.observe(&field).is_break() {
                    break;
                }
            } else {
                self.nonlinear_phase(&mut field.amplitudes, self.dt);
                open = true;
            }
        }
        Ok(field)
    }
}
