//! Maximum tunneling time versus barrier width, critical-width detection
//! and the uncertainty products.

use serde::{Deserialize, Serialize};

use super::exec::Executor;
use super::fit::{fit_line, FitModel, FitResult};
use super::maxsearch::find_max_tunneling_time;
use super::scenario::ScenarioConfig;
use crate::error::{Error, Result};
use crate::physics::velocity_at_energy;
use crate::units::{to_si, QuantityKind, Species};

/// Fewest valid rows needed on each side of the critical width.
pub const MIN_ROWS_PER_SIDE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthRow {
    pub w: f64,
    pub dt_max: Option<f64>,
    pub v_m: Option<f64>,
    pub dt_max_ms: Option<f64>,
    pub v_m_mm_s: Option<f64>,
    pub energy_time: Option<f64>,
    pub momentum_space: Option<f64>,
    pub status: String,
}

impl WidthRow {
    fn valid(&self) -> Option<(f64, f64, f64)> {
        Some((self.w, self.dt_max?, self.v_m?))
    }
}

/// Quantities at the detected critical width, linearly interpolated between
/// the two rows bracketing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub w_c: f64,
    pub v_m: f64,
    pub dt_max: f64,
    pub energy_time: f64,
    pub momentum_space: f64,
    /// Width of the row interval in which `v_m` changes fastest.
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthSweepResult {
    pub q: f64,
    pub u: f64,
    pub species: Species,
    /// `v(E0 = q)`
    pub v_e: f64,
    /// `√(2q)`
    pub v_q: f64,
    pub rows: Vec<WidthRow>,
    pub critical: Option<CriticalPoint>,
    /// `Δt_max` in ms against `w` in μm, rows below `w_c`.
    pub below_fit: Option<FitResult>,
    /// Same, rows above `w_c`.
    pub above_fit: Option<FitResult>,
    /// Why `critical` or a fit is missing, if it is.
    pub notes: Vec<String>,
}

/// `(½(v_E² - v_m²) Δt_max, (v_q - v_m) w)` with `m = ħ = 1`.
pub fn uncertainty_products(v_m: f64, dt_max: f64, w: f64, q: f64, u: f64) -> Result<(f64, f64)> {
    let v_e = velocity_at_energy(q, u)?;
    if !(v_m < v_e) {
        return Err(Error::InvalidParameter {
            name: "v_m",
            reason: format!("{v_m} must be below v_E = {v_e}"),
        });
    }
    let v_q = (2.0 * q).sqrt();
    Ok((0.5 * (v_e * v_e - v_m * v_m) * dt_max, (v_q - v_m) * w))
}

fn max_row(base: &ScenarioConfig, w: f64, species: Species, exec: &Executor) -> WidthRow {
    let profile = species.profile();
    match find_max_tunneling_time(&base.with_width(w), exec) {
        Ok(m) => {
            let products = uncertainty_products(m.v_m, m.dt_max, w, base.q, base.u).ok();
            WidthRow {
                w,
                dt_max: Some(m.dt_max),
                v_m: Some(m.v_m),
                dt_max_ms: Some(to_si(m.dt_max, QuantityKind::Time, &profile) * 1e3),
                v_m_mm_s: Some(to_si(m.v_m, QuantityKind::Velocity, &profile) * 1e3),
                energy_time: products.map(|p| p.0),
                momentum_space: products.map(|p| p.1),
                status: "ok".into(),
            }
        }
        Err(e) => WidthRow {
            w,
            dt_max: None,
            v_m: None,
            dt_max_ms: None,
            v_m_mm_s: None,
            energy_time: None,
            momentum_space: None,
            status: e.to_string(),
        },
    }
}

fn check_widths(w_list: &[f64]) -> Result<()> {
    if w_list.iter().any(|&w| !(w > 0.0)) || w_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidParameter {
            name: "w_list",
            reason: "widths must be positive and strictly increasing".into(),
        });
    }
    Ok(())
}

/// Index `i` of the row pair `(i, i + 1)` with the largest `|Δv_m / Δw|`.
fn steepest_interval(valid: &[(f64, f64, f64)]) -> Option<usize> {
    valid
        .windows(2)
        .map(|p| ((p[1].2 - p[0].2) / (p[1].0 - p[0].0)).abs())
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Critical width, piecewise fits and products from finished rows.
pub fn assemble(q: f64, u: f64, species: Species, mut rows: Vec<WidthRow>) -> Result<WidthSweepResult> {
    rows.sort_by(|a, b| a.w.total_cmp(&b.w));
    let v_e = velocity_at_energy(q, u)?;
    let v_q = (2.0 * q).sqrt();
    let valid: Vec<_> = rows.iter().filter_map(WidthRow::valid).collect();
    let mut notes = Vec::new();
    let mut critical = None;
    let mut below_fit = None;
    let mut above_fit = None;

    match steepest_interval(&valid) {
        Some(i) if i + 1 >= MIN_ROWS_PER_SIDE && valid.len() - i - 1 >= MIN_ROWS_PER_SIDE => {
            let (lo, hi) = (valid[i], valid[i + 1]);
            let w_c = 0.5 * (lo.0 + hi.0);
            let dt_max = 0.5 * (lo.1 + hi.1);
            let v_m = 0.5 * (lo.2 + hi.2);
            let (energy_time, momentum_space) = uncertainty_products(v_m, dt_max, w_c, q, u)?;
            critical = Some(CriticalPoint {
                w_c,
                v_m,
                dt_max,
                energy_time,
                momentum_space,
                interval: (lo.0, hi.0),
            });
            let profile = species.profile();
            let ms = |dt: f64| to_si(dt, QuantityKind::Time, &profile) * 1e3;
            let below: Vec<_> = valid[..=i].iter().map(|r| (r.0, ms(r.1))).collect();
            let above: Vec<_> = valid[i + 1..].iter().map(|r| (r.0, ms(r.1))).collect();
            match fit_line(&below, FitModel::PiecewiseLinear) {
                Ok(f) => below_fit = Some(f),
                Err(e) => notes.push(format!("below-w_c fit: {e}")),
            }
            match fit_line(&above, FitModel::PiecewiseLinear) {
                Ok(f) => above_fit = Some(f),
                Err(e) => notes.push(format!("above-w_c fit: {e}")),
            }
        }
        Some(i) => notes.push(
            Error::UndefinedCriticalWidth(format!(
                "steepest v_m change between rows {} and {} leaves fewer than {MIN_ROWS_PER_SIDE} valid rows on one side",
                i,
                i + 1
            ))
            .to_string(),
        ),
        None => notes.push(
            Error::UndefinedCriticalWidth("fewer than two valid rows".into()).to_string(),
        ),
    }

    Ok(WidthSweepResult {
        q,
        u,
        species,
        v_e,
        v_q,
        rows,
        critical,
        below_fit,
        above_fit,
        notes,
    })
}

/// One maximum search per width, then critical-width detection and the
/// piecewise-linear fits of `Δt_max(w)` in SI units for `species`.
pub fn width_sweep(
    base: &ScenarioConfig,
    w_list: &[f64],
    species: Species,
    exec: &Executor,
) -> Result<WidthSweepResult> {
    check_widths(w_list)?;
    let rows = exec.map(w_list, |&w| max_row(base, w, species, exec));
    assemble(base.q, base.u, species, rows)
}

/// Extra widths at spacing `step` across the steepest interval of `coarse`
/// and the interval on either side of it.
pub fn refinement_widths(coarse: &WidthSweepResult, step: f64) -> Vec<f64> {
    let valid: Vec<_> = coarse.rows.iter().filter_map(WidthRow::valid).collect();
    let Some(i) = steepest_interval(&valid) else {
        return Vec::new();
    };
    let lo = valid[i.saturating_sub(1)].0;
    let hi = valid[(i + 2).min(valid.len() - 1)].0;
    let existing: Vec<f64> = coarse.rows.iter().map(|r| r.w).collect();
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (1..count)
        .map(|k| lo + k as f64 * step)
        // keep the decimal grid tidy
        .map(|w| (w * 1e9).round() / 1e9)
        .filter(|w| existing.iter().all(|e| (e - w).abs() > 1e-9))
        .collect()
}

/// Coarse width sweep followed by a refinement pass around the jump in
/// `v_m`.
pub fn width_sweep_refined(
    base: &ScenarioConfig,
    coarse_widths: &[f64],
    refine_step: f64,
    species: Species,
    exec: &Executor,
) -> Result<WidthSweepResult> {
    let coarse = width_sweep(base, coarse_widths, species, exec)?;
    let extra = refinement_widths(&coarse, refine_step);
    if extra.is_empty() {
        return Ok(coarse);
    }
    let mut rows = coarse.rows;
    rows.extend(exec.map(&extra, |&w| max_row(base, w, species, exec)));
    assemble(base.q, base.u, species, rows)
}
