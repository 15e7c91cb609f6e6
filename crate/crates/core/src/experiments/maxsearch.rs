//! Location of the maximum tunneling time over incident velocity.

use serde::{Deserialize, Serialize};

use super::exec::Executor;
use super::scenario::{run_scenario, ScenarioConfig};
use super::sweep::{linspace_step, regime_edges};
use crate::error::{Error, Result};

/// Coarse scan spacing in velocity.
pub const COARSE_STEP: f64 = 0.05;

/// Final bracket width of the golden-section refinement.
pub const VELOCITY_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxSearchResult {
    pub v_m: f64,
    pub dt_max: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// Coarse scan as `(v, Δt)`; failed points are omitted.
    pub coarse: Vec<(f64, f64)>,
}

/// Maximises `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`. `f_lo`/`f_hi` are the known end values. Returns the
/// best evaluated point, the final bracket and the number of new
/// evaluations.
pub fn golden_section_max<F>(
    mut f: F,
    (lo, f_lo): (f64, f64),
    (hi, f_hi): (f64, f64),
    tol: f64,
) -> Result<((f64, f64), (f64, f64), usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = if f_lo >= f_hi { (lo, f_lo) } else { (hi, f_hi) };
    let mut evals = 0;
    let mut eval = |x: f64, best: &mut (f64, f64)| -> Result<f64> {
        let y = f(x)?;
        evals += 1;
        if y > best.1 {
            *best = (x, y);
        }
        Ok(y)
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c, &mut best)?;
    let mut fd = eval(d, &mut best)?;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c, &mut best)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d, &mut best)?;
        }
    }
    Ok((best, (a, b), evals))
}

/// Coarse scan of Δt(v) over `[v(E0=0) + 0.05, v(E0=q) + 0.5]` followed by
/// golden-section refinement of the best coarse bracket.
pub fn find_max_tunneling_time(base: &ScenarioConfig, exec: &Executor) -> Result<MaxSearchResult> {
    let (v0, vq) = regime_edges(base.q, base.u);
    let grid = linspace_step(v0 + COARSE_STEP, vq + 0.5, COARSE_STEP);
    base.with_velocity(grid[0]).validate()?;
    let scan = exec.map(&grid, |&v| run_scenario(&base.with_velocity(v)).map(|r| r.dt_tunnel));
    let mut first_error = None;
    let coarse: Vec<(f64, f64)> = grid
        .iter()
        .zip(scan)
        .filter_map(|(&v, r)| match r {
            Ok(dt) => Some((v, dt)),
            Err(e) => {
                first_error.get_or_insert(e);
                None
            }
        })
        .collect();
    if coarse.len() < 3 {
        return Err(first_error.unwrap_or(Error::NoInteriorMaximum("lower")));
    }
    let best = coarse
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    if best == 0 {
        return Err(Error::NoInteriorMaximum("lower"));
    }
    if best + 1 == coarse.len() {
        return Err(Error::NoInteriorMaximum("upper"));
    }
    let ((v_m, dt_max), bracket, evals) = golden_section_max(
        |v| run_scenario(&base.with_velocity(v)).map(|r| r.dt_tunnel),
        coarse[best - 1],
        coarse[best + 1],
        VELOCITY_TOLERANCE,
    )?;
    // the coarse centre may still beat every refined point
    let (v_m, dt_max) = if coarse[best].1 > dt_max {
        coarse[best]
    } else {
        (v_m, dt_max)
    };
    Ok(MaxSearchResult {
        v_m,
        dt_max,
        bracket,
        evaluations: grid.len() + evals,
        coarse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let f = |x: f64| -(x - 1.2345f64).powi(2) + 3.0;
        let ((x, y), (a, b), evals) =
            golden_section_max(|x| Ok(f(x)), (1.0, f(1.0)), (1.5, f(1.5)), 1e-3).unwrap();
        assert!((x - 1.2345).abs() < 1e-3);
        assert!(y >= f(a) && y >= f(b));
        assert!(b - a <= 1e-3);
        assert!(evals > 5 && evals < 20);
    }

    #[test]
    fn golden_section_propagates_errors() {
        let r = golden_section_max(
            |_| Err(Error::NumericsFailure { step: 3 }),
            (0.0, 0.0),
            (1.0, 0.0),
            1e-3,
        );
        assert_eq!(r.unwrap_err(), Error::NumericsFailure { step: 3 });
    }

    proptest! {
        #[test]
        fn golden_section_brackets_any_parabola(peak in 0.6f64..2.4, curv in 0.1f64..10.0) {
            let f = |x: f64| -curv * (x - peak).powi(2);
            let ((x, _), (a, b), _) =
                golden_section_max(|x| Ok(f(x)), (0.5, f(0.5)), (2.5, f(2.5)), VELOCITY_TOLERANCE).unwrap();
            prop_assert!((x - peak).abs() <= VELOCITY_TOLERANCE);
            prop_assert!(a <= x && x <= b && b - a <= VELOCITY_TOLERANCE);
        }
    }
}
