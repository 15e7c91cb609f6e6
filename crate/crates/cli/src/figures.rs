//! Chart layouts for the velocity and width sweeps.

use tunnelclock::experiments::{FitResult, SweepTable, WidthSweepResult};
use tunnelclock::physics::analytic_energy;

use crate::plot::{Axis, Chart, Marker, RefLine, Series};

fn dense(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..=count).map(move |i| lo + (hi - lo) * i as f64 / count as f64)
}

fn regime_lines(table: &SweepTable) -> Vec<RefLine> {
    let (v0, vq) = table.regime_edges();
    vec![
        RefLine {
            value: v0,
            label: "E0 = 0".into(),
            color: "#c00000",
            dash: None,
            axis: Axis::Left,
        },
        RefLine {
            value: vq,
            label: "E0 = q".into(),
            color: "#008000",
            dash: None,
            axis: Axis::Left,
        },
    ]
}

/// Δt versus v with the classical and semiclassical references and the
/// regime fits.
pub fn tunneling_time_chart(table: &SweepTable, fits: &[FitResult]) -> Chart {
    let ok: Vec<_> = table
        .rows
        .iter()
        .filter_map(|r| r.dt_tunnel.map(|dt| (r.v, dt)))
        .collect();
    let (lo, hi) = table
        .rows
        .first()
        .zip(table.rows.last())
        .map(|(a, b)| (a.v, b.v))
        .unwrap_or((0.1, 4.0));
    let curve: Vec<f64> = dense(lo, hi, 400).collect();
    let classical = curve.iter().map(|&v| (v, table.w / v)).collect();
    let semiclassical = curve
        .iter()
        .map(|&v| {
            let gap = (table.q - analytic_energy(v, table.u).e0).abs();
            (v, table.w / (2.0 * gap).sqrt())
        })
        .collect();
    let y_max = ok.iter().map(|p| p.1).fold(0.0, f64::max).max(0.1) * 1.6;
    let y_min = ok.iter().map(|p| p.1).fold(0.0, f64::min);

    let mut series = vec![
        Series::markers("Δt (simulation)", ok, "#1f3a93", Marker::HollowCircle),
        Series::line("w/v", classical, "black"),
        Series::line("w/√(2|q−E0|)", semiclassical, "#555555").dashed("6 4"),
    ];
    for fit in fits {
        let (name, dash, range) = match fit.model {
            tunnelclock::experiments::FitModel::LogLaw => ("A log10 v + B", "8 3 2 3", (lo, table.regime_edges().0)),
            _ => ("α v + β", "2 3", (table.regime_edges().0, table.regime_edges().1)),
        };
        let pts = dense(range.0, range.1, 100).map(|v| (v, fit.predict(v))).collect();
        series.push(Series::line(name, pts, "#d35400").dashed(dash));
    }

    Chart {
        title: format!("Tunneling time, q = {}, w = {}", table.q, table.w),
        x_label: "incident velocity v".into(),
        y_label: "Δt".into(),
        y2_label: None,
        series,
        vlines: regime_lines(table),
        hlines: vec![],
        y_range: Some((y_min, y_max)),
    }
}

/// Initial energy (left) and transmission probability (right) versus v.
pub fn energy_transmission_chart(table: &SweepTable) -> Chart {
    let energy = table.rows.iter().map(|r| (r.v, r.e0)).collect();
    let transmission = table
        .rows
        .iter()
        .filter_map(|r| r.transmission.map(|t| (r.v, t)))
        .collect();
    let (v0, vq) = table.regime_edges();
    Chart {
        title: "Initial energy and transmission".into(),
        x_label: "incident velocity v".into(),
        y_label: "E0".into(),
        y2_label: Some("transmission T".into()),
        series: vec![
            Series::line("E0", energy, "black"),
            Series::markers("E0 = 0", vec![(v0, 0.0)], "#c00000", Marker::Circle),
            Series::markers("E0 = q", vec![(vq, table.q)], "#008000", Marker::Circle),
            Series::markers("T", transmission, "#1f3a93", Marker::HollowCircle).on(Axis::Right),
        ],
        vlines: regime_lines(table),
        hlines: vec![],
        y_range: None,
    }
}

/// Δt_max (ms, left) and v_m (mm/s, right) versus w with the critical
/// width and the reference velocities.
pub fn width_chart(result: &WidthSweepResult) -> Chart {
    let profile = result.species.profile();
    let mm_s = |v: f64| v * profile.velocity_unit * 1e3;
    let dt: Vec<_> = result
        .rows
        .iter()
        .filter_map(|r| r.dt_max_ms.map(|t| (r.w, t)))
        .collect();
    let vm = result
        .rows
        .iter()
        .filter_map(|r| r.v_m_mm_s.map(|v| (r.w, v)))
        .collect();
    let mut series = vec![
        Series::markers("Δt_max [ms]", dt, "black", Marker::Square),
        Series::markers("v_m [mm/s]", vm, "#c00000", Marker::Circle).on(Axis::Right),
    ];
    let mut vlines = Vec::new();
    if let Some(c) = &result.critical {
        vlines.push(RefLine {
            value: c.w_c,
            label: format!("w_c = {:.3} μm", c.w_c),
            color: "#888888",
            dash: Some("2 3"),
            axis: Axis::Left,
        });
        let first = result.rows.first().map_or(c.w_c, |r| r.w);
        let last = result.rows.last().map_or(c.w_c, |r| r.w);
        for (fit, lo, hi) in [(&result.below_fit, first, c.w_c), (&result.above_fit, c.w_c, last)] {
            if let Some(f) = fit {
                let pts = dense(lo, hi, 50).map(|w| (w, f.predict(w))).collect();
                series.push(Series::line(
                    format!("{:.2} w {:+.2} ms", f.slope, f.intercept),
                    pts,
                    "#1f3a93",
                ));
            }
        }
    }
    Chart {
        title: format!("Maximum tunneling time, {}", result.species),
        x_label: "barrier width w [μm]".into(),
        y_label: "Δt_max [ms]".into(),
        y2_label: Some("v_m [mm/s]".into()),
        series,
        vlines,
        hlines: vec![
            RefLine {
                value: mm_s(result.v_e),
                label: "v_E".into(),
                color: "#808000",
                dash: Some("8 3 2 3"),
                axis: Axis::Right,
            },
            RefLine {
                value: mm_s(result.v_q),
                label: "v_q".into(),
                color: "#1f77b4",
                dash: Some("2 3"),
                axis: Axis::Right,
            },
        ],
        y_range: None,
    }
}
