//! CSV and JSON writers for the result types.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tunnelclock::experiments::{Regime, SweepRow, SweepTable, WidthRow};

pub const SWEEP_COLUMNS: [&str; 10] = [
    "v",
    "E0",
    "t_in",
    "t_out",
    "dt_tunnel",
    "transmission",
    "t_classical",
    "t_semiclassical",
    "regime",
    "status",
];

pub const WIDTH_COLUMNS: [&str; 8] = [
    "w",
    "dt_max",
    "v_m",
    "dt_max_ms",
    "v_m_mm_s",
    "energy_time",
    "momentum_space",
    "status",
];

#[cfg(test)]
pub const BOUNDARY_COLUMNS: [&str; 3] = ["t", "rho_L", "rho_R"];

/// One `sweep.csv` line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    pub v: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub t_in: Option<f64>,
    pub t_out: Option<f64>,
    pub dt_tunnel: Option<f64>,
    pub transmission: Option<f64>,
    pub t_classical: f64,
    pub t_semiclassical: Option<f64>,
    pub regime: Regime,
    pub status: String,
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            v: r.v,
            e0: r.e0,
            t_in: r.t_in,
            t_out: r.t_out,
            dt_tunnel: r.dt_tunnel,
            transmission: r.transmission,
            t_classical: r.t_classical,
            t_semiclassical: r.t_semiclassical,
            regime: r.regime,
            status: r.status.clone(),
        }
    }
}

impl From<SweepCsvRow> for SweepRow {
    fn from(r: SweepCsvRow) -> Self {
        Self {
            v: r.v,
            e0: r.e0,
            t_in: r.t_in,
            t_out: r.t_out,
            dt_tunnel: r.dt_tunnel,
            transmission: r.transmission,
            t_classical: r.t_classical,
            t_semiclassical: r.t_semiclassical,
            regime: r.regime,
            status: r.status,
        }
    }
}

pub fn sweep_csv(table: &SweepTable) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &table.rows {
        w.serialize(SweepCsvRow::from(row))?;
    }
    if table.rows.is_empty() {
        w.write_record(SWEEP_COLUMNS)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, csv::Error> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize::<SweepCsvRow>()
        .map(|row| row.map(SweepRow::from))
        .collect()
}

pub fn width_csv(rows: &[WidthRow]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(WIDTH_COLUMNS)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Output directory plus a list of what was written.
pub struct OutDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: f64, ok: bool) -> SweepRow {
        SweepRow {
            v,
            e0: 0.5 * v * v - 1.0 / 6.0,
            t_in: ok.then_some(7.25),
            t_out: ok.then_some(7.75),
            dt_tunnel: ok.then_some(0.1 + 0.2),
            transmission: ok.then_some(0.5),
            t_classical: 1.0 / v,
            t_semiclassical: None,
            regime: Regime::II,
            status: if ok { "ok".into() } else { "collision incomplete, \"left\"".into() },
        }
    }

    #[test]
    fn sweep_csv_header_and_precision() {
        let table = SweepTable {
            q: 2.0,
            w: 1.0,
            u: 2.0,
            rows: vec![row(2.0, true), row(2.05, false)],
        };
        let bytes = sweep_csv(&table).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS.join(","));
        // shortest round-trip representation keeps every digit of 0.1 + 0.2
        assert!(text.contains("0.30000000000000004"));
        assert!(text.contains("\"collision incomplete, \"\"left\"\"\""));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        fs::write(&path, bytes).unwrap();
        let back = read_sweep_csv(&path).unwrap();
        assert_eq!(back, table.rows);
    }

    #[test]
    fn width_csv_header() {
        let text = String::from_utf8(width_csv(&[]).unwrap()).unwrap();
        assert_eq!(text.trim_end(), WIDTH_COLUMNS.join(","));
    }
}
