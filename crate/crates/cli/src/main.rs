mod config;
mod figures;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use tunnelclock::experiments::{
    find_max_tunneling_time, linspace_step, simulate, velocity_sweep, width_sweep,
    width_sweep_refined, Executor, FitResult, Regime, ScenarioConfig, SweepTable,
};
use tunnelclock::physics::{analytic_energy, classical_time, semiclassical_time};
use tunnelclock::units::{self, QuantityKind, Species};

use config::{parse_config, ConfigError, Overrides};
use output::OutDir;

/// `println!` that shrugs off a closed stdout, e.g. when piped into `head`.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const SCHEMA: &str = include_str!("../schema.json");

const COLUMNS_HELP: &str = "\
CSV columns (header row, `.` decimal separator, shortest round-trip doubles, empty = missing):
  sweep.csv (sweep-velocity):
    v, E0, t_in, t_out, dt_tunnel, transmission, t_classical, t_semiclassical, regime, status
  sweep.csv (sweep-width):
    w, dt_max, v_m, dt_max_ms, v_m_mm_s, energy_time, momentum_space, status
  boundary_record.csv (simulate):
    t, rho_L, rho_R
All quantities are dimensionless except the *_ms and *_mm_s columns.
`tunnelclock schema` prints the JSON schema of every output file.

Exit codes: 0 success, 1 invalid input, 2 numerics failure (partial results are still written).";

#[derive(Parser, Debug)]
#[command(name = "tunnelclock", version, about = "Bright-soliton tunneling-time simulator", after_help = COLUMNS_HELP)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` scenario file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also write SVG charts
    #[arg(long, global = true)]
    plot: bool,
    /// Worker threads for sweeps (0 = one per processor)
    #[arg(long, global = true, env = "TUNNELCLOCK_WORKERS", default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    w: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    v: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    sample_every: Option<usize>,
    #[arg(long, global = true)]
    t_final_cap: Option<f64>,
    /// Li7 or Rb87
    #[arg(long, global = true)]
    species: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One collision: result.json and boundary_record.csv
    Simulate,
    /// Tunneling time against incident velocity: sweep.csv, result.json, fig2a.svg, fig2b.svg
    SweepVelocity {
        #[arg(long, default_value_t = 0.1)]
        v_from: f64,
        #[arg(long, default_value_t = 4.0)]
        v_to: f64,
        #[arg(long, default_value_t = 0.05)]
        v_step: f64,
    },
    /// Maximum tunneling time over velocity at the configured barrier
    FindMax,
    /// Maximum tunneling time against barrier width: sweep.csv, result.json, fig3.svg
    SweepWidth {
        #[arg(long, default_value_t = 0.4)]
        w_from: f64,
        #[arg(long, default_value_t = 1.6)]
        w_to: f64,
        #[arg(long, default_value_t = 0.1)]
        w_step: f64,
        /// Extra spacing around the jump in v_m; 0 disables refinement
        #[arg(long, default_value_t = 0.025)]
        refine_step: f64,
    },
    /// Regime fits of an existing velocity sweep
    Fit {
        /// sweep.csv written by sweep-velocity
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        i_from: f64,
        #[arg(long, default_value_t = 0.55)]
        i_to: f64,
        #[arg(long, default_value_t = 0.65)]
        ii_from: f64,
        #[arg(long, default_value_t = 2.0)]
        ii_to: f64,
        /// Velocity band excluded around each regime edge
        #[arg(long, default_value_t = 0.05)]
        guard: f64,
    },
    /// Dimensionless value to SI (or back with --inverse)
    Convert {
        #[arg(long, allow_hyphen_values = true)]
        value: f64,
        /// time, velocity or length
        #[arg(long)]
        kind: QuantityKind,
        /// Treat --value as SI and print the dimensionless number
        #[arg(long)]
        inverse: bool,
    },
    /// Print the JSON schema of the output files
    Schema,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numerics(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<tunnelclock::Error> for CliError {
    fn from(e: tunnelclock::Error) -> Self {
        if e.is_numerics() {
            CliError::Numerics(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerics(_) => 2,
            _ => 1,
        }
    }
}

/// Successful runs may still carry failed rows, reported with exit code 2.
enum Outcome {
    Clean,
    PartialFailure(usize),
}

fn load_config(common: &Common) -> Result<ScenarioConfig, CliError> {
    let species = common
        .species
        .as_deref()
        .map(str::parse::<Species>)
        .transpose()?;
    let overrides = Overrides {
        q: common.q,
        w: common.w,
        u: common.u,
        x0: common.x0,
        v: common.v,
        x_min: common.x_min,
        x_max: common.x_max,
        n: common.n,
        dt: common.dt,
        sample_every: common.sample_every,
        t_final_cap: common.t_final_cap,
        species,
    };
    Ok(parse_config(common.config.as_deref(), &overrides)?)
}

fn regime_fits(table: &SweepTable, windows: [(f64, f64); 2], guard: f64) -> (Option<FitResult>, Option<FitResult>, Vec<String>) {
    let mut notes = Vec::new();
    let first = table
        .fit_regime_i(windows[0].0, windows[0].1, guard)
        .map_err(|e| notes.push(format!("regime I fit: {e}")))
        .ok();
    let second = table
        .fit_regime_ii(windows[1].0, windows[1].1, guard)
        .map_err(|e| notes.push(format!("regime II fit: {e}")))
        .ok();
    (first, second, notes)
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: &'a ScenarioConfig,
    table: &'a SweepTable,
    regime_i_fit: Option<FitResult>,
    regime_ii_fit: Option<FitResult>,
    regime_iii_violations: Vec<f64>,
    failed_rows: usize,
    notes: Vec<String>,
}

fn cmd_simulate(cfg: &ScenarioConfig, out: &mut OutDir) -> Result<Outcome, CliError> {
    let run = match simulate(cfg, false) {
        Ok(run) => run,
        Err(e) => {
            out.write_json("result.json", &json!({ "config": cfg, "status": e.to_string() }))?;
            return Err(e.into());
        }
    };
    let e0 = analytic_energy(cfg.v, cfg.u).e0;
    let r = &run.result;
    let summary = json!({
        "config": cfg,
        "E0": run.initial_energy,
        "regime": Regime::classify(e0, cfg.q),
        "t_in": r.t_in,
        "t_out": r.t_out,
        "dt_tunnel": r.dt_tunnel,
        "transmission": r.transmission,
        "t_classical": classical_time(cfg.w, cfg.v).ok(),
        "t_semiclassical": semiclassical_time(cfg.w, cfg.q, e0).ok(),
        "dt_tunnel_ms": units::to_si(r.dt_tunnel, QuantityKind::Time, &cfg.species.profile()) * 1e3,
        "diagnostics": r.diagnostics,
        "status": "ok",
    });
    out.write_json("result.json", &summary)?;
    let mut csv = Vec::new();
    run.record.write_csv(&mut csv)?;
    out.write("boundary_record.csv", &csv)?;
    say!(
        "v = {}: t_in = {:.6}, t_out = {:.6}, dt = {:.6}, T = {:.6}",
        cfg.v, r.t_in, r.t_out, r.dt_tunnel, r.transmission
    );
    Ok(Outcome::Clean)
}

fn cmd_sweep_velocity(
    cfg: &ScenarioConfig,
    exec: &Executor,
    (from, to, step): (f64, f64, f64),
    plot: bool,
    out: &mut OutDir,
) -> Result<Outcome, CliError> {
    if !(from > 0.0 && step > 0.0 && to >= from) {
        return Err(CliError::Invalid(
            "need 0 < v-from <= v-to and v-step > 0".into(),
        ));
    }
    let velocities = linspace_step(from, to, step);
    let table = velocity_sweep(cfg, &velocities, exec)?;
    let (regime_i_fit, regime_ii_fit, notes) = regime_fits(&table, [(0.15, 0.55), (0.65, 2.0)], 0.05);
    let failed_rows = table.rows.iter().filter(|r| !r.is_ok()).count();
    out.write("sweep.csv", &output::sweep_csv(&table)?)?;
    out.write_json(
        "result.json",
        &SweepSummary {
            config: cfg,
            table: &table,
            regime_i_fit,
            regime_ii_fit,
            regime_iii_violations: table.regime_iii_violations(),
            failed_rows,
            notes,
        },
    )?;
    if plot {
        let fits: Vec<_> = regime_i_fit.into_iter().chain(regime_ii_fit).collect();
        out.write("fig2a.svg", figures::tunneling_time_chart(&table, &fits).render().as_bytes())?;
        out.write("fig2b.svg", figures::energy_transmission_chart(&table).render().as_bytes())?;
    }
    say!("{} rows, {} failed", table.rows.len(), failed_rows);
    Ok(if failed_rows > 0 {
        Outcome::PartialFailure(failed_rows)
    } else {
        Outcome::Clean
    })
}

fn cmd_find_max(cfg: &ScenarioConfig, exec: &Executor, out: &mut OutDir) -> Result<Outcome, CliError> {
    let m = find_max_tunneling_time(cfg, exec)?;
    let profile = cfg.species.profile();
    let dt_ms = units::to_si(m.dt_max, QuantityKind::Time, &profile) * 1e3;
    let v_mm_s = units::to_si(m.v_m, QuantityKind::Velocity, &profile) * 1e3;
    out.write_json(
        "result.json",
        &json!({
            "config": cfg,
            "v_m": m.v_m,
            "dt_max": m.dt_max,
            "bracket": m.bracket,
            "evaluations": m.evaluations,
            "coarse": m.coarse,
            "species": cfg.species,
            "dt_max_ms": dt_ms,
            "v_m_mm_s": v_mm_s,
        }),
    )?;
    say!(
        "v_m = {:.4} ({v_mm_s:.4} mm/s), dt_max = {:.5} ({dt_ms:.4} ms) for {}",
        m.v_m, m.dt_max, cfg.species
    );
    Ok(Outcome::Clean)
}

fn cmd_sweep_width(
    cfg: &ScenarioConfig,
    exec: &Executor,
    (from, to, step, refine): (f64, f64, f64, f64),
    plot: bool,
    out: &mut OutDir,
) -> Result<Outcome, CliError> {
    if !(from > 0.0 && step > 0.0 && to >= from && refine >= 0.0) {
        return Err(CliError::Invalid(
            "need 0 < w-from <= w-to, w-step > 0 and refine-step >= 0".into(),
        ));
    }
    let widths = linspace_step(from, to, step);
    let result = if refine > 0.0 {
        width_sweep_refined(cfg, &widths, refine, cfg.species, exec)?
    } else {
        width_sweep(cfg, &widths, cfg.species, exec)?
    };
    let failed = result.rows.iter().filter(|r| r.dt_max.is_none()).count();
    out.write("sweep.csv", &output::width_csv(&result.rows)?)?;
    out.write_json("result.json", &json!({ "config": cfg, "result": result }))?;
    if plot {
        out.write("fig3.svg", figures::width_chart(&result).render().as_bytes())?;
    }
    match &result.critical {
        Some(c) => say!(
            "w_c = {:.4} um, v_m* = {:.4}, dt_max* = {:.4}, products = ({:.4}, {:.4})",
            c.w_c, c.v_m, c.dt_max, c.energy_time, c.momentum_space
        ),
        None => say!("critical width undefined: {}", result.notes.join("; ")),
    }
    Ok(if failed > 0 {
        Outcome::PartialFailure(failed)
    } else {
        Outcome::Clean
    })
}

fn cmd_fit(
    cfg: &ScenarioConfig,
    input: &std::path::Path,
    windows: [(f64, f64); 2],
    guard: f64,
    out: &mut OutDir,
) -> Result<Outcome, CliError> {
    let rows = output::read_sweep_csv(input)?;
    let table = SweepTable {
        q: cfg.q,
        w: cfg.w,
        u: cfg.u,
        rows,
    };
    let (first, second, notes) = regime_fits(&table, windows, guard);
    out.write_json(
        "result.json",
        &json!({
            "input": input.display().to_string(),
            "windows": { "regime_i": windows[0], "regime_ii": windows[1], "guard": guard },
            "regime_i_fit": first,
            "regime_ii_fit": second,
            "regime_iii_violations": table.regime_iii_violations(),
            "notes": notes,
        }),
    )?;
    if let Some(f) = first {
        say!("regime I:  dt = {:.4} log10(v) + {:.4}  (rms {:.2e}, {} points)", f.slope, f.intercept, f.residual_rms, f.points);
    }
    if let Some(f) = second {
        say!("regime II: dt = {:.4} v + {:.4}  (rms {:.2e}, {} points)", f.slope, f.intercept, f.residual_rms, f.points);
    }
    for n in &notes {
        eprintln!("{n}");
    }
    if first.is_none() && second.is_none() {
        return Err(CliError::Invalid(notes.join("; ")));
    }
    Ok(Outcome::Clean)
}

fn cmd_convert(cfg: &ScenarioConfig, value: f64, kind: QuantityKind, inverse: bool) -> Outcome {
    let profile = cfg.species.profile();
    let (scale, unit) = match kind {
        QuantityKind::Time => (1e3, "ms"),
        QuantityKind::Velocity => (1e3, "mm/s"),
        QuantityKind::Length => (1e6, "um"),
    };
    if inverse {
        let x = units::from_si(value, kind, &profile);
        say!("{x} (dimensionless {kind:?}, {})", profile.name);
    } else {
        let si = units::to_si(value, kind, &profile);
        say!(
            "{:.3} {unit} ({si:e} {}, {})",
            si * scale,
            kind.si_symbol(),
            profile.name
        );
    }
    Outcome::Clean
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Command::Schema = cli.command {
        say!("{}", SCHEMA.trim_end());
        return Ok(Outcome::Clean);
    }
    let cfg = load_config(&cli.common)?;
    if let Command::Convert { value, kind, inverse } = cli.command {
        return Ok(cmd_convert(&cfg, value, kind, inverse));
    }
    let exec = Executor::new(cli.common.workers);
    let mut out = OutDir::create(&cli.common.out)?;
    let plot = cli.common.plot;
    let outcome = match cli.command {
        Command::Simulate => cmd_simulate(&cfg, &mut out),
        Command::SweepVelocity { v_from, v_to, v_step } => {
            cmd_sweep_velocity(&cfg, &exec, (v_from, v_to, v_step), plot, &mut out)
        }
        Command::FindMax => cmd_find_max(&cfg, &exec, &mut out),
        Command::SweepWidth {
            w_from,
            w_to,
            w_step,
            refine_step,
        } => cmd_sweep_width(&cfg, &exec, (w_from, w_to, w_step, refine_step), plot, &mut out),
        Command::Fit {
            input,
            i_from,
            i_to,
            ii_from,
            ii_to,
            guard,
        } => cmd_fit(&cfg, &input, [(i_from, i_to), (ii_from, ii_to)], guard, &mut out),
        Command::Convert { .. } | Command::Schema => unreachable!("handled above"),
    }?;
    for path in &out.written {
        say!("wrote {}", path.display());
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::PartialFailure(n)) => {
            eprintln!("{n} rows failed; see the status column");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
