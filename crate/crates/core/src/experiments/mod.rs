//! Velocity and width sweeps, regime fits and the maximum search.

pub mod exec;
pub mod fit;
pub mod maxsearch;
pub mod scenario;
pub mod sweep;
pub mod width;

pub use exec::Executor;
pub use fit::{fit_line, fit_linear_law, fit_log_law, FitModel, FitResult};
pub use maxsearch::{find_max_tunneling_time, golden_section_max, MaxSearchResult};
pub use scenario::{initial_energy, run_scenario, simulate, EnergyTrace, ScenarioConfig, ScenarioRun};
pub use sweep::{linspace_step, regime_edges, velocity_sweep, Regime, SweepRow, SweepTable};
pub use width::{
    uncertainty_products, width_sweep, width_sweep_refined, CriticalPoint, WidthRow,
    WidthSweepResult,
};
