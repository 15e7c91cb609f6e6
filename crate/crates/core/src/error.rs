use thiserror::Error;

/// Failures surfaced by the simulation and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite amplitude detected at step {step}")]
    NumericsFailure { step: u64 },

    #[error("initial packet density at the domain edge is {density:e} (limit 1e-10)")]
    PacketTooWide { density: f64 },

    #[error("collision incomplete: {0} boundary density has not decayed below 1% of its peak")]
    CollisionIncomplete(Boundary),

    #[error("degenerate peak: {0} boundary maximum lies at the first or last sample")]
    DegeneratePeak(Boundary),

    #[error("interaction ongoing: boundary density {density:e} exceeds 1e-4")]
    InteractionOngoing { density: f64 },

    #[error("semiclassical time diverges: |q - E0| = {gap:e}")]
    Divergent { gap: f64 },

    #[error("t_final cap {cap} exceeded before the collision completed")]
    TFinalCapExceeded { cap: f64 },

    #[error("fit needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("point v = {v} lies outside the {regime} regime")]
    OutOfRegime { v: f64, regime: &'static str },

    #[error("no interior maximum: coarse scan peaks at the {0} edge")]
    NoInteriorMaximum(&'static str),

    #[error("critical width undefined: {0}")]
    UndefinedCriticalWidth(String),

    #[error("unknown species `{0}` (known: Li7, Rb87)")]
    UnknownSpecies(String),
}

/// Which barrier edge a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Left => f.write_str("left"),
            Boundary::Right => f.write_str("right"),
        }
    }
}

impl Error {
    /// True for failures of the integrator or measurement (as opposed to bad input).
    pub fn is_numerics(&self) -> bool {
        !matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidParameter { .. }
                | Error::UnknownSpecies(_)
                | Error::InsufficientPoints { .. }
                | Error::OutOfRegime { .. }
                | Error::PacketTooWide { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
