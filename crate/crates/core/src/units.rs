//! Conversion between dimensionless simulation quantities and SI.
//!
//! Lengths are measured in `l0 = 1 μm`, times in `m l0² / ħ` and
//! velocities in `ħ / (m l0)`, so only the atomic mass selects the scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Length unit `l0`, m.
pub const LENGTH_UNIT: f64 = 1e-6;

/// ⁸⁷Rb atomic mass in u (AME2016).
pub const RB87_MASS_U: f64 = 86.909_180_531;

/// ⁷Li atomic mass in u (AME2016).
pub const LI7_MASS_U: f64 = 7.016_003_437;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    Li7,
    Rb87,
}

impl Species {
    pub const ALL: [Species; 2] = [Species::Li7, Species::Rb87];

    pub fn name(self) -> &'static str {
        match self {
            Species::Li7 => "Li7",
            Species::Rb87 => "Rb87",
        }
    }

    pub fn mass(self) -> f64 {
        match self {
            Species::Li7 => LI7_MASS_U * ATOMIC_MASS_UNIT,
            Species::Rb87 => RB87_MASS_U * ATOMIC_MASS_UNIT,
        }
    }

    pub fn profile(self) -> SpeciesProfile {
        SpeciesProfile::new(self.name(), self.mass())
    }
}

impl std::str::FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Li7" => Ok(Species::Li7),
            "Rb87" => Ok(Species::Rb87),
            other => Err(Error::UnknownSpecies(other.to_string())),
        }
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Unit scales for one atomic species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesProfile {
    pub name: String,
    /// kg
    pub mass: f64,
    /// s
    pub time_unit: f64,
    /// m/s
    pub velocity_unit: f64,
    /// m
    pub length_unit: f64,
}

impl SpeciesProfile {
    pub fn new(name: &str, mass: f64) -> Self {
        assert!(mass > 0.0, "atomic mass must be positive");
        Self {
            name: name.to_string(),
            mass,
            time_unit: mass * LENGTH_UNIT * LENGTH_UNIT / HBAR,
            velocity_unit: HBAR / (mass * LENGTH_UNIT),
            length_unit: LENGTH_UNIT,
        }
    }

    fn unit(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Time => self.time_unit,
            QuantityKind::Velocity => self.velocity_unit,
            QuantityKind::Length => self.length_unit,
        }
    }
}

/// Profile for a species by name (`"Li7"` or `"Rb87"`).
pub fn species(name: &str) -> Result<SpeciesProfile> {
    Ok(name.parse::<Species>()?.profile())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantityKind {
    Time,
    Velocity,
    Length,
}

impl QuantityKind {
    pub fn si_symbol(self) -> &'static str {
        match self {
            QuantityKind::Time => "s",
            QuantityKind::Velocity => "m/s",
            QuantityKind::Length => "m",
        }
    }
}

impl std::str::FromStr for QuantityKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "time" => Ok(QuantityKind::Time),
            "velocity" => Ok(QuantityKind::Velocity),
            "length" => Ok(QuantityKind::Length),
            other => Err(format!("unknown quantity kind `{other}` (time, velocity, length)")),
        }
    }
}

pub fn to_si(value: f64, kind: QuantityKind, profile: &SpeciesProfile) -> f64 {
    value * profile.unit(kind)
}

pub fn from_si(value: f64, kind: QuantityKind, profile: &SpeciesProfile) -> f64 {
    value / profile.unit(kind)
}
