//! Flat `key = value` scenario files with command-line overrides.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;
use tunnelclock::experiments::ScenarioConfig;
use tunnelclock::units::Species;

/// Keys accepted in a config file, in documentation order.
#[cfg(test)]
pub const KEYS: [&str; 12] = [
    "q",
    "w",
    "u",
    "x0",
    "v",
    "x_min",
    "x_max",
    "n",
    "dt",
    "sample_every",
    "t_final_cap",
    "species",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: cannot parse `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("{}`{key}` out of bounds: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    OutOfBounds {
        line: Option<usize>,
        key: String,
        reason: String,
    },
}

/// Values given on the command line; each one beats the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub q: Option<f64>,
    pub w: Option<f64>,
    pub u: Option<f64>,
    pub x0: Option<f64>,
    pub v: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub sample_every: Option<usize>,
    pub t_final_cap: Option<f64>,
    pub species: Option<Species>,
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn apply(cfg: &mut ScenarioConfig, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "q" => cfg.q = parse_value(line, key, value)?,
        "w" => cfg.w = parse_value(line, key, value)?,
        "u" => cfg.u = parse_value(line, key, value)?,
        "x0" => cfg.x0 = parse_value(line, key, value)?,
        "v" => cfg.v = parse_value(line, key, value)?,
        "x_min" => cfg.x_min = parse_value(line, key, value)?,
        "x_max" => cfg.x_max = parse_value(line, key, value)?,
        "n" => cfg.n = parse_value(line, key, value)?,
        "dt" => cfg.dt = parse_value(line, key, value)?,
        "sample_every" => cfg.sample_every = parse_value(line, key, value)?,
        "t_final_cap" => cfg.t_final_cap = parse_value(line, key, value)?,
        "species" => cfg.species = parse_value(line, key, value)?,
        _ => {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })
        }
    }
    Ok(())
}

/// Parses config text. Returns the config and the line each key came from.
pub fn parse_text(text: &str) -> Result<(ScenarioConfig, HashMap<String, usize>), ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut lines = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::Malformed { line })?;
        let (key, value) = (key.trim(), value.trim());
        apply(&mut cfg, line, key, value)?;
        lines.insert(key.to_string(), line);
    }
    Ok((cfg, lines))
}

/// Defaults, then the file (if any), then the flags; validated.
pub fn parse_config(path: Option<&Path>, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let (mut cfg, mut lines) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_text(&text)?
        }
        None => (ScenarioConfig::default(), HashMap::new()),
    };

    macro_rules! take {
        ($($field:ident),*) => {$(
            if let Some(value) = overrides.$field {
                cfg.$field = value;
                lines.remove(stringify!($field));
            }
        )*};
    }
    take!(q, w, u, x0, v, x_min, x_max, n, dt, sample_every, t_final_cap, species);

    cfg.validate().map_err(|e| match e {
        tunnelclock::Error::InvalidParameter { name, reason } => ConfigError::OutOfBounds {
            line: lines.get(name).copied(),
            key: name.to_string(),
            reason,
        },
        other => ConfigError::OutOfBounds {
            line: None,
            key: "config".into(),
            reason: other.to_string(),
        },
    })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_file_gives_defaults() {
        let f = file("");
        let cfg = parse_config(Some(f.path()), &Overrides::default()).unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!((cfg.q, cfg.w, cfg.u, cfg.x0), (2.0, 1.0, 2.0, -15.0));
    }

    #[test]
    fn flags_beat_file() {
        let f = file("# barrier\nw = 1.5\nq=2.5   # taller\n");
        let over = Overrides {
            w: Some(0.8),
            ..Default::default()
        };
        let cfg = parse_config(Some(f.path()), &over).unwrap();
        assert_eq!(cfg.w, 0.8);
        assert_eq!(cfg.q, 2.5);
    }

    #[test]
    fn bounds_error_names_key_and_line() {
        let f = file("w = 1\nq = -1\n");
        let err = parse_config(Some(f.path()), &Overrides::default()).unwrap_err();
        match &err {
            ConfigError::OutOfBounds { line, key, .. } => {
                assert_eq!(key, "q");
                assert_eq!(*line, Some(2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().starts_with("line 2: `q` out of bounds"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            parse_text("q = 2\nfoo = 1"),
            Err(ConfigError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(
            parse_text("\n\nn = lots"),
            Err(ConfigError::BadValue { line: 3, .. })
        ));
        assert!(matches!(parse_text("q 2"), Err(ConfigError::Malformed { line: 1 })));
        assert!(matches!(
            parse_text("species = He4"),
            Err(ConfigError::BadValue { line: 1, .. })
        ));
    }

    #[test]
    fn every_key_is_accepted() {
        let text: String = KEYS
            .iter()
            .map(|k| match *k {
                "species" => "species = Li7\n".to_string(),
                "n" => "n = 2048\n".to_string(),
                "sample_every" => "sample_every = 5\n".to_string(),
                "x_min" => "x_min = -50\n".to_string(),
                "x0" => "x0 = -14\n".to_string(),
                other => format!("{other} = 1.0\n"),
            })
            .collect();
        let (cfg, lines) = parse_text(&text).unwrap();
        assert_eq!(lines.len(), KEYS.len());
        assert_eq!(cfg.species, Species::Li7);
        assert_eq!(cfg.n, 2048);
    }
}
