//! Flat `key = value` scenario files.
//!
//! One assignment per line; `#` starts a comment. Unset keys keep their
//! defaults, which reproduce the reference evaluation setup. Power levels are
//! given in dBm and the reference gain in dB; both are converted to linear
//! values when a scenario is built.

use std::fmt::{self, Write as _};

use airs_core::bench::BaseParams;
use airs_core::channel::{ArrayGeometry, RadioParams, DEFAULT_WAVELENGTH};
use airs_core::geometry::{AreaGrid, TargetArea};
use airs_core::placement::{Scenario, SearchRange};
use airs_core::units::{db_to_linear, dbm_to_watts};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` set twice")]
    Duplicate(String),
    #[error("`{key}`: cannot parse `{value}` as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("`{key}` {constraint}, got {value}")]
    OutOfRange {
        key: &'static str,
        constraint: &'static str,
        value: String,
    },
}

/// Scenario settings as written in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub h: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub beta0_db: f64,
    pub m: usize,
    pub nx: usize,
    pub ny: usize,
    pub dx_bar: f64,
    pub dy_bar: f64,
    pub wavelength: f64,
    pub center_x: f64,
    pub length: f64,
    pub width: f64,
    /// Defaults to `-5 H` when unset.
    pub q_min: Option<f64>,
    /// Defaults to the area centre when unset.
    pub q_max: Option<f64>,
    pub step: f64,
    pub grid_nx: usize,
    pub grid_ny: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            h: 100.0,
            tx_power_dbm: 20.0,
            noise_dbm: -110.0,
            beta0_db: -40.0,
            m: 64,
            nx: 256,
            ny: 1,
            dx_bar: 0.1,
            dy_bar: 0.1,
            wavelength: DEFAULT_WAVELENGTH,
            center_x: 1000.0,
            length: 1000.0,
            width: 600.0,
            q_min: None,
            q_max: None,
            step: 1.0,
            grid_nx: 101,
            grid_ny: 61,
        }
    }
}

/// Every accepted key, in serialization order.
pub const KEYS: [&str; 18] = [
    "H",
    "tx_power_dbm",
    "noise_dbm",
    "beta0_db",
    "M",
    "Nx",
    "Ny",
    "dx_bar",
    "dy_bar",
    "wavelength",
    "center_x",
    "Dx",
    "Dy",
    "q_min",
    "q_max",
    "step",
    "grid_nx",
    "grid_ny",
];

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        expected: "a number",
    })?;
    if !v.is_finite() {
        return Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            expected: "a finite number",
        });
    }
    Ok(v)
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        expected: "a non-negative integer",
    })
}

/// Replaces typographic minus signs so `−110` parses like `-110`.
fn normalize(value: &str) -> String {
    value.trim().replace(['\u{2212}', '\u{2013}'], "-")
}

impl ScenarioConfig {
    /// Sets one key from its textual value, without range checks.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = normalize(value);
        let v = value.as_str();
        match key {
            "H" => self.h = parse_f64(key, v)?,
            "tx_power_dbm" => self.tx_power_dbm = parse_f64(key, v)?,
            "noise_dbm" => self.noise_dbm = parse_f64(key, v)?,
            "beta0_db" => self.beta0_db = parse_f64(key, v)?,
            "M" => self.m = parse_count(key, v)?,
            "Nx" => self.nx = parse_count(key, v)?,
            "Ny" => self.ny = parse_count(key, v)?,
            "dx_bar" => self.dx_bar = parse_f64(key, v)?,
            "dy_bar" => self.dy_bar = parse_f64(key, v)?,
            "wavelength" => self.wavelength = parse_f64(key, v)?,
            "center_x" => self.center_x = parse_f64(key, v)?,
            "Dx" => self.length = parse_f64(key, v)?,
            "Dy" => self.width = parse_f64(key, v)?,
            "q_min" => self.q_min = Some(parse_f64(key, v)?),
            "q_max" => self.q_max = Some(parse_f64(key, v)?),
            "step" => self.step = parse_f64(key, v)?,
            "grid_nx" => self.grid_nx = parse_count(key, v)?,
            "grid_ny" => self.grid_ny = parse_count(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: 0,
            text: assignment.to_string(),
        })?;
        self.set(k.trim(), v)?;
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |ok: bool, key: &'static str, constraint: &'static str, value: String| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { key, constraint, value })
            }
        };
        range(self.h > 0.0, "H", "must be > 0", self.h.to_string())?;
        range(self.m >= 1, "M", "must be >= 1", self.m.to_string())?;
        range(self.nx >= 1, "Nx", "must be >= 1", self.nx.to_string())?;
        range(self.ny >= 1, "Ny", "must be >= 1", self.ny.to_string())?;
        range(
            self.dx_bar > 0.0 && self.dx_bar < 0.5,
            "dx_bar",
            "must lie in (0, 0.5)",
            self.dx_bar.to_string(),
        )?;
        range(
            self.dy_bar > 0.0 && self.dy_bar < 0.5,
            "dy_bar",
            "must lie in (0, 0.5)",
            self.dy_bar.to_string(),
        )?;
        range(self.wavelength > 0.0, "wavelength", "must be > 0", self.wavelength.to_string())?;
        range(self.length >= 0.0, "Dx", "must be >= 0", self.length.to_string())?;
        range(self.width >= 0.0, "Dy", "must be >= 0", self.width.to_string())?;
        range(self.step > 0.0, "step", "must be > 0", self.step.to_string())?;
        range(self.grid_nx >= 2, "grid_nx", "must be >= 2", self.grid_nx.to_string())?;
        range(self.grid_ny >= 2, "grid_ny", "must be >= 2", self.grid_ny.to_string())?;
        let (lo, hi) = (self.search_range().q_min, self.search_range().q_max);
        range(lo < hi, "q_min", "must be below q_max", format!("{lo} (q_max = {hi})"))?;
        range(
            hi <= self.center_x,
            "q_max",
            "must not exceed center_x",
            format!("{hi} (center_x = {})", self.center_x),
        )?;
        Ok(())
    }

    pub fn radio(&self) -> RadioParams {
        RadioParams::new(
            dbm_to_watts(self.tx_power_dbm),
            dbm_to_watts(self.noise_dbm),
            db_to_linear(self.beta0_db),
            self.dx_bar,
            self.dy_bar,
        )
        .and_then(|r| r.with_wavelength(self.wavelength))
        .expect("validated config yields valid radio parameters")
    }

    pub fn area(&self) -> TargetArea {
        TargetArea::new(self.center_x, self.length, self.width).expect("validated config yields a valid area")
    }

    pub fn grid(&self) -> AreaGrid {
        AreaGrid::new(self.grid_nx, self.grid_ny).expect("validated config yields a valid grid")
    }

    pub fn geometry(&self) -> ArrayGeometry {
        ArrayGeometry::new(self.nx, self.ny, self.m).expect("validated config yields a valid array")
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.h, self.area(), self.geometry(), self.radio())
            .expect("validated config yields a valid scenario")
            .with_grid(self.grid())
    }

    pub fn search_range(&self) -> SearchRange {
        SearchRange {
            q_min: self.q_min.unwrap_or(-5.0 * self.h),
            q_max: self.q_max.unwrap_or(self.center_x),
            step: self.step,
        }
    }

    pub fn base_params(&self) -> BaseParams {
        BaseParams {
            altitude: self.h,
            radio: self.radio(),
            m: self.m,
            grid: self.grid(),
            search_step: self.step,
        }
    }
}

/// Parses and validates a config file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: i + 1,
                text: raw.trim().to_string(),
            });
        };
        let k = k.trim();
        if k.is_empty() || v.trim().is_empty() {
            return Err(ConfigError::Malformed {
                line: i + 1,
                text: raw.trim().to_string(),
            });
        }
        if seen.iter().any(|s| s == k) {
            return Err(ConfigError::Duplicate(k.to_string()));
        }
        cfg.set(k, v)?;
        seen.push(k.to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

impl fmt::Display for ScenarioConfig {
    /// Every key on its own line; unset search bounds are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for key in KEYS {
            let value = match key {
                "H" => self.h.to_string(),
                "tx_power_dbm" => self.tx_power_dbm.to_string(),
                "noise_dbm" => self.noise_dbm.to_string(),
                "beta0_db" => self.beta0_db.to_string(),
                "M" => self.m.to_string(),
                "Nx" => self.nx.to_string(),
                "Ny" => self.ny.to_string(),
                "dx_bar" => self.dx_bar.to_string(),
                "dy_bar" => self.dy_bar.to_string(),
                "wavelength" => self.wavelength.to_string(),
                "center_x" => self.center_x.to_string(),
                "Dx" => self.length.to_string(),
                "Dy" => self.width.to_string(),
                "q_min" => match self.q_min {
                    Some(v) => v.to_string(),
                    None => continue,
                },
                "q_max" => match self.q_max {
                    Some(v) => v.to_string(),
                    None => continue,
                },
                "step" => self.step.to_string(),
                "grid_nx" => self.grid_nx.to_string(),
                "grid_ny" => self.grid_ny.to_string(),
                _ => unreachable!("every key is listed"),
            };
            let _ = writeln!(s, "{key} = {value}");
        }
        f.write_str(&s)
    }
}
