//! Run configuration: TOML file contents merged under command-line flags.

use num_rational::Rational64;
use omega_bergman::regularity::Lattice;
use omega_bergman::scalar::parse_rational;
use omega_bergman::verify::{Tolerances, VerifyConfig};
use serde::{Deserialize, Deserializer, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// A decimal argument kept both exactly and as `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decimal {
    pub exact: Rational64,
    pub value: f64,
}

impl Decimal {
    pub fn from_exact(exact: Rational64) -> Self {
        Self { exact, value: *exact.numer() as f64 / *exact.denom() as f64 }
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let exact = parse_rational(s).ok_or_else(|| format!("`{s}` is not a decimal or n/d rational"))?;
        Ok(Self::from_exact(exact))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Num(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(v) => v.to_string(),
            // Display gives the shortest representation that round-trips.
            Raw::Num(v) => format!("{v}"),
            Raw::Text(t) => t,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Contents of a configuration file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mu: Option<Decimal>,
    pub p: Option<u8>,
    pub s: Option<Decimal>,
    pub seed: Option<u64>,
    pub lattice: Option<Lattice>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub verify: Option<VerifyConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Overrides named tolerances, rejecting unknown names.
pub fn apply_tolerances<'a>(
    base: &mut Tolerances,
    overrides: impl IntoIterator<Item = (&'a String, &'a f64)>,
) -> Result<(), String> {
    let mut value = serde_json::to_value(&*base).map_err(|e| e.to_string())?;
    let map = value.as_object_mut().expect("tolerances serialize as a map");
    for (name, v) in overrides {
        if !map.contains_key(name.as_str()) {
            let known: Vec<_> = map.keys().cloned().collect();
            return Err(format!("unknown tolerance `{name}` (known: {})", known.join(", ")));
        }
        if !(v.is_finite() && *v >= 0.0) {
            return Err(format!("tolerance `{name}` must be a non-negative number"));
        }
        map.insert(name.clone(), serde_json::json!(v));
    }
    *base = serde_json::from_value(value).map_err(|e| e.to_string())?;
    Ok(())
}

/// Parses `name=value` flags.
pub fn parse_tolerance_flag(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}
