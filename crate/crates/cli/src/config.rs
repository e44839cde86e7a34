//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dioph_core::arith::{FactorBudget, Integer, Rational};
use dioph_core::curve::{CurveFixture, Point, WeierstrassCurve};
use dioph_core::eds::EdsConfig;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("`{key}`: {msg}")]
    Value { key: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}` (expected json or text)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Text => "text",
        })
    }
}

/// Curve `y^2 = x^3 + a x + b`, the point `(x, y)` and the metadata `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSpec {
    pub a: Integer,
    pub b: Integer,
    pub x: Rational,
    pub y: Rational,
    pub r: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            a: Integer::from(0),
            b: Integer::from(-2),
            x: Rational::from_integer(Integer::from(3)),
            y: Rational::from_integer(Integer::from(5)),
            r: 2,
        }
    }
}

impl FixtureSpec {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut spec = FixtureSpec::default();
        let mut seen = BTreeMap::new();
        for (key, value, line) in pairs(text)? {
            if seen.insert(key.clone(), line).is_some() {
                return Err(ConfigError::Syntax { line, msg: format!("duplicate key `{key}`") });
            }
            match key.as_str() {
                "a" => spec.a = parse_value(&key, &value)?,
                "b" => spec.b = parse_value(&key, &value)?,
                "x" => spec.x = parse_value(&key, &value)?,
                "y" => spec.y = parse_value(&key, &value)?,
                "r" => spec.r = parse_value(&key, &value)?,
                _ => return Err(ConfigError::Syntax { line, msg: format!("unknown fixture key `{key}`") }),
            }
        }
        for k in ["a", "b", "x", "y", "r"] {
            if !seen.contains_key(k) {
                return Err(ConfigError::Value { key: k.into(), msg: "missing from fixture file".into() });
            }
        }
        Ok(spec)
    }

    /// Validates the data; a point off the curve is rejected here.
    pub fn build(&self) -> dioph_core::Result<CurveFixture> {
        let curve = WeierstrassCurve::new(self.a.clone(), self.b.clone())?;
        CurveFixture::new(curve, Point::affine(self.x.clone(), self.y.clone()), self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub fixture: FixtureSpec,
    pub fixture_path: Option<PathBuf>,
    pub exact_cap: u64,
    pub division_cap: u64,
    pub precision_cap: u32,
    pub trial_bound: u64,
    pub rho_iterations: u64,
    /// Largest prime for point counting and support scans.
    pub count_cap: u64,
    pub workers: usize,
    pub format: Format,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

impl Default for Config {
    fn default() -> Self {
        let eds = EdsConfig::default();
        Config {
            fixture: FixtureSpec::default(),
            fixture_path: None,
            exact_cap: eds.exact_cap,
            division_cap: eds.division_cap,
            precision_cap: eds.precision_cap,
            trial_bound: eds.budget.trial_bound,
            rho_iterations: eds.budget.rho_iterations,
            count_cap: 10_000_000,
            workers: 1,
            format: Format::Json,
            seed: DEFAULT_SEED,
        }
    }
}

/// `(key, value, line)` for every non-blank line; `#` starts a comment.
fn pairs(text: &str) -> Result<Vec<(String, String, usize)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            msg: format!("expected `key = value`, found `{line}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, msg: "empty key or value".into() });
        }
        out.push((k.to_string(), v.to_string(), i + 1));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value { key: key.into(), msg: e.to_string() })
}

fn positive<T: FromStr + PartialOrd + Default>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    let v: T = parse_value(key, value)?;
    if v <= T::default() {
        return Err(ConfigError::Value { key: key.into(), msg: "must be positive".into() });
    }
    Ok(v)
}

fn parse_seed(value: &str) -> Result<u64, ConfigError> {
    let parsed = match value.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => value.replace('_', "").parse(),
    };
    parsed.map_err(|e| ConfigError::Value { key: "seed".into(), msg: e.to_string() })
}

impl Config {
    /// Fixture paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        let mut seen = BTreeMap::new();
        for (key, value, line) in pairs(text)? {
            if seen.insert(key.clone(), line).is_some() {
                return Err(ConfigError::Syntax { line, msg: format!("duplicate key `{key}`") });
            }
            match key.as_str() {
                "fixture" => {
                    let path = base.join(&value);
                    let text = read(&path)?;
                    cfg.fixture = FixtureSpec::parse(&text)?;
                    cfg.fixture_path = Some(path);
                }
                "exact_cap" => cfg.exact_cap = positive(&key, &value)?,
                "division_cap" => cfg.division_cap = positive(&key, &value)?,
                "precision_cap" => cfg.precision_cap = positive(&key, &value)?,
                "trial_bound" => cfg.trial_bound = positive(&key, &value)?,
                "rho_iterations" => cfg.rho_iterations = positive(&key, &value)?,
                "count_cap" => cfg.count_cap = positive(&key, &value)?,
                "workers" => cfg.workers = positive(&key, &value)?,
                "format" => cfg.format = parse_value(&key, &value)?,
                "seed" => cfg.seed = parse_seed(&value)?,
                _ => return Err(ConfigError::Syntax { line, msg: format!("unknown key `{key}`") }),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        Config::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn eds(&self) -> EdsConfig {
        EdsConfig {
            exact_cap: self.exact_cap,
            budget: FactorBudget::new(self.trial_bound, self.rho_iterations),
            precision_cap: self.precision_cap,
            division_cap: self.division_cap,
        }
    }

    /// Everything that can change a result, in a fixed order. The fixture
    /// enters by value; the worker count does not enter at all.
    pub fn canonical(&self) -> BTreeMap<&'static str, String> {
        let f = &self.fixture;
        BTreeMap::from([
            ("fixture.a", f.a.to_string()),
            ("fixture.b", f.b.to_string()),
            ("fixture.x", f.x.to_string()),
            ("fixture.y", f.y.to_string()),
            ("fixture.r", f.r.to_string()),
            ("exact_cap", self.exact_cap.to_string()),
            ("division_cap", self.division_cap.to_string()),
            ("precision_cap", self.precision_cap.to_string()),
            ("trial_bound", self.trial_bound.to_string()),
            ("rho_iterations", self.rho_iterations.to_string()),
            ("count_cap", self.count_cap.to_string()),
            ("format", self.format.to_string()),
            ("seed", self.seed.to_string()),
        ])
    }

    /// SHA-256 of the canonical `key=value` lines.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(format!("{k}={v}\n"));
        }
        hex::encode(h.finalize())
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })
}
