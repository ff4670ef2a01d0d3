//! Flat `key=value` run configuration.  One assignment per line, `#` starts
//! a comment, keys are lowercase and single-valued; list values are
//! comma-separated.  Parsing is strict — an unknown or repeated key is an
//! error, not a warning — so a typo cannot silently fall back to a default.

use jamcap::{JamPolicy, SystemParams};
use std::collections::BTreeMap;
use std::fmt;

/// Every key the workbench understands, across all subcommands.  Commands
/// read the subset they need and ignore the rest, so one file can drive a
/// whole experiment (the strict check still applies to the full set).
const KNOWN_KEYS: &[&str] = &[
    "n",
    "p",
    "lambda",
    "alpha",
    "policy",
    "q",
    "w",
    "qvec",
    "horizon",
    "warmup",
    "seed",
    "qmax",
    "tol",
    "p_grid",
    "alpha_grid",
    "expect_stable",
    "record_trace",
    "strategies",
    "sim_confirm",
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Parsed assignments, keyed by name.
#[derive(Debug, Default, Clone)]
pub struct FlatConfig {
    values: BTreeMap<String, String>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected key=value, got `{raw}`", idx + 1));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return err(format!("line {}: unknown key `{key}`", idx + 1));
            }
            if values.insert(key.clone(), value).is_some() {
                return err(format!("line {}: key `{key}` given twice", idx + 1));
            }
        }
        if values.contains_key("lambda") && values.contains_key("alpha") {
            return err("`lambda` and `alpha` are mutually exclusive; give one");
        }
        Ok(FlatConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(_) => err(format!("key `{key}`: cannot parse `{raw}`")),
            },
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.parsed::<f64>(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parsed::<usize>(key)?.unwrap_or(default))
    }

    pub fn u64_opt(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parsed::<u64>(key)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => err(format!("key `{key}`: expected true/false, got `{other}`")),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(raw) = self.get(key) else { return Ok(None) };
        let mut out = Vec::new();
        for part in raw.split(',') {
            let part = part.trim();
            match part.parse::<f64>() {
                Ok(v) => out.push(v),
                Err(_) => return err(format!("key `{key}`: cannot parse element `{part}`")),
            }
        }
        if out.is_empty() {
            return err(format!("key `{key}`: empty list"));
        }
        Ok(Some(out))
    }

    /// System parameters from `n`, `p`, and exactly one of `lambda`/`alpha`.
    pub fn system(&self) -> Result<SystemParams, ConfigError> {
        let n = self.usize_or("n", 2)?;
        let Some(p) = self.parsed::<f64>("p")? else {
            return err("key `p` is required");
        };
        let params = if let Some(alpha) = self.parsed::<f64>("alpha")? {
            SystemParams::from_alpha(n, p, alpha)
        } else {
            let Some(lambda) = self.parsed::<f64>("lambda")? else {
                return err("one of `lambda` or `alpha` is required");
            };
            SystemParams::new(n, p, lambda)
        };
        params.map_err(|e| ConfigError(e.to_string()))
    }

    /// Jamming policy from `policy` (+ `q`, `w`, `qvec`).  Defaults to the
    /// uniform policy at the configured `q` (itself defaulting to 0).
    pub fn policy(&self, n: usize) -> Result<JamPolicy, ConfigError> {
        let kind = self.get("policy").unwrap_or("uniform");
        let policy = match kind {
            "uniform" => JamPolicy::Uniform { q: self.f64_or("q", 0.0)? },
            "sideinfo" => {
                let (Some(q), Some(w)) = (self.parsed::<f64>("q")?, self.parsed::<f64>("w")?)
                else {
                    return err("policy `sideinfo` needs both `q` and `w`");
                };
                JamPolicy::SideInfo { q, w }
            }
            "vector" => {
                let Some(qs) = self.f64_list("qvec")? else {
                    return err("policy `vector` needs `qvec`");
                };
                JamPolicy::Vector { qs }
            }
            other => return err(format!("unknown policy `{other}`")),
        };
        policy.validate(n).map_err(|e| ConfigError(e.to_string()))?;
        Ok(policy)
    }
}
