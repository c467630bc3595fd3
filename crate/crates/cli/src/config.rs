use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmi_core::gdopt::{AdamConfig, GradientMode};
use serde::{Deserialize, Serialize};

use crate::kv;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config file {path}: {source}")]
    Syntax { path: PathBuf, source: kv::KvError },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Theorem1,
    Exhaustive,
    ClosedFormD2,
    Rgnp,
    Adam,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Theorem1, Method::Exhaustive, Method::ClosedFormD2, Method::Rgnp, Method::Adam];

    pub fn name(self) -> &'static str {
        match self {
            Method::Theorem1 => "theorem1",
            Method::Exhaustive => "exhaustive",
            Method::ClosedFormD2 => "closed_form_d2",
            Method::Rgnp => "rgnp",
            Method::Adam => "adam",
        }
    }

    /// Whether the method can run on `d_A × d_B` at all.
    pub fn supports(self, d_a: usize, d_b: usize) -> bool {
        match self {
            Method::Exhaustive => d_a * d_b <= qmi_core::permopt::EXHAUSTIVE_MAX_CELLS,
            Method::ClosedFormD2 => d_a == 2 && d_b == 2,
            Method::Adam => d_a >= 2 && d_b >= 2,
            Method::Theorem1 | Method::Rgnp => true,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected one of theorem1, exhaustive, closed_form_d2, rgnp, adam)"))
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err("no methods given".into());
    }
    Ok(out)
}

/// Adam hyperparameters exposed on the command line; the rest keep library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamSettings {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub tol: f64,
    pub patience: usize,
    pub init_scale: f64,
}

impl Default for AdamSettings {
    fn default() -> Self {
        let d = AdamConfig::default();
        Self {
            lr: d.lr,
            beta1: d.beta1,
            beta2: d.beta2,
            eps: d.eps,
            max_iters: d.max_iters,
            restarts: d.restarts,
            tol: d.tol,
            patience: d.patience,
            init_scale: d.init_scale,
        }
    }
}

impl AdamSettings {
    pub fn to_config(&self, seed: u64) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            max_iters: self.max_iters,
            restarts: self.restarts,
            tol: self.tol,
            patience: self.patience,
            seed,
            init_scale: self.init_scale,
            gradient: GradientMode::Analytic,
            // only the best value is reported, so skip most of the trajectory
            trajectory_stride: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub d_a: usize,
    pub d_b: usize,
    pub d_c: usize,
    pub n_states: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Generate states whose `ρ_C` has this rank instead of generic ones.
    pub rank_c: Option<usize>,
    pub adam: AdamSettings,
    /// Not serialized, so the same run written to two places produces the same bytes.
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Qubit-pair defaults; every method valid for the dimensions.
    pub fn new(d_a: usize, d_b: usize) -> Self {
        Self {
            d_a,
            d_b,
            d_c: d_a * d_b,
            n_states: 100,
            seed: 0,
            methods: Method::ALL.into_iter().filter(|m| m.supports(d_a, d_b)).collect(),
            rank_c: None,
            adam: AdamSettings::default(),
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d_a < 2 || self.d_b < 2 || self.d_c < 1 {
            return Err(ConfigError::Invalid(format!(
                "dimensions must satisfy d_A, d_B >= 2 and d_C >= 1 (got {}, {}, {})",
                self.d_a, self.d_b, self.d_c
            )));
        }
        if self.n_states == 0 {
            return Err(ConfigError::Invalid("n_states must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(ConfigError::Invalid("no methods selected".into()));
        }
        for m in &self.methods {
            if !m.supports(self.d_a, self.d_b) {
                return Err(ConfigError::Invalid(format!(
                    "method {m} is not available for d_A = {}, d_B = {}",
                    self.d_a, self.d_b
                )));
            }
        }
        if let Some(r) = self.rank_c {
            if r == 0 || r > self.d_c || r > self.d_a * self.d_b {
                return Err(ConfigError::Invalid(format!(
                    "rank_c = {r} must lie in 1..=min(d_A d_B, d_C) = {}",
                    self.d_c.min(self.d_a * self.d_b)
                )));
            }
        }
        let a = &self.adam;
        if !(a.lr > 0.0) || a.max_iters == 0 || a.restarts == 0 || a.patience == 0 {
            return Err(ConfigError::Invalid("Adam settings must be positive".into()));
        }
        a.to_config(0).validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Values from a config file or the command line; `None` leaves the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub d: Option<usize>,
    pub d_a: Option<usize>,
    pub d_b: Option<usize>,
    pub d_c: Option<usize>,
    pub n_states: Option<usize>,
    pub seed: Option<u64>,
    pub methods: Option<Vec<Method>>,
    pub rank_c: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub adam_lr: Option<f64>,
    pub adam_max_iters: Option<usize>,
    pub adam_restarts: Option<usize>,
    pub adam_tol: Option<f64>,
    pub adam_patience: Option<usize>,
}

fn value<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e: T::Err| ConfigError::Value { key: key.into(), message: e.to_string() })
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_text(&text).map_err(|e| match e {
            ConfigError::Syntax { source, .. } => ConfigError::Syntax { path: path.into(), source },
            other => other,
        })
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let pairs = kv::parse(text).map_err(|source| ConfigError::Syntax { path: PathBuf::new(), source })?;
        let mut o = Overrides::default();
        for (k, v) in pairs {
            match k.as_str() {
                "d" => o.d = Some(value(&k, &v)?),
                "da" | "d_a" => o.d_a = Some(value(&k, &v)?),
                "db" | "d_b" => o.d_b = Some(value(&k, &v)?),
                "dc" | "d_c" => o.d_c = Some(value(&k, &v)?),
                "n" | "n_states" => o.n_states = Some(value(&k, &v)?),
                "seed" => o.seed = Some(value(&k, &v)?),
                "methods" => {
                    o.methods = Some(parse_methods(&v).map_err(|message| ConfigError::Value { key: k.clone(), message })?)
                }
                "rank_c" => o.rank_c = Some(value(&k, &v)?),
                "out_dir" => o.out_dir = Some(PathBuf::from(v)),
                "adam_lr" => o.adam_lr = Some(value(&k, &v)?),
                "adam_max_iters" => o.adam_max_iters = Some(value(&k, &v)?),
                "adam_restarts" => o.adam_restarts = Some(value(&k, &v)?),
                "adam_tol" => o.adam_tol = Some(value(&k, &v)?),
                "adam_patience" => o.adam_patience = Some(value(&k, &v)?),
                _ => return Err(ConfigError::UnknownKey(k)),
            }
        }
        Ok(o)
    }

    /// `other` wins wherever it is set.
    pub fn merged(mut self, other: &Overrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(d, d_a, d_b, d_c, n_states, seed, methods, rank_c, out_dir, adam_lr, adam_max_iters, adam_restarts, adam_tol, adam_patience);
        self
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let d_a = self.d_a.or(self.d).unwrap_or(2);
        let d_b = self.d_b.or(self.d).unwrap_or(d_a);
        let mut cfg = RunConfig::new(d_a, d_b);
        if let Some(v) = self.d_c {
            cfg.d_c = v;
        }
        if let Some(v) = self.n_states {
            cfg.n_states = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.methods {
            cfg.methods = v.clone();
        }
        cfg.rank_c = self.rank_c;
        if let Some(v) = &self.out_dir {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = self.adam_lr {
            cfg.adam.lr = v;
        }
        if let Some(v) = self.adam_max_iters {
            cfg.adam.max_iters = v;
        }
        if let Some(v) = self.adam_restarts {
            cfg.adam.restarts = v;
        }
        if let Some(v) = self.adam_tol {
            cfg.adam.tol = v;
        }
        if let Some(v) = self.adam_patience {
            cfg.adam.patience = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
