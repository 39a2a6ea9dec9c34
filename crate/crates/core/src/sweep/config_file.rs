//! Plain-text sweep configuration.
//!
//! Grammar, one setting per line:
//!
//! ```text
//! # comment (also after a value)
//! key = value
//! key = v1, v2, v3        # list-valued keys
//! ```
//!
//! Keys: `schemes`, `n_bits`, `train_len`, `sigma2` (explicit list, `inf`
//! allowed), `sigma2_min`, `sigma2_max`, `sigma2_points`, `trials`, `seed`,
//! `energy_norm` (`off` | `equal_average`), `out`, `plots`,
//! `gaussian_overlay`, `record_timing` (booleans: `true` | `false`).
//! Unknown keys and repeated keys are errors.

use std::path::{Path, PathBuf};

use super::{SweepConfig, DEFAULT_SIGMA2_MAX, DEFAULT_SIGMA2_MIN, DEFAULT_SIGMA2_POINTS};
use crate::codec::Scheme;
use crate::error::{Error, Result};
use crate::estimator::EnergyNorm;
use crate::info::log_spaced;

/// One layer of settings; unset fields defer to the layer below.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOverrides {
    pub schemes: Option<Vec<Scheme>>,
    pub n_bits: Option<Vec<u32>>,
    pub train_len: Option<Vec<usize>>,
    pub sigma2: Option<Vec<f64>>,
    pub sigma2_min: Option<f64>,
    pub sigma2_max: Option<f64>,
    pub sigma2_points: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub energy_norm: Option<EnergyNorm>,
    pub out: Option<PathBuf>,
    pub plots: Option<bool>,
    pub gaussian_overlay: Option<bool>,
    pub record_timing: Option<bool>,
}

impl SweepOverrides {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut o = SweepOverrides::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            let err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            o.set(key, value).map_err(err)?;
        }
        Ok(o)
    }

    /// Sets one key from its textual value; used by the file parser and the CLI.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "schemes" => self.schemes = Some(list(value, |s| s.parse::<Scheme>().map_err(|e| e.to_string()))?),
            "n_bits" => self.n_bits = Some(list(value, scalar)?),
            "train_len" => self.train_len = Some(list(value, scalar)?),
            "sigma2" => self.sigma2 = Some(list(value, scalar)?),
            "sigma2_min" => self.sigma2_min = Some(scalar(value)?),
            "sigma2_max" => self.sigma2_max = Some(scalar(value)?),
            "sigma2_points" => self.sigma2_points = Some(scalar(value)?),
            "trials" => self.trials = Some(scalar(value)?),
            "seed" => self.seed = Some(scalar(value)?),
            "energy_norm" => self.energy_norm = Some(value.parse().map_err(|e: Error| e.to_string())?),
            "out" => self.out = Some(PathBuf::from(value)),
            "plots" => self.plots = Some(scalar(value)?),
            "gaussian_overlay" => self.gaussian_overlay = Some(scalar(value)?),
            "record_timing" => self.record_timing = Some(scalar(value)?),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Layers `higher` on top of `self`. An explicit sigma2 list and the
    /// min/max/points triple replace each other.
    pub fn merged(mut self, higher: SweepOverrides) -> SweepOverrides {
        if higher.sigma2.is_some() {
            self.sigma2_min = None;
            self.sigma2_max = None;
            self.sigma2_points = None;
        }
        if higher.sigma2_min.is_some() || higher.sigma2_max.is_some() || higher.sigma2_points.is_some() {
            self.sigma2 = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if higher.$f.is_some() { self.$f = higher.$f; } )* };
        }
        take!(
            schemes, n_bits, train_len, sigma2, sigma2_min, sigma2_max, sigma2_points, trials, seed,
            energy_norm, out, plots, gaussian_overlay, record_timing
        );
        self
    }

    pub fn apply(&self, cfg: &mut SweepConfig) -> Result<()> {
        if let Some(v) = &self.schemes {
            cfg.schemes = v.clone();
        }
        if let Some(v) = &self.n_bits {
            cfg.n_bits_list = v.clone();
        }
        if let Some(v) = &self.train_len {
            cfg.train_len_list = v.clone();
        }
        if let Some(v) = &self.sigma2 {
            cfg.sigma2_grid = v.clone();
        } else if self.sigma2_min.is_some() || self.sigma2_max.is_some() || self.sigma2_points.is_some() {
            let lo = self.sigma2_min.unwrap_or(DEFAULT_SIGMA2_MIN);
            let hi = self.sigma2_max.unwrap_or(DEFAULT_SIGMA2_MAX);
            let n = self.sigma2_points.unwrap_or(DEFAULT_SIGMA2_POINTS);
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
                return Err(Error::config(format!(
                    "sigma2 range needs 0 < min <= max and points >= 1 (got [{lo}, {hi}] with {n} points)"
                )));
            }
            cfg.sigma2_grid = log_spaced(lo, hi, n);
        }
        if let Some(v) = self.trials {
            cfg.n_trials = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.energy_norm {
            cfg.energy_norm = v;
        }
        if let Some(v) = self.record_timing {
            cfg.record_timing = v;
        }
        Ok(())
    }
}

fn scalar<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| format!("bad value `{}`: {e}", s.trim()))
}

fn list<T>(s: &str, each: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(each)
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}
