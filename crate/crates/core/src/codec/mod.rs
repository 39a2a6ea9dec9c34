//! Neuromorphic spike encoders viewed as impulse-radio modulations.
//!
//! Every scheme maps one quantized sensor amplitude onto a spike train of
//! `train_len` chips. Rate coding is stochastic; TTFS, phase and burst coding
//! are deterministic and can be tabulated into a [`Codebook`] over the whole
//! amplitude alphabet.

mod burst;
mod phase;
mod rate;
mod ttfs;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

pub use burst::{burst_isi, burst_spike_count, encode_burst};
pub use phase::encode_phase;
pub use rate::encode_rate;
pub use ttfs::{encode_ttfs, ttfs_fire_index, ttfs_fire_index_value};

/// Largest supported quantizer resolution.
pub const MAX_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Rate,
    Ttfs,
    Phase,
    Burst,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Rate, Scheme::Ttfs, Scheme::Phase, Scheme::Burst];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rate => "rate",
            Scheme::Ttfs => "ttfs",
            Scheme::Phase => "phase",
            Scheme::Burst => "burst",
        }
    }

    /// Rate coding draws fresh randomness per chip; the rest are functions of the level.
    pub fn is_deterministic(self) -> bool {
        !matches!(self, Scheme::Rate)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rate" => Ok(Scheme::Rate),
            "ttfs" => Ok(Scheme::Ttfs),
            "phase" => Ok(Scheme::Phase),
            "burst" => Ok(Scheme::Burst),
            other => Err(Error::InvalidInput(format!(
                "unknown scheme `{other}` (expected rate, ttfs, phase or burst)"
            ))),
        }
    }
}

/// A quantized sample: `level` out of `full_scale`, normalized value `level / full_scale`.
///
/// Quantizer outputs use `full_scale = 2^n_bits - 1`; arbitrary rational
/// amplitudes are allowed through [`Amplitude::from_ratio`] so that integer
/// formulas (burst count and ISI) stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Amplitude {
    level: u32,
    full_scale: u32,
}

impl Amplitude {
    pub fn new(level: u32, n_bits: u32) -> Result<Self> {
        check_bits(n_bits)?;
        let full_scale = max_level(n_bits);
        if level > full_scale {
            return Err(Error::InvalidInput(format!(
                "level {level} exceeds {full_scale} for {n_bits}-bit quantization"
            )));
        }
        Ok(Amplitude { level, full_scale })
    }

    pub fn from_ratio(level: u32, full_scale: u32) -> Result<Self> {
        if full_scale == 0 || level > full_scale {
            return Err(Error::InvalidInput(format!(
                "amplitude {level}/{full_scale} is not in [0, 1]"
            )));
        }
        Ok(Amplitude { level, full_scale })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn full_scale(&self) -> u32 {
        self.full_scale
    }

    pub fn value(&self) -> f64 {
        f64::from(self.level) / f64::from(self.full_scale)
    }
}

/// Highest quantizer level, `2^n_bits - 1`.
pub fn max_level(n_bits: u32) -> u32 {
    ((1u64 << n_bits) - 1) as u32
}

/// Normalized amplitude of every level, `k / (2^n_bits - 1)`.
pub fn level_values(n_bits: u32) -> Vec<f64> {
    let top = f64::from(max_level(n_bits));
    (0..=max_level(n_bits)).map(|k| f64::from(k) / top).collect()
}

fn check_bits(n_bits: u32) -> Result<()> {
    if n_bits == 0 || n_bits > MAX_BITS {
        return Err(Error::config(format!(
            "n_bits must be in 1..={MAX_BITS}, got {n_bits}"
        )));
    }
    Ok(())
}

/// Encoder parameters shared by all four schemes.
///
/// Time inside a train is counted in chips; TTFS uses the normalized time
/// `k / train_len`, so `tau_th` is a fraction of the train duration.
#[derive(Debug, Clone, PartialEq)]
pub struct CodecConfig {
    pub n_bits: u32,
    pub train_len: usize,
    pub theta0: f64,
    pub tau_th: f64,
    pub n_max: u32,
    pub t_min: usize,
    pub t_max: usize,
}

impl CodecConfig {
    pub const DEFAULT_THETA0: f64 = 1.0;
    pub const DEFAULT_TAU_TH: f64 = 0.4;

    /// Defaults: `theta0 = 1`, `tau_th = 0.4`, `n_max = n_bits`, `t_min = 1`
    /// and the largest `t_max` whose maximal burst still fits in the train.
    pub fn new(n_bits: u32, train_len: usize) -> Result<Self> {
        check_bits(n_bits)?;
        if train_len == 0 {
            return Err(Error::config("train_len must be at least 1"));
        }
        Ok(CodecConfig {
            n_bits,
            train_len,
            theta0: Self::DEFAULT_THETA0,
            tau_th: Self::DEFAULT_TAU_TH,
            n_max: n_bits,
            t_min: 1,
            t_max: default_t_max(train_len, n_bits),
        })
    }

    pub fn with_ttfs_threshold(mut self, theta0: f64, tau_th: f64) -> Self {
        self.theta0 = theta0;
        self.tau_th = tau_th;
        self
    }

    /// Overrides `n_max` and re-derives the default `t_max` for it.
    pub fn with_n_max(mut self, n_max: u32) -> Self {
        self.n_max = n_max;
        self.t_max = default_t_max(self.train_len, n_max);
        self
    }

    pub fn with_isi_bounds(mut self, t_min: usize, t_max: usize) -> Self {
        self.t_min = t_min;
        self.t_max = t_max;
        self
    }

    pub fn levels(&self) -> usize {
        1usize << self.n_bits
    }

    /// Checks the invariants shared by every scheme.
    pub fn validate(&self) -> Result<()> {
        check_bits(self.n_bits)?;
        if self.train_len == 0 {
            return Err(Error::config("train_len must be at least 1"));
        }
        if !(self.theta0 > 0.0 && self.theta0.is_finite()) {
            return Err(Error::config(format!("theta0 must be > 0, got {}", self.theta0)));
        }
        if !(self.tau_th > 0.0 && self.tau_th.is_finite()) {
            return Err(Error::config(format!("tau_th must be > 0, got {}", self.tau_th)));
        }
        if self.n_max == 0 {
            return Err(Error::config("n_max must be at least 1"));
        }
        if self.t_min == 0 || self.t_max < self.t_min {
            return Err(Error::config(format!(
                "ISI bounds must satisfy 1 <= t_min <= t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    /// Checks the shared invariants plus the scheme-specific ones.
    pub fn validate_for(&self, scheme: Scheme) -> Result<()> {
        self.validate()?;
        match scheme {
            Scheme::Phase if self.train_len < self.n_bits as usize => Err(Error::config(format!(
                "phase coding needs train_len >= n_bits ({} < {})",
                self.train_len, self.n_bits
            ))),
            Scheme::Burst => {
                let span = (self.n_max as usize - 1) * self.t_max + 1;
                if span > self.train_len {
                    Err(Error::config(format!(
                        "maximal burst spans {span} chips ((n_max - 1) * t_max + 1) but train_len is {}",
                        self.train_len
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

fn default_t_max(train_len: usize, n_max: u32) -> usize {
    if n_max > 1 {
        ((train_len - 1) / (n_max as usize - 1)).max(1)
    } else {
        train_len.saturating_sub(1).max(1)
    }
}

/// Binary chip sequence sent over the channel, one entry per chip slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpikeTrain {
    chips: Vec<bool>,
}

impl SpikeTrain {
    pub fn silent(train_len: usize) -> Self {
        SpikeTrain {
            chips: vec![false; train_len],
        }
    }

    pub fn from_chips(chips: Vec<bool>) -> Self {
        SpikeTrain { chips }
    }

    /// Builds a train with spikes at `indices`; panics if an index is out of range.
    pub fn from_spikes(train_len: usize, indices: &[usize]) -> Self {
        let mut train = Self::silent(train_len);
        for &i in indices {
            train.chips[i] = true;
        }
        train
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[bool] {
        &self.chips
    }

    pub fn chip(&self, t: usize) -> f64 {
        if self.chips[t] {
            1.0
        } else {
            0.0
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.chips.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect()
    }

    pub fn spike_indices(&self) -> Vec<usize> {
        self.chips
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect()
    }

    pub fn spike_count(&self) -> usize {
        self.chips.iter().filter(|&&c| c).count()
    }
}

/// Encodes with a deterministic scheme. Rate coding needs a random stream,
/// see [`encode`].
pub fn encode_deterministic(scheme: Scheme, a: Amplitude, cfg: &CodecConfig) -> Result<SpikeTrain> {
    match scheme {
        Scheme::Rate => Err(Error::UnsupportedScheme(scheme)),
        Scheme::Ttfs => Ok(encode_ttfs(a, cfg)),
        Scheme::Phase => encode_phase(a, cfg),
        Scheme::Burst => encode_burst(a, cfg),
    }
}

pub fn encode<R: Rng + ?Sized>(
    scheme: Scheme,
    a: Amplitude,
    cfg: &CodecConfig,
    rng: &mut R,
) -> Result<SpikeTrain> {
    match scheme {
        Scheme::Rate => Ok(encode_rate(a, cfg, rng)),
        _ => encode_deterministic(scheme, a, cfg),
    }
}

/// All `2^n_bits` codewords of a deterministic scheme, indexed by level.
#[derive(Debug, Clone)]
pub struct Codebook {
    scheme: Scheme,
    train_len: usize,
    trains: Vec<SpikeTrain>,
    spikes: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn train_len(&self) -> usize {
        self.train_len
    }

    pub fn len(&self) -> usize {
        self.trains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trains.is_empty()
    }

    pub fn trains(&self) -> &[SpikeTrain] {
        &self.trains
    }

    pub fn train(&self, level: usize) -> &SpikeTrain {
        &self.trains[level]
    }

    /// Spike positions of codeword `level`.
    pub fn spikes(&self, level: usize) -> &[usize] {
        &self.spikes[level]
    }

    /// Mean codeword energy `E||X||^2` under a uniform level prior.
    pub fn mean_energy(&self) -> f64 {
        let total: usize = self.spikes.iter().map(Vec::len).sum();
        total as f64 / self.len() as f64
    }

    /// Number of levels whose codeword repeats the codeword of a lower level.
    pub fn collisions(&self) -> usize {
        let mut seen = std::collections::HashSet::with_capacity(self.trains.len());
        self.trains.iter().filter(|t| !seen.insert(*t)).count()
    }
}

pub fn codebook(scheme: Scheme, cfg: &CodecConfig) -> Result<Codebook> {
    if !scheme.is_deterministic() {
        return Err(Error::UnsupportedScheme(scheme));
    }
    cfg.validate_for(scheme)?;
    let trains = (0..=max_level(cfg.n_bits))
        .map(|k| encode_deterministic(scheme, Amplitude::new(k, cfg.n_bits)?, cfg))
        .collect::<Result<Vec<_>>>()?;
    let spikes = trains.iter().map(SpikeTrain::spike_indices).collect();
    Ok(Codebook {
        scheme,
        train_len: cfg.train_len,
        trains,
        spikes,
    })
}

/// Average train energy of a scheme under a uniform level prior.
pub fn mean_energy(scheme: Scheme, cfg: &CodecConfig) -> Result<f64> {
    match scheme {
        // E[A] * train_len, and E[A] = 1/2 for a uniform prior on k / (2^Nb - 1).
        Scheme::Rate => Ok(0.5 * cfg.train_len as f64),
        _ => Ok(codebook(scheme, cfg)?.mean_energy()),
    }
}
