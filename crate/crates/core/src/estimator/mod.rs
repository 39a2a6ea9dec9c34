//! Conditional-mean estimation over the finite amplitude alphabet and Monte
//! Carlo estimation of the resulting MMSE.
//!
//! Two error measures are tracked per trial:
//!
//! * `mmse_x`, the squared error of `E[X | Y]` summed over the chips of the
//!   train. This is the channel-input MMSE that the I-MMSE relation integrates.
//! * `mmse_a`, the squared error of `E[A | Y]` on the normalized amplitude.
//!
//! Trials are grouped into fixed batches and reduced in batch order, so the
//! estimate is bit-identical for any number of worker threads.

mod brute;
mod posterior;
mod rate;
mod stats;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::codec::{codebook, level_values, mean_energy, Amplitude, Codebook, CodecConfig, Scheme};
use crate::codec::encode_rate;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::seed::TrialRngs;

pub use brute::{brute_force_mmse, gauss_hermite, BRUTE_MAX_LEVELS, BRUTE_MAX_TRAIN_LEN};
pub use posterior::{
    conditional_mean_amplitude, conditional_mean_x, posterior_deterministic, uniform_prior,
    Posterior,
};
pub use rate::{rate_chip_likelihood, rate_posterior_and_means, RateEstimate};
pub use stats::RunningStats;

use posterior::normalize_log_weights;
use rate::{chip_llrs, ChipTerms, RateLevels};

/// Trials per reduction batch.
const BATCH: usize = 256;

/// Transmit power convention across schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyNorm {
    /// Unit chip amplitude for every scheme.
    #[default]
    Off,
    /// Chips scaled so every scheme spends unit average energy per train.
    EqualAverage,
}

impl EnergyNorm {
    pub fn name(self) -> &'static str {
        match self {
            EnergyNorm::Off => "off",
            EnergyNorm::EqualAverage => "equal_average",
        }
    }
}

impl std::str::FromStr for EnergyNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "off" => Ok(EnergyNorm::Off),
            "equal_average" | "equal-average" => Ok(EnergyNorm::EqualAverage),
            other => Err(Error::InvalidInput(format!(
                "unknown energy normalization `{other}` (expected off or equal_average)"
            ))),
        }
    }
}

/// Monte Carlo MMSE with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseEstimate {
    /// `E||X - E[X|Y]||^2`, summed over the chips of a train.
    pub mmse_x: f64,
    pub mmse_x_stderr: f64,
    /// `E[(A - E[A|Y])^2]` on the normalized amplitude.
    pub mmse_a: f64,
    pub mmse_a_stderr: f64,
    /// `E[(A - Â) Â]`; zero for a conditional-mean estimator.
    pub orthogonality: f64,
    pub orthogonality_stderr: f64,
    /// Largest `|sum(w) - 1|` over all posteriors evaluated.
    pub max_normalization_error: f64,
    pub n_trials: u64,
}

impl MmseEstimate {
    pub fn mmse_x_per_chip(&self, train_len: usize) -> f64 {
        self.mmse_x / train_len as f64
    }
}

#[derive(Debug, Clone, Default)]
struct Partial {
    x: RunningStats,
    a: RunningStats,
    orth: RunningStats,
    max_dev: f64,
}

impl Partial {
    fn push(&mut self, err_x: f64, a: f64, a_hat: f64, dev: f64) {
        let e = a - a_hat;
        self.x.push(err_x);
        self.a.push(e * e);
        self.orth.push(e * a_hat);
        self.max_dev = self.max_dev.max(dev);
    }

    fn merge(mut self, other: &Partial) -> Partial {
        self.x.merge(&other.x);
        self.a.merge(&other.a);
        self.orth.merge(&other.orth);
        self.max_dev = self.max_dev.max(other.max_dev);
        self
    }

    fn finish(self) -> MmseEstimate {
        MmseEstimate {
            mmse_x: self.x.mean(),
            mmse_x_stderr: self.x.stderr(),
            mmse_a: self.a.mean(),
            mmse_a_stderr: self.a.stderr(),
            orthogonality: self.orth.mean(),
            orthogonality_stderr: self.orth.stderr(),
            max_normalization_error: self.max_dev,
            n_trials: self.x.count(),
        }
    }
}

#[derive(Debug, Clone)]
enum Model {
    Deterministic(Codebook),
    Rate(RateLevels),
}

/// Monte Carlo MMSE estimator for one scheme and codec configuration.
#[derive(Debug, Clone)]
pub struct Estimator {
    scheme: Scheme,
    cfg: CodecConfig,
    model: Model,
    values: Vec<f64>,
    /// Multiplier on the chip energy; 1 unless energy normalization is on.
    energy_scale: f64,
    execution: Execution,
    flip_likelihood_sign: bool,
}

impl Estimator {
    pub fn new(scheme: Scheme, cfg: &CodecConfig) -> Result<Self> {
        cfg.validate_for(scheme)?;
        let model = match scheme {
            Scheme::Rate => Model::Rate(RateLevels::new(cfg.n_bits)),
            _ => {
                let book = codebook(scheme, cfg)?;
                let collisions = book.collisions();
                if collisions > 0 {
                    log::debug!(
                        "{scheme} n_bits={} train_len={}: {collisions} levels share a codeword",
                        cfg.n_bits,
                        cfg.train_len
                    );
                }
                Model::Deterministic(book)
            }
        };
        Ok(Estimator {
            scheme,
            cfg: cfg.clone(),
            model,
            values: level_values(cfg.n_bits),
            energy_scale: 1.0,
            execution: Execution::default(),
            flip_likelihood_sign: false,
        })
    }

    pub fn with_energy_norm(mut self, norm: EnergyNorm) -> Result<Self> {
        self.energy_scale = match norm {
            EnergyNorm::Off => 1.0,
            EnergyNorm::EqualAverage => {
                let e = mean_energy(self.scheme, &self.cfg)?;
                if !(e > 0.0) {
                    return Err(Error::config(format!(
                        "{} carries no energy, cannot normalize",
                        self.scheme
                    )));
                }
                1.0 / e
            }
        };
        Ok(self)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Negative control: scores codewords by `+||y - g c||^2 / 2`.
    #[doc(hidden)]
    pub fn with_flipped_likelihood(mut self, flip: bool) -> Self {
        self.flip_likelihood_sign = flip;
        self
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn config(&self) -> &CodecConfig {
        &self.cfg
    }

    /// Runs `n_trials` trials; trial `i` draws from streams derived from `(point_seed, i)`.
    pub fn estimate(&self, snr: f64, n_trials: u64, point_seed: u64) -> Result<MmseEstimate> {
        if !(snr >= 0.0) || snr.is_infinite() {
            return Err(Error::Domain { what: "snr", value: snr });
        }
        if n_trials == 0 {
            return Err(Error::InvalidInput("n_trials must be at least 1".into()));
        }
        let batches = (n_trials as usize).div_ceil(BATCH);
        let partials = map_ordered(batches, self.execution, |b| {
            let start = (b * BATCH) as u64;
            let end = (start + BATCH as u64).min(n_trials);
            self.run_batch(snr, point_seed, start..end)
        });
        let total = partials
            .iter()
            .fold(Partial::default(), |acc, p| acc.merge(p));
        Ok(total.finish())
    }

    fn run_batch(&self, snr: f64, point_seed: u64, trials: std::ops::Range<u64>) -> Partial {
        let gain = (snr * self.energy_scale).sqrt();
        let len = self.cfg.train_len;
        let levels = self.values.len();
        let mut ws = Workspace {
            y: vec![0.0; len],
            x_hat: vec![0.0; len],
            llr: vec![0.0; len],
            terms: ChipTerms::new(len),
            log_w: vec![0.0; levels],
        };
        let mut partial = Partial::default();
        for trial in trials {
            let mut rngs = TrialRngs::new(point_seed, trial);
            let level = rngs.channel.random_range(0..levels);
            let (err_x, a_hat, dev) = match &self.model {
                Model::Deterministic(book) => self.trial_deterministic(book, level, gain, &mut rngs, &mut ws),
                Model::Rate(tables) => self.trial_rate(tables, level, gain, &mut rngs, &mut ws),
            };
            partial.push(err_x * self.energy_scale, self.values[level], a_hat, dev);
        }
        partial
    }

    fn trial_deterministic(
        &self,
        book: &Codebook,
        level: usize,
        gain: f64,
        rngs: &mut TrialRngs,
        ws: &mut Workspace,
    ) -> (f64, f64, f64) {
        let sent = book.spikes(level);
        for y in ws.y.iter_mut() {
            *y = rngs.channel.sample(StandardNormal);
        }
        for &t in sent {
            ws.y[t] += gain;
        }
        // -||y - g c||^2 / 2 = g <y, c> - g^2 |c| / 2 + const
        let sign = if self.flip_likelihood_sign { -1.0 } else { 1.0 };
        let half = 0.5 * gain * gain;
        for (k, lw) in ws.log_w.iter_mut().enumerate() {
            let spikes = book.spikes(k);
            let corr: f64 = spikes.iter().map(|&t| ws.y[t]).sum();
            *lw = sign * (gain * corr - half * spikes.len() as f64);
        }
        let dev = normalize_log_weights(&mut ws.log_w);
        ws.x_hat.iter_mut().for_each(|v| *v = 0.0);
        let mut a_hat = 0.0;
        for (k, &w) in ws.log_w.iter().enumerate() {
            for &t in book.spikes(k) {
                ws.x_hat[t] += w;
            }
            a_hat += w * self.values[k];
        }
        // x_hat becomes the residual in place; expanding the square instead
        // cancels to tiny negatives when the posterior is sharp
        for &t in sent {
            ws.x_hat[t] -= 1.0;
        }
        let err: f64 = ws.x_hat.iter().map(|v| v * v).sum();
        (err, a_hat, dev)
    }

    fn trial_rate(
        &self,
        tables: &RateLevels,
        level: usize,
        gain: f64,
        rngs: &mut TrialRngs,
        ws: &mut Workspace,
    ) -> (f64, f64, f64) {
        let amp = Amplitude::new(level as u32, self.cfg.n_bits).expect("level in range");
        let sent = encode_rate(amp, &self.cfg, &mut rngs.codec);
        for (y, &c) in ws.y.iter_mut().zip(sent.chips()) {
            let n: f64 = rngs.channel.sample(StandardNormal);
            *y = if c { gain } else { 0.0 } + n;
        }
        chip_llrs(&ws.y, gain, &mut ws.llr);
        ws.terms.fill(&ws.llr);
        tables.log_likelihoods(&ws.llr, &mut ws.terms, &mut ws.log_w);
        if self.flip_likelihood_sign {
            ws.log_w.iter_mut().for_each(|w| *w = -*w);
        }
        let dev = normalize_log_weights(&mut ws.log_w);
        tables.chip_means(&ws.log_w, &ws.terms, &mut ws.x_hat);
        let err = ws
            .x_hat
            .iter()
            .zip(sent.chips())
            .map(|(&m, &c)| {
                let d = if c { 1.0 } else { 0.0 } - m;
                d * d
            })
            .sum();
        let a_hat = ws.log_w.iter().zip(&self.values).map(|(w, v)| w * v).sum();
        (err, a_hat, dev)
    }
}

struct Workspace {
    y: Vec<f64>,
    x_hat: Vec<f64>,
    llr: Vec<f64>,
    terms: ChipTerms,
    log_w: Vec<f64>,
}

/// Monte Carlo MMSE of `scheme` at `snr` with a uniform level prior.
///
/// `seed` keys the per-trial streams; equal seeds give equal estimates, and
/// different schemes under the same seed share level draws and channel noise.
pub fn estimate_mmse(
    scheme: Scheme,
    cfg: &CodecConfig,
    snr: f64,
    n_trials: u64,
    seed: u64,
) -> Result<MmseEstimate> {
    Estimator::new(scheme, cfg)?.estimate(snr, n_trials, seed)
}

/// Sanity mode: scalar `X ~ N(0, 1)` through the same channel, estimated by
/// its conditional mean `sqrt(snr) Y / (1 + snr)`. The MMSE is `1 / (1 + snr)`.
pub fn estimate_gaussian_mmse(snr: f64, n_trials: u64, seed: u64) -> Result<MmseEstimate> {
    if !(snr >= 0.0) || snr.is_infinite() {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    if n_trials == 0 {
        return Err(Error::InvalidInput("n_trials must be at least 1".into()));
    }
    let gain = snr.sqrt();
    let batches = (n_trials as usize).div_ceil(BATCH);
    let partials = map_ordered(batches, Execution::default(), |b| {
        let start = (b * BATCH) as u64;
        let end = (start + BATCH as u64).min(n_trials);
        let mut p = Partial::default();
        for trial in start..end {
            let mut rngs = TrialRngs::new(seed, trial);
            let x: f64 = rngs.channel.sample(StandardNormal);
            let n: f64 = rngs.channel.sample(StandardNormal);
            let y = gain * x + n;
            let x_hat = gain * y / (1.0 + snr);
            p.push((x - x_hat).powi(2), x, x_hat, 0.0);
        }
        p
    });
    Ok(partials
        .iter()
        .fold(Partial::default(), |acc, p| acc.merge(p))
        .finish())
}

/// Variance of the normalized amplitude under the uniform level prior,
/// `(2^Nb + 1) / (12 (2^Nb - 1))`.
pub fn prior_variance(n_bits: u32) -> f64 {
    let m = (1u64 << n_bits) as f64;
    (m + 1.0) / (12.0 * (m - 1.0))
}
