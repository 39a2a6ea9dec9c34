use crate::channel::ReceivedTrain;
use crate::codec::Codebook;
use crate::error::{Error, Result};

/// Posterior distribution over the amplitude alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    weights: Vec<f64>,
}

impl Posterior {
    /// Normalizes unnormalized log-weights with max subtraction.
    pub fn from_log_weights(mut log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::config("posterior over an empty alphabet"));
        }
        normalize_log_weights(&mut log_weights);
        if log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("posterior has no finite mass".into()));
        }
        Ok(Posterior {
            weights: log_weights,
        })
    }

    pub(crate) fn from_normalized(weights: Vec<f64>) -> Self {
        Posterior { weights }
    }

    pub fn uniform(levels: usize) -> Self {
        Posterior {
            weights: vec![1.0 / levels as f64; levels],
        }
    }

    pub fn point_mass(levels: usize, at: usize) -> Self {
        let mut weights = vec![0.0; levels];
        weights[at] = 1.0;
        Posterior { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `|sum(weights) - 1|`.
    pub fn normalization_error(&self) -> f64 {
        (self.weights.iter().sum::<f64>() - 1.0).abs()
    }
}

/// In-place log-sum-exp normalization; returns `|sum - 1|` after normalizing.
///
/// Entries equal to `-inf` become exactly zero.
pub(crate) fn normalize_log_weights(buf: &mut [f64]) -> f64 {
    let max = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in buf.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    let inv = 1.0 / total;
    let mut sum = 0.0;
    for w in buf.iter_mut() {
        *w *= inv;
        sum += *w;
    }
    (sum - 1.0).abs()
}

pub(crate) fn log_prior(prior: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = prior.iter().sum();
    if prior.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) || !(total > 0.0) {
        return Err(Error::InvalidInput(
            "prior must be nonnegative with positive mass".into(),
        ));
    }
    Ok(prior.iter().map(|&p| (p / total).ln()).collect())
}

/// Uniform prior over `levels` amplitude levels.
pub fn uniform_prior(levels: usize) -> Vec<f64> {
    vec![1.0 / levels as f64; levels]
}

/// Exact posterior over the codewords of a deterministic scheme:
/// `w[k] ∝ prior[k] exp(-||y - sqrt(snr) book[k]||^2 / 2)`.
pub fn posterior_deterministic(
    y: &ReceivedTrain,
    book: &Codebook,
    snr: f64,
    prior: &[f64],
) -> Result<Posterior> {
    if book.is_empty() {
        return Err(Error::config("empty codebook"));
    }
    if prior.len() != book.len() {
        return Err(Error::InvalidInput(format!(
            "prior has {} entries for a codebook of {}",
            prior.len(),
            book.len()
        )));
    }
    if y.len() != book.train_len() {
        return Err(Error::InvalidInput(format!(
            "received {} samples for trains of {} chips",
            y.len(),
            book.train_len()
        )));
    }
    if !(snr >= 0.0) {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    let gain = snr.sqrt();
    let lw = log_prior(prior)?
        .into_iter()
        .enumerate()
        .map(|(k, lp)| {
            let sq: f64 = y
                .samples
                .iter()
                .zip(book.train(k).chips())
                .map(|(&s, &c)| {
                    let d = s - if c { gain } else { 0.0 };
                    d * d
                })
                .sum();
            lp - 0.5 * sq
        })
        .collect();
    Posterior::from_log_weights(lw)
}

/// `E[X | y]` chip by chip: the posterior average of the codewords.
pub fn conditional_mean_x(posterior: &Posterior, book: &Codebook) -> Result<Vec<f64>> {
    if posterior.len() != book.len() {
        return Err(Error::InvalidInput(format!(
            "posterior over {} levels for a codebook of {}",
            posterior.len(),
            book.len()
        )));
    }
    let mut mean = vec![0.0; book.train_len()];
    for (k, &w) in posterior.weights().iter().enumerate() {
        for &t in book.spikes(k) {
            mean[t] += w;
        }
    }
    Ok(mean)
}

/// `E[A | y]` for normalized level values.
pub fn conditional_mean_amplitude(posterior: &Posterior, levels: &[f64]) -> Result<f64> {
    if posterior.len() != levels.len() {
        return Err(Error::InvalidInput(format!(
            "posterior over {} levels, {} level values given",
            posterior.len(),
            levels.len()
        )));
    }
    Ok(posterior
        .weights()
        .iter()
        .zip(levels)
        .map(|(w, v)| w * v)
        .sum())
}
