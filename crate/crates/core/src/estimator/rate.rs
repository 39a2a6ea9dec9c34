//! Exact Bayesian inference for rate-coded trains.
//!
//! Given the level, chips are independent Bernoulli(a) pulses, so every chip
//! of the received train is a two-component Gaussian mixture and the train
//! likelihood factorizes over chips.

use std::f64::consts::PI;

use super::posterior::{log_prior, normalize_log_weights, Posterior};
use crate::channel::ReceivedTrain;
use crate::codec::{level_values, max_level, CodecConfig};
use crate::error::{Error, Result};

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Marginal density of one received chip under rate coding at amplitude `a`:
/// `a phi(y - sqrt(snr)) + (1 - a) phi(y)`.
pub fn rate_chip_likelihood(y_t: f64, a: f64, snr: f64) -> f64 {
    a * std_normal_pdf(y_t - snr.sqrt()) + (1.0 - a) * std_normal_pdf(y_t)
}

/// Per-chip log-likelihood ratio `ln phi(y - g) / phi(y) = g y - g^2 / 2`.
pub(crate) fn chip_llrs(y: &[f64], gain: f64, out: &mut [f64]) {
    let half = 0.5 * gain * gain;
    for (l, &s) in out.iter_mut().zip(y) {
        *l = gain * s - half;
    }
}

/// Per-chip factor `(1 - a) + a e^{l}` rescaled by `e^{-max(l, 0)}` into
/// `v + a (u - v)` with `u = e^{l - m}`, `v = e^{-m}`, `m = max(l, 0)`.
/// One of `u`, `v` is exactly 1, so no term overflows and none cancels.
#[derive(Debug, Clone, Default)]
pub(crate) struct ChipTerms {
    u: Vec<f64>,
    v: Vec<f64>,
    /// `sum_t m_t`, the log of the factored-out scale.
    shift: f64,
    /// Running per-level products.
    prod: Vec<f64>,
}

impl ChipTerms {
    pub fn new(train_len: usize) -> Self {
        ChipTerms {
            u: vec![0.0; train_len],
            v: vec![0.0; train_len],
            shift: 0.0,
            prod: Vec::new(),
        }
    }

    pub fn fill(&mut self, llr: &[f64]) {
        self.u.resize(llr.len(), 0.0);
        self.v.resize(llr.len(), 0.0);
        self.shift = 0.0;
        for ((u, v), &l) in self.u.iter_mut().zip(self.v.iter_mut()).zip(llr) {
            let e = (-l.abs()).exp();
            if l >= 0.0 {
                (*u, *v) = (1.0, e);
                self.shift += l;
            } else {
                (*u, *v) = (e, 1.0);
            }
        }
    }
}

/// Precomputed level tables for the rate likelihood.
#[derive(Debug, Clone)]
pub(crate) struct RateLevels {
    pub values: Vec<f64>,
    /// Chips multiplied together before taking a log. Interior factors are at
    /// least `1 / (2^Nb - 1)`, so a block stays above `1e-300`.
    block: usize,
}

impl RateLevels {
    pub fn new(n_bits: u32) -> Self {
        let m = f64::from(max_level(n_bits));
        RateLevels {
            values: level_values(n_bits),
            block: ((300.0 / m.log10().max(1.0)) as usize).max(1),
        }
    }

    /// `out[k] = sum_t ln(a_k e^{l_t} + 1 - a_k)`, the train log-likelihood
    /// of level `k` up to a level-independent constant.
    pub fn log_likelihoods(&self, llr: &[f64], terms: &mut ChipTerms, out: &mut [f64]) {
        let n = self.values.len();
        // levels 0 and M have a = 0 and a = 1 exactly
        let interior = &self.values[1..n - 1];
        out[0] = 0.0;
        out[n - 1] = llr.iter().sum();
        let acc = &mut out[1..n - 1];
        acc.iter_mut().for_each(|o| *o = terms.shift);
        terms.prod.resize(interior.len(), 1.0);
        for (u, v) in terms.u.chunks(self.block).zip(terms.v.chunks(self.block)) {
            terms.prod.iter_mut().for_each(|p| *p = 1.0);
            for (&u, &v) in u.iter().zip(v) {
                let d = u - v;
                for (p, &a) in terms.prod.iter_mut().zip(interior) {
                    *p *= v + a * d;
                }
            }
            for (o, p) in acc.iter_mut().zip(&terms.prod) {
                *o += p.ln();
            }
        }
    }

    /// Writes `E[X_t | y] = sum_k w_k P(X_t = 1 | y_t, a_k)` into `out`.
    pub fn chip_means(&self, weights: &[f64], terms: &ChipTerms, out: &mut [f64]) {
        out.iter_mut().for_each(|m| *m = 0.0);
        for (&w, &a) in weights.iter().zip(&self.values) {
            if w == 0.0 || a == 0.0 {
                continue;
            }
            if a == 1.0 {
                out.iter_mut().for_each(|m| *m += w);
                continue;
            }
            // a e^l / ((1 - a) + a e^l) = a u / (v + a (u - v))
            let wa = w * a;
            for ((m, &u), &v) in out.iter_mut().zip(&terms.u).zip(&terms.v) {
                *m += wa * u / (v + a * (u - v));
            }
        }
    }
}

/// Posterior and conditional means for one rate-coded observation.
#[derive(Debug, Clone)]
pub struct RateEstimate {
    pub posterior: Posterior,
    pub chip_means: Vec<f64>,
    pub amplitude_mean: f64,
}

/// Exact product-of-mixtures posterior over levels plus `E[X_t | y]` and `E[A | y]`.
pub fn rate_posterior_and_means(
    y: &ReceivedTrain,
    cfg: &CodecConfig,
    snr: f64,
    prior: &[f64],
) -> Result<RateEstimate> {
    if y.len() != cfg.train_len {
        return Err(Error::InvalidInput(format!(
            "received {} samples for trains of {} chips",
            y.len(),
            cfg.train_len
        )));
    }
    if prior.len() != cfg.levels() {
        return Err(Error::InvalidInput(format!(
            "prior has {} entries for {} levels",
            prior.len(),
            cfg.levels()
        )));
    }
    if !(snr >= 0.0) {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    let levels = RateLevels::new(cfg.n_bits);
    let mut llr = vec![0.0; y.len()];
    chip_llrs(&y.samples, snr.sqrt(), &mut llr);
    let mut terms = ChipTerms::new(y.len());
    terms.fill(&llr);
    let mut lw = vec![0.0; levels.values.len()];
    levels.log_likelihoods(&llr, &mut terms, &mut lw);
    for (w, lp) in lw.iter_mut().zip(log_prior(prior)?) {
        *w += lp;
    }
    normalize_log_weights(&mut lw);
    let mut chip_means = vec![0.0; y.len()];
    levels.chip_means(&lw, &terms, &mut chip_means);
    let amplitude_mean: f64 = lw.iter().zip(&levels.values).map(|(w, v)| w * v).sum();
    Ok(RateEstimate {
        posterior: Posterior::from_normalized(lw),
        chip_means,
        amplitude_mean,
    })
}
