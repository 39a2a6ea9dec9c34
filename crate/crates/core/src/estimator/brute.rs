//! Exhaustive reference for the Monte Carlo estimator on small instances.
//!
//! The transmitted train is enumerated as a joint hypothesis `(level, chip
//! pattern)` with its exact prior probability (rate coding contributes the
//! Bernoulli pattern probabilities), and the channel noise is integrated out
//! with a tensor Gauss–Hermite rule. The conditional means are computed from
//! the joint posterior over hypotheses with full squared distances, so no
//! code is shared with the factorized fast path.

use std::f64::consts::PI;

use super::MmseEstimate;
use crate::codec::{codebook, level_values, CodecConfig, Scheme};
use crate::error::{Error, Result};

pub const BRUTE_MAX_LEVELS: usize = 16;
pub const BRUTE_MAX_TRAIN_LEN: usize = 6;
const MAX_NODES_PER_DIM: usize = 64;
const MAX_TENSOR_POINTS: u64 = 20_000_000;

/// Gauss–Hermite nodes and weights for `∫ e^{-x^2} f(x) dx`, by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

struct Hypothesis {
    prob: f64,
    amplitude: f64,
    chips: Vec<f64>,
}

fn hypotheses(scheme: Scheme, cfg: &CodecConfig) -> Result<Vec<Hypothesis>> {
    let values = level_values(cfg.n_bits);
    let p_level = 1.0 / values.len() as f64;
    let len = cfg.train_len;
    if scheme.is_deterministic() {
        let book = codebook(scheme, cfg)?;
        return Ok(book
            .trains()
            .iter()
            .zip(&values)
            .map(|(t, &a)| Hypothesis {
                prob: p_level,
                amplitude: a,
                chips: t.to_f64(),
            })
            .collect());
    }
    let mut out = Vec::new();
    for &a in &values {
        for pattern in 0u32..(1 << len) {
            let ones = pattern.count_ones() as i32;
            let prob = p_level * a.powi(ones) * (1.0 - a).powi(len as i32 - ones);
            if prob > 0.0 {
                out.push(Hypothesis {
                    prob,
                    amplitude: a,
                    chips: (0..len).map(|t| f64::from((pattern >> t) & 1)).collect(),
                });
            }
        }
    }
    Ok(out)
}

/// MMSE by enumeration of every transmitted train and `nodes`-point
/// Gauss–Hermite quadrature per chip. Standard errors are reported as zero.
pub fn brute_force_mmse(scheme: Scheme, cfg: &CodecConfig, snr: f64, nodes: usize) -> Result<MmseEstimate> {
    cfg.validate_for(scheme)?;
    if !(snr >= 0.0) || snr.is_infinite() {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    if cfg.levels() > BRUTE_MAX_LEVELS || cfg.train_len > BRUTE_MAX_TRAIN_LEN {
        return Err(Error::TooLarge(format!(
            "{} levels x {} chips (limit {BRUTE_MAX_LEVELS} x {BRUTE_MAX_TRAIN_LEN})",
            cfg.levels(),
            cfg.train_len
        )));
    }
    if nodes == 0 || nodes > MAX_NODES_PER_DIM {
        return Err(Error::InvalidInput(format!(
            "quadrature nodes per chip must be in 1..={MAX_NODES_PER_DIM}, got {nodes}"
        )));
    }
    let len = cfg.train_len;
    let points = (nodes as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
    if points > MAX_TENSOR_POINTS {
        return Err(Error::TooLarge(format!(
            "{nodes}^{len} quadrature points exceeds {MAX_TENSOR_POINTS}"
        )));
    }

    let hyps = hypotheses(scheme, cfg)?;
    // the received signal depends on the hypothesis only through its chips
    let mut patterns: Vec<Vec<f64>> = Vec::new();
    let mut pattern_of = Vec::with_capacity(hyps.len());
    for h in &hyps {
        let k = match patterns.iter().position(|p| *p == h.chips) {
            Some(k) => k,
            None => {
                patterns.push(h.chips.clone());
                patterns.len() - 1
            }
        };
        pattern_of.push(k);
    }
    let (gx, gw) = gauss_hermite(nodes);
    let noise: Vec<f64> = gx.iter().map(|x| x * 2f64.sqrt()).collect();
    let weight: Vec<f64> = gw.iter().map(|w| w / PI.sqrt()).collect();
    let gain = snr.sqrt();
    let log_prior: Vec<f64> = hyps.iter().map(|h| h.prob.ln()).collect();

    let mut mmse_x = 0.0;
    let mut mmse_a = 0.0;
    let mut orth = 0.0;
    let mut max_dev: f64 = 0.0;
    let mut idx = vec![0usize; len];
    let mut y = vec![0.0; len];
    let mut log_lik = vec![0.0; patterns.len()];
    let mut post = vec![0.0; hyps.len()];
    let mut pattern_mass = vec![0.0; patterns.len()];
    let mut x_hat = vec![0.0; len];
    for (sent, chips) in patterns.iter().enumerate() {
        let truths: Vec<&Hypothesis> = hyps
            .iter()
            .zip(&pattern_of)
            .filter(|(_, &k)| k == sent)
            .map(|(h, _)| h)
            .collect();
        idx.iter_mut().for_each(|i| *i = 0);
        loop {
            let mut w_node = 1.0;
            for t in 0..len {
                y[t] = gain * chips[t] + noise[idx[t]];
                w_node *= weight[idx[t]];
            }
            for (ll, c) in log_lik.iter_mut().zip(&patterns) {
                let d2: f64 = y.iter().zip(c).map(|(yt, c)| (yt - gain * c).powi(2)).sum();
                *ll = -0.5 * d2;
            }
            for (p, (lp, &k)) in post.iter_mut().zip(log_prior.iter().zip(&pattern_of)) {
                *p = lp + log_lik[k];
            }
            let top = post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = post.iter().map(|p| (p - top).exp()).sum();
            pattern_mass.iter_mut().for_each(|v| *v = 0.0);
            let mut a_hat = 0.0;
            let mut total = 0.0;
            for ((p, h), &k) in post.iter().zip(&hyps).zip(&pattern_of) {
                let pk = (p - top).exp() / z;
                total += pk;
                a_hat += pk * h.amplitude;
                pattern_mass[k] += pk;
            }
            x_hat.iter_mut().for_each(|v| *v = 0.0);
            for (m, c) in pattern_mass.iter().zip(&patterns) {
                for (v, c) in x_hat.iter_mut().zip(c) {
                    *v += m * c;
                }
            }
            max_dev = max_dev.max((total - 1.0).abs());
            let ex: f64 = chips.iter().zip(&x_hat).map(|(c, v)| (c - v).powi(2)).sum();
            for truth in &truths {
                let w = w_node * truth.prob;
                let ea = truth.amplitude - a_hat;
                mmse_x += w * ex;
                mmse_a += w * ea * ea;
                orth += w * ea * a_hat;
            }

            // odometer over the tensor grid
            let mut t = 0;
            while t < len {
                idx[t] += 1;
                if idx[t] < nodes {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
            if t == len {
                break;
            }
        }
    }
    Ok(MmseEstimate {
        mmse_x,
        mmse_x_stderr: 0.0,
        mmse_a,
        mmse_a_stderr: 0.0,
        orthogonality: orth,
        orthogonality_stderr: 0.0,
        max_normalization_error: max_dev,
        n_trials: points * hyps.len() as u64,
    })
}
