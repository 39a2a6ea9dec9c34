use super::{Amplitude, CodecConfig, SpikeTrain};

/// First chip `k` at which `value >= theta0 * exp(-(k / train_len) / tau_th)`.
///
/// Returns `None` if the threshold is never reached inside the train.
pub fn ttfs_fire_index_value(value: f64, cfg: &CodecConfig) -> Option<usize> {
    let len = cfg.train_len as f64;
    (0..cfg.train_len).find(|&k| value >= cfg.theta0 * (-(k as f64 / len) / cfg.tau_th).exp())
}

pub fn ttfs_fire_index(a: Amplitude, cfg: &CodecConfig) -> Option<usize> {
    ttfs_fire_index_value(a.value(), cfg)
}

/// Time-to-first-spike coding: at most one spike, at the fire index.
pub fn encode_ttfs(a: Amplitude, cfg: &CodecConfig) -> SpikeTrain {
    let mut train = SpikeTrain::silent(cfg.train_len);
    if let Some(k) = ttfs_fire_index(a, cfg) {
        train.chips[k] = true;
    }
    train
}
