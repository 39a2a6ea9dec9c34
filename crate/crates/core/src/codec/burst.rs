use super::{Amplitude, CodecConfig, SpikeTrain};
use crate::error::{Error, Result};

/// Spikes in the burst, `ceil(A * n_max)`, evaluated in exact integer arithmetic.
pub fn burst_spike_count(a: Amplitude, cfg: &CodecConfig) -> u32 {
    let num = u64::from(a.level()) * u64::from(cfg.n_max);
    num.div_ceil(u64::from(a.full_scale())) as u32
}

/// Inter-spike interval in chips: `ceil(t_max - (t_max - t_min) * A)` for
/// bursts of two or more spikes, `t_max` otherwise.
pub fn burst_isi(a: Amplitude, cfg: &CodecConfig) -> usize {
    if burst_spike_count(a, cfg) > 1 {
        // ceil(t_max - x) == t_max - floor(x), x >= 0
        let span = (cfg.t_max - cfg.t_min) as u64;
        cfg.t_max - (span * u64::from(a.level()) / u64::from(a.full_scale())) as usize
    } else {
        cfg.t_max
    }
}

/// Burst coding: `N_s` spikes at chips `0, ISI, 2 ISI, ...`.
pub fn encode_burst(a: Amplitude, cfg: &CodecConfig) -> Result<SpikeTrain> {
    let max_span = (cfg.n_max.max(1) as usize - 1) * cfg.t_max + 1;
    if max_span > cfg.train_len {
        return Err(Error::config(format!(
            "maximal burst spans {max_span} chips but train_len is {}",
            cfg.train_len
        )));
    }
    let count = burst_spike_count(a, cfg) as usize;
    let isi = burst_isi(a, cfg);
    let mut train = SpikeTrain::silent(cfg.train_len);
    for n in 0..count {
        train.chips[n * isi] = true;
    }
    Ok(train)
}
