use super::{Amplitude, CodecConfig, SpikeTrain};
use crate::error::{Error, Result};

/// Phase coding: bit `i` of the level (MSB first) occupies chip
/// `floor(i * train_len / n_bits)`; a 1-bit emits a unit pulse there.
pub fn encode_phase(a: Amplitude, cfg: &CodecConfig) -> Result<SpikeTrain> {
    let n_bits = cfg.n_bits as usize;
    if cfg.train_len < n_bits {
        return Err(Error::config(format!(
            "phase coding needs train_len >= n_bits ({} < {n_bits})",
            cfg.train_len
        )));
    }
    if u64::from(a.level()) >> cfg.n_bits != 0 {
        return Err(Error::InvalidInput(format!(
            "level {} does not fit in {n_bits} bits",
            a.level()
        )));
    }
    let mut train = SpikeTrain::silent(cfg.train_len);
    for i in 0..n_bits {
        if (a.level() >> (n_bits - 1 - i)) & 1 == 1 {
            train.chips[i * cfg.train_len / n_bits] = true;
        }
    }
    Ok(train)
}
