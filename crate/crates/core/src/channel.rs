//! Discrete-time AWGN channel `Y = sqrt(snr) X + N`, `N ~ N(0, 1)` per chip.
//!
//! Noise is fixed at unit variance and the signal is scaled; the noise
//! variance shown on plot axes is the reciprocal view `sigma2 = 1 / snr`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::codec::SpikeTrain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    snr: f64,
}

impl ChannelParams {
    pub fn from_snr(snr: f64) -> Result<Self> {
        if !(snr >= 0.0) || snr.is_infinite() {
            return Err(Error::Domain { what: "snr", value: snr });
        }
        Ok(ChannelParams { snr })
    }

    /// `sigma2 = inf` is accepted and means a silent channel (snr = 0).
    pub fn from_sigma2(sigma2: f64) -> Result<Self> {
        Self::from_snr(snr_from_sigma2(sigma2)?)
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// Equivalent noise variance for a unit-amplitude signal; infinite at snr = 0.
    pub fn sigma2(&self) -> f64 {
        1.0 / self.snr
    }

    pub fn gain(&self) -> f64 {
        self.snr.sqrt()
    }
}

pub fn snr_from_sigma2(sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::Domain { what: "sigma2", value: sigma2 });
    }
    Ok(1.0 / sigma2)
}

pub fn sigma2_from_snr(snr: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    Ok(1.0 / snr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedTrain {
    pub samples: Vec<f64>,
}

impl ReceivedTrain {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Passes a spike train through the channel, one independent noise draw per chip.
pub fn transmit<R: Rng + ?Sized>(x: &SpikeTrain, p: ChannelParams, rng: &mut R) -> ReceivedTrain {
    transmit_with(x, p, || rng.sample(StandardNormal))
}

/// Like [`transmit`] but with an explicit noise source, in chip order.
pub fn transmit_with(
    x: &SpikeTrain,
    p: ChannelParams,
    mut noise: impl FnMut() -> f64,
) -> ReceivedTrain {
    let gain = p.gain();
    let samples = x
        .chips()
        .iter()
        .map(|&c| if c { gain } else { 0.0 } + noise())
        .collect();
    ReceivedTrain { samples }
}
