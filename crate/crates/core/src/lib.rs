//! Link-level simulation of neuromorphic spike codes used as impulse-radio
//! modulations over an AWGN channel.
//!
//! The pipeline is: quantized amplitude → spike train ([`codec`]) → AWGN
//! ([`channel`]) → conditional-mean estimate and Monte Carlo MMSE
//! ([`estimator`]) → mutual information by integrating the MMSE over snr
//! ([`info`]). [`sweep`] runs the full scheme × resolution × train length ×
//! noise grid and writes CSV tables and SVG plots.

pub mod channel;
pub mod codec;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod info;
pub mod seed;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
