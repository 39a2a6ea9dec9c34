//! Mutual information from the MMSE curve via `dI/dsnr = mmse(snr) / 2` (nats),
//! plus the closed forms for a standard Gaussian input.

use std::f64::consts::LN_2;

use crate::codec::CodecConfig;
use crate::error::{Error, Result};

/// `I(snr) = ln(1 + snr) / 2` nats, the Gaussian-input mutual information.
pub fn gaussian_capacity(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    Ok(0.5 * snr.ln_1p())
}

/// `mmse(snr) = 1 / (1 + snr)` for a standard Gaussian input.
pub fn gaussian_mmse(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::Domain { what: "snr", value: snr });
    }
    Ok(1.0 / (1.0 + snr))
}

/// Entropy of a uniform `n_bits`-bit source, the ceiling on MI for any code.
pub fn mi_source_bound(cfg: &CodecConfig) -> f64 {
    f64::from(cfg.n_bits) * LN_2
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
                .collect()
        }
    }
}

/// `{0}`, ten linear points up to `1e-3`, and 40 log-spaced points on `[1e-3, 1e2]`.
pub fn default_snr_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend((1..=10).map(|i| 1e-4 * i as f64));
    grid.extend(log_spaced(1e-3, 1e2, 40));
    sort_dedup(&mut grid);
    grid
}

pub(crate) fn sort_dedup(grid: &mut Vec<f64>) {
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiCurve {
    pub snr_grid: Vec<f64>,
    pub mmse_values: Vec<f64>,
    pub mi_nats: Vec<f64>,
    pub mi_bits: Vec<f64>,
    /// Monte Carlo uncertainty propagated through the trapezoid rule.
    pub mi_stderr: Vec<f64>,
}

impl MiCurve {
    pub fn at_top(&self) -> f64 {
        *self.mi_nats.last().expect("nonempty curve")
    }
}

/// Cumulative trapezoid integral of `mmse / 2` from `snr = 0`.
pub fn integrate_mi(snr_grid: &[f64], mmse_values: &[f64]) -> Result<MiCurve> {
    let zeros = vec![0.0; mmse_values.len()];
    integrate_mi_with_stderr(snr_grid, mmse_values, &zeros)
}

/// As [`integrate_mi`], also propagating per-point standard errors (assumed
/// independent) in quadrature.
pub fn integrate_mi_with_stderr(
    snr_grid: &[f64],
    mmse_values: &[f64],
    mmse_stderr: &[f64],
) -> Result<MiCurve> {
    let n = snr_grid.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty snr grid".into()));
    }
    if mmse_values.len() != n || mmse_stderr.len() != n {
        return Err(Error::InvalidInput(format!(
            "{n} grid points but {} mmse values and {} stderrs",
            mmse_values.len(),
            mmse_stderr.len()
        )));
    }
    if snr_grid[0] != 0.0 {
        return Err(Error::InvalidInput(format!(
            "snr grid must start at 0, starts at {}",
            snr_grid[0]
        )));
    }
    if snr_grid.iter().any(|s| !s.is_finite()) || snr_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("snr grid must be finite and strictly increasing".into()));
    }
    if mmse_values.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
        return Err(Error::InvalidInput("mmse values must be finite and nonnegative".into()));
    }

    let mut mi_nats = Vec::with_capacity(n);
    let mut mi_stderr = Vec::with_capacity(n);
    let mut acc = 0.0;
    // variance of the integral up to point j, excluding j's own right-end weight
    let mut var_closed = 0.0;
    mi_nats.push(0.0);
    mi_stderr.push(0.0);
    for j in 1..n {
        let h = snr_grid[j] - snr_grid[j - 1];
        acc += 0.25 * h * (mmse_values[j - 1] + mmse_values[j]);
        mi_nats.push(acc);

        // weight of point j-1 is now final: (h_{j-1} + h_j) / 4
        let h_prev = if j >= 2 { snr_grid[j - 1] - snr_grid[j - 2] } else { 0.0 };
        let w_prev = 0.25 * (h_prev + h);
        var_closed += (w_prev * mmse_stderr[j - 1]).powi(2);
        let w_last = 0.25 * h;
        mi_stderr.push((var_closed + (w_last * mmse_stderr[j]).powi(2)).sqrt());
    }
    let mi_bits = mi_nats.iter().map(|v| v / LN_2).collect();
    Ok(MiCurve {
        snr_grid: snr_grid.to_vec(),
        mmse_values: mmse_values.to_vec(),
        mi_nats,
        mi_bits,
        mi_stderr,
    })
}
