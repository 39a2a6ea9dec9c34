//! Experiment matrix: schemes × quantizer resolutions × train lengths × noise grid.
//!
//! Each feasible cell is evaluated on an snr grid made of the display points
//! (`snr = 1 / sigma2`), the origin, and log-spaced support points that keep
//! the trapezoid rule resolved down to `snr = 1e-3`. Support is denser above
//! `snr = 1`, where the MMSE curves of the discrete codes fall steeply and
//! the trapezoid bias concentrates. Mutual information is integrated over
//! that grid and reported at the display points only.

mod config_file;
mod csv_io;
mod plot;

use std::time::Instant;

use crate::codec::{CodecConfig, Scheme};
use crate::error::{Error, Result};
use crate::estimator::{EnergyNorm, Estimator, MmseEstimate};
use crate::exec::Execution;
use crate::info::{integrate_mi_with_stderr, log_spaced, sort_dedup, MiCurve};
use crate::seed::point_seed;

pub use config_file::SweepOverrides;
pub use csv_io::{read_csv, write_csv, write_csv_atomic, CSV_HEADER};
pub use plot::{emit_plots, PlotOptions};

/// Lowest snr kept resolved by support points.
pub const SUPPORT_FLOOR_SNR: f64 = 1e-3;
/// Largest log10 step between neighbouring positive support points.
pub const MAX_LOG_STEP: f64 = 1.0 / 6.0;
/// Largest log10 step at and above [`FINE_FROM_SNR`].
pub const FINE_LOG_STEP: f64 = 1.0 / 18.0;
pub const FINE_FROM_SNR: f64 = 1.0;

pub const DEFAULT_SIGMA2_MIN: f64 = 1e-2;
pub const DEFAULT_SIGMA2_MAX: f64 = 1e2;
pub const DEFAULT_SIGMA2_POINTS: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub schemes: Vec<Scheme>,
    pub n_bits_list: Vec<u32>,
    pub train_len_list: Vec<usize>,
    /// Noise variances for display; `inf` stands for snr = 0.
    pub sigma2_grid: Vec<f64>,
    pub n_trials: u64,
    pub master_seed: u64,
    pub energy_norm: EnergyNorm,
    /// Fill the `wall_ms` column; off keeps output byte-reproducible.
    pub record_timing: bool,
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            schemes: Scheme::ALL.to_vec(),
            n_bits_list: vec![4, 8],
            train_len_list: vec![16, 32, 64],
            sigma2_grid: default_sigma2_grid(),
            n_trials: 100_000,
            master_seed: 42,
            energy_norm: EnergyNorm::Off,
            record_timing: false,
            execution: Execution::default(),
        }
    }
}

pub fn default_sigma2_grid() -> Vec<f64> {
    log_spaced(DEFAULT_SIGMA2_MIN, DEFAULT_SIGMA2_MAX, DEFAULT_SIGMA2_POINTS)
}

/// Named starting points for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// The full matrix at 10^5 trials per point.
    Paper,
    /// One resolution and train length, a coarse grid and few trials.
    Quick,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "quick" => Ok(Preset::Quick),
            other => Err(Error::InvalidInput(format!(
                "unknown preset `{other}` (expected paper or quick)"
            ))),
        }
    }
}

impl SweepConfig {
    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::Paper => SweepConfig::default(),
            Preset::Quick => SweepConfig {
                n_bits_list: vec![4],
                train_len_list: vec![32],
                sigma2_grid: log_spaced(DEFAULT_SIGMA2_MIN, DEFAULT_SIGMA2_MAX, 9),
                n_trials: 2_000,
                ..SweepConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() || self.n_bits_list.is_empty() || self.train_len_list.is_empty() {
            return Err(Error::config("schemes, n_bits and train_len lists must be nonempty"));
        }
        if self.sigma2_grid.is_empty() {
            return Err(Error::config("sigma2 grid is empty"));
        }
        if let Some(bad) = self.sigma2_grid.iter().find(|s| !(**s > 0.0)) {
            return Err(Error::config(format!("sigma2 values must be > 0, got {bad}")));
        }
        if self.n_trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        Ok(())
    }

    /// Cells in output order: scheme, then n_bits, then train_len.
    pub fn cells(&self) -> Vec<(Scheme, u32, usize)> {
        let mut schemes = self.schemes.clone();
        schemes.sort();
        schemes.dedup();
        let mut bits = self.n_bits_list.clone();
        bits.sort_unstable();
        bits.dedup();
        let mut lens = self.train_len_list.clone();
        lens.sort_unstable();
        lens.dedup();
        let mut out = Vec::new();
        for &s in &schemes {
            for &b in &bits {
                for &l in &lens {
                    out.push((s, b, l));
                }
            }
        }
        out
    }

    /// Display grid, descending in sigma2.
    pub fn sigma2_descending(&self) -> Vec<f64> {
        let mut g = self.sigma2_grid.clone();
        g.sort_by(|a, b| b.total_cmp(a));
        g.dedup();
        g
    }
}

fn snr_of(sigma2: f64) -> f64 {
    if sigma2.is_infinite() {
        0.0
    } else {
        1.0 / sigma2
    }
}

/// Integration grid for a set of display snrs: the origin, the display
/// points, and log-spaced fill so that positive points from
/// [`SUPPORT_FLOOR_SNR`] upward are at most [`MAX_LOG_STEP`] decades apart,
/// or [`FINE_LOG_STEP`] from [`FINE_FROM_SNR`] upward.
pub fn evaluation_snr_grid(display_snrs: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = vec![0.0];
    grid.extend(display_snrs.iter().copied().filter(|s| *s > 0.0));
    let lowest = grid.iter().copied().filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    let highest = grid.iter().copied().fold(0.0, f64::max);
    if lowest.is_finite() && lowest > SUPPORT_FLOOR_SNR {
        grid.push(SUPPORT_FLOOR_SNR);
    }
    if highest > FINE_FROM_SNR {
        grid.push(FINE_FROM_SNR);
    }
    sort_dedup(&mut grid);
    let mut filled = vec![0.0];
    for w in grid[1..].windows(2) {
        let (lo, hi) = (w[0], w[1]);
        filled.push(lo);
        if lo >= SUPPORT_FLOOR_SNR {
            let decades = (hi / lo).log10();
            let max_step = if lo >= FINE_FROM_SNR { FINE_LOG_STEP } else { MAX_LOG_STEP };
            let steps = (decades / max_step - 1e-9).ceil() as usize;
            if steps > 1 {
                let pts = log_spaced(lo, hi, steps + 1);
                filled.extend_from_slice(&pts[1..steps]);
            }
        }
    }
    if grid.len() > 1 {
        filled.push(*grid.last().unwrap());
    }
    sort_dedup(&mut filled);
    filled
}

/// One output row: a cell evaluated at one display noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub n_bits: u32,
    pub train_len: usize,
    pub sigma2: f64,
    pub snr: f64,
    pub mmse_x_train: f64,
    pub mmse_x_train_stderr: f64,
    pub mmse_x_chip: f64,
    pub mmse_a: f64,
    pub mmse_a_stderr: f64,
    pub mi_nats: f64,
    pub mi_bits: f64,
    pub mi_stderr: f64,
    pub n_trials: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCell {
    pub scheme: Scheme,
    pub n_bits: u32,
    pub train_len: usize,
    pub reason: String,
}

/// Everything computed for one cell, including the support points that are
/// not written to CSV.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub scheme: Scheme,
    pub n_bits: u32,
    pub train_len: usize,
    pub estimates: Vec<MmseEstimate>,
    pub curve: MiCurve,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedCell>,
    /// Full per-cell detail; empty when the result was read back from CSV.
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn rows_for(&self, scheme: Scheme, n_bits: u32, train_len: usize) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.scheme == scheme && r.n_bits == n_bits && r.train_len == train_len)
    }

    pub fn row(&self, scheme: Scheme, n_bits: u32, train_len: usize, sigma2: f64) -> Option<&SweepRow> {
        self.rows_for(scheme, n_bits, train_len).find(|r| r.sigma2 == sigma2)
    }

    pub fn cell(&self, scheme: Scheme, n_bits: u32, train_len: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.scheme == scheme && c.n_bits == n_bits && c.train_len == train_len)
    }

    /// Distinct `(n_bits, train_len)` pairs with at least one row.
    pub fn panels(&self) -> Vec<(u32, usize)> {
        let mut p: Vec<_> = self.rows.iter().map(|r| (r.n_bits, r.train_len)).collect();
        p.sort_unstable();
        p.dedup();
        p
    }
}

/// Runs every cell of the matrix. Infeasible cells are skipped with a warning.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let display = cfg.sigma2_descending();
    let display_snrs: Vec<f64> = display.iter().map(|&s| snr_of(s)).collect();
    let grid = evaluation_snr_grid(&display_snrs);
    let mut result = SweepResult::default();

    for (scheme, n_bits, train_len) in cfg.cells() {
        let estimator = CodecConfig::new(n_bits, train_len).and_then(|codec| {
            Estimator::new(scheme, &codec)?
                .with_energy_norm(cfg.energy_norm)
                .map(|e| e.with_execution(cfg.execution))
        });
        let estimator = match estimator {
            Ok(e) => e,
            Err(err) => {
                log::warn!("skipping {scheme} n_bits={n_bits} train_len={train_len}: {err}");
                result.skipped.push(SkippedCell {
                    scheme,
                    n_bits,
                    train_len,
                    reason: err.to_string(),
                });
                continue;
            }
        };
        log::info!("{scheme} n_bits={n_bits} train_len={train_len}: {} snr points", grid.len());

        let mut estimates = Vec::with_capacity(grid.len());
        let mut wall = Vec::with_capacity(grid.len());
        for (i, &snr) in grid.iter().enumerate() {
            let started = Instant::now();
            let est = estimator.estimate(snr, cfg.n_trials, point_seed(cfg.master_seed, n_bits, train_len, i))?;
            wall.push(started.elapsed().as_millis() as u64);
            if !(est.mmse_x.is_finite() && est.mmse_a.is_finite()) {
                return Err(Error::Numerical(format!(
                    "{scheme} n_bits={n_bits} train_len={train_len} snr={snr}: non-finite MMSE"
                )));
            }
            estimates.push(est);
        }
        let mmse: Vec<f64> = estimates.iter().map(|e| e.mmse_x).collect();
        let se: Vec<f64> = estimates.iter().map(|e| e.mmse_x_stderr).collect();
        let curve = integrate_mi_with_stderr(&grid, &mmse, &se)?;

        for (&sigma2, &snr) in display.iter().zip(&display_snrs) {
            let i = grid
                .iter()
                .position(|&g| g == snr)
                .expect("display snr is on the evaluation grid");
            let e = &estimates[i];
            result.rows.push(SweepRow {
                scheme,
                n_bits,
                train_len,
                sigma2,
                snr,
                mmse_x_train: e.mmse_x,
                mmse_x_train_stderr: e.mmse_x_stderr,
                mmse_x_chip: e.mmse_x_per_chip(train_len),
                mmse_a: e.mmse_a,
                mmse_a_stderr: e.mmse_a_stderr,
                mi_nats: curve.mi_nats[i],
                mi_bits: curve.mi_bits[i],
                mi_stderr: curve.mi_stderr[i],
                n_trials: e.n_trials,
                wall_ms: if cfg.record_timing { wall[i] } else { 0 },
            });
        }
        result.cells.push(CellResult {
            scheme,
            n_bits,
            train_len,
            estimates,
            curve,
        });
    }
    Ok(result)
}
