//! Self-checks run by `spikelink validate`.
//!
//! Each check compares a measured deviation with a fixed tolerance. The
//! oracles are closed forms (Gaussian input), exhaustive quadrature over small
//! codebooks, and structural properties of the estimator.

use std::fmt;

use crate::codec::{
    burst_isi, burst_spike_count, codebook, encode_deterministic, max_level, Amplitude, CodecConfig, Scheme,
};
use crate::error::Result;
use crate::estimator::{brute_force_mmse, estimate_gaussian_mmse, prior_variance, EnergyNorm, Estimator};
use crate::info::{default_snr_grid, gaussian_capacity, gaussian_mmse, integrate_mi};
use crate::seed::mix;
use crate::sweep::{run_sweep, Preset, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Fewer trials and cells; finishes in seconds.
    pub quick: bool,
    pub seed: u64,
    /// Negative control: flips the sign of every likelihood.
    pub inject_fault: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            quick: false,
            seed: 42,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Worst deviation observed, in the unit of `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.4e}, tolerance {:.4e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Worst `|a - b| / sqrt(sa^2 + sb^2)`, with a zero-stderr pair counting as
/// infinitely far apart unless it is exactly equal.
fn z_score(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    let joint = (sa * sa + sb * sb).sqrt();
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else if joint == 0.0 {
        f64::INFINITY
    } else {
        d / joint
    }
}

pub fn run_validation(opts: ValidateOptions) -> Result<Report> {
    let mut checks = Vec::new();
    let trials: u64 = if opts.quick { 20_000 } else { 100_000 };

    checks.push(gaussian_self_test()?);
    checks.push(gaussian_monte_carlo(opts.seed, trials)?);
    checks.extend(brute_force_agreement(opts, trials)?);
    checks.extend(zero_information(opts.seed, trials)?);
    checks.extend(orthogonality(opts, trials)?);
    checks.push(monotonicity(opts)?);
    checks.extend(codec_contracts()?);
    checks.push(phase_saturation(opts.seed)?);
    Ok(Report { checks })
}

fn gaussian_self_test() -> Result<Check> {
    let grid = default_snr_grid();
    let mmse: Vec<f64> = grid.iter().map(|&s| gaussian_mmse(s)).collect::<Result<_>>()?;
    let curve = integrate_mi(&grid, &mmse)?;
    let mut worst = 0.0f64;
    for (&s, &mi) in grid.iter().zip(&curve.mi_nats) {
        let exact = gaussian_capacity(s)?;
        let rel = if exact == 0.0 { mi.abs() } else { (mi - exact).abs() / exact };
        worst = worst.max(rel);
    }
    Ok(Check::at_most(
        "gaussian I-MMSE integration",
        worst,
        0.01,
        format!("max relative error over {} grid points", grid.len()),
    ))
}

fn gaussian_monte_carlo(seed: u64, trials: u64) -> Result<Check> {
    let est = estimate_gaussian_mmse(1.0, trials, mix(seed, &[0x6761]))?;
    Ok(Check::at_most(
        "gaussian Monte Carlo mmse at snr 1",
        z_score(est.mmse_x, est.mmse_x_stderr, 0.5, 0.0),
        4.0,
        format!("estimate {:.5} vs 0.5, in stderr units", est.mmse_x),
    ))
}

fn brute_force_agreement(opts: ValidateOptions, trials: u64) -> Result<Vec<Check>> {
    let cfg = CodecConfig::new(2, 4)?;
    let nodes = if opts.quick { 16 } else { 24 };
    let mut out = Vec::new();
    for scheme in Scheme::ALL {
        let est = Estimator::new(scheme, &cfg)?;
        let mut worst = 0.0f64;
        for (i, &snr) in [0.5, 1.0, 4.0].iter().enumerate() {
            let mc = est.estimate(snr, trials, mix(opts.seed, &[0x6272, i as u64]))?;
            let exact = brute_force_mmse(scheme, &cfg, snr, nodes)?;
            worst = worst
                .max(z_score(mc.mmse_x, mc.mmse_x_stderr, exact.mmse_x, 0.0))
                .max(z_score(mc.mmse_a, mc.mmse_a_stderr, exact.mmse_a, 0.0));
        }
        out.push(Check::at_most(
            format!("brute force vs Monte Carlo, {scheme}"),
            worst,
            3.0,
            "n_bits 2, train_len 4, snr 0.5/1/4, in joint stderr units",
        ));
    }
    Ok(out)
}

fn zero_information(seed: u64, trials: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n_bits in [4u32, 8] {
        let cfg = CodecConfig::new(n_bits, 32)?;
        let target = prior_variance(n_bits);
        let mut worst = 0.0f64;
        for scheme in Scheme::ALL {
            let e = Estimator::new(scheme, &cfg)?.estimate(0.0, trials, mix(seed, &[0x7a65, n_bits as u64]))?;
            worst = worst.max(z_score(e.mmse_a, e.mmse_a_stderr, target, 0.0));
        }
        out.push(Check::at_most(
            format!("zero snr gives prior variance, n_bits {n_bits}"),
            worst,
            3.0,
            format!("target {target:.6}, in stderr units"),
        ));
    }
    Ok(out)
}

fn orthogonality(opts: ValidateOptions, trials: u64) -> Result<Vec<Check>> {
    let cfg = CodecConfig::new(4, 32)?;
    let mut out = Vec::new();
    for scheme in Scheme::ALL {
        let est = Estimator::new(scheme, &cfg)?.with_flipped_likelihood(opts.inject_fault);
        let mut worst = 0.0f64;
        for (i, &snr) in [0.3, 1.0, 3.0].iter().enumerate() {
            let e = est.estimate(snr, trials, mix(opts.seed, &[0x6f72, i as u64]))?;
            worst = worst.max(z_score(e.orthogonality, e.orthogonality_stderr, 0.0, 0.0));
        }
        out.push(Check::at_most(
            format!("orthogonality of the estimation error, {scheme}"),
            worst,
            5.0,
            "E[(A - Â) Â] in stderr units",
        ));
    }
    Ok(out)
}

fn monotonicity(opts: ValidateOptions) -> Result<Check> {
    let mut cfg = SweepConfig::preset(Preset::Quick);
    cfg.master_seed = opts.seed;
    if !opts.quick {
        cfg.n_bits_list = vec![4, 8];
        cfg.train_len_list = vec![16, 32];
        cfg.n_trials = 10_000;
    }
    let result = run_sweep(&cfg)?;
    let mut worst = 0.0f64;
    let mut max_norm = 0.0f64;
    for cell in &result.cells {
        for (w, e) in cell.estimates.windows(2).zip(cell.curve.mi_nats.windows(2)) {
            let (lo, hi) = (&w[0], &w[1]);
            if hi.mmse_x > lo.mmse_x {
                worst = worst.max(z_score(hi.mmse_x, hi.mmse_x_stderr, lo.mmse_x, lo.mmse_x_stderr));
            }
            if hi.mmse_a > lo.mmse_a {
                worst = worst.max(z_score(hi.mmse_a, hi.mmse_a_stderr, lo.mmse_a, lo.mmse_a_stderr));
            }
            if e[1] < e[0] {
                worst = f64::INFINITY;
            }
        }
        for e in &cell.estimates {
            max_norm = max_norm.max(e.max_normalization_error);
        }
    }
    let passed = worst <= 3.0 && max_norm <= 1e-12;
    Ok(Check {
        name: "mmse nonincreasing and MI nondecreasing in snr".into(),
        measured: worst,
        tolerance: 3.0,
        passed,
        detail: format!(
            "{} cells, worst rise in joint stderr units; posterior normalization error {max_norm:.1e} (limit 1e-12)",
            result.cells.len()
        ),
    })
}

fn codec_contracts() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut ttfs_worst = 0usize;
    for train_len in [16usize, 32, 64] {
        let cfg = CodecConfig::new(8, train_len)?;
        let book = codebook(Scheme::Ttfs, &cfg)?;
        ttfs_worst = ttfs_worst.max(book.trains().iter().map(|t| t.spike_count()).max().unwrap_or(0));
    }
    out.push(Check::at_most(
        "ttfs emits at most one spike",
        ttfs_worst as f64,
        1.0,
        "max spikes per train over all 256 levels",
    ));

    let mut phase_bad = 0usize;
    for n_bits in [1u32, 4, 8] {
        let cfg = CodecConfig::new(n_bits, 32)?;
        for level in 0..=max_level(n_bits) {
            let train = encode_deterministic(Scheme::Phase, Amplitude::new(level, n_bits)?, &cfg)?;
            let expected: Vec<usize> = (0..n_bits as usize)
                .filter(|&i| level >> (n_bits as usize - 1 - i) & 1 == 1)
                .map(|i| i * cfg.train_len / n_bits as usize)
                .collect();
            if train.spike_indices() != expected {
                phase_bad += 1;
            }
        }
    }
    out.push(Check::at_most(
        "phase spikes follow the binary expansion",
        phase_bad as f64,
        0.0,
        "mismatching levels at n_bits 1/4/8",
    ));

    let mut burst_bad = 0usize;
    for (n_bits, train_len) in [(4u32, 32usize), (8, 64)] {
        let cfg = CodecConfig::new(n_bits, train_len)?;
        let m = max_level(n_bits) as u64;
        for level in 0..=max_level(n_bits) {
            let a = Amplitude::new(level, n_bits)?;
            let k = level as u64;
            let ns = (k * cfg.n_max as u64).div_ceil(m) as usize;
            let span = (cfg.t_max - cfg.t_min) as u64;
            // a lone spike has no interval; t_max by convention
            let isi = if ns > 1 { cfg.t_max - (span * k / m) as usize } else { cfg.t_max };
            let expected: Vec<usize> = (0..ns).map(|j| j * isi).collect();
            let train = encode_deterministic(Scheme::Burst, a, &cfg)?;
            if burst_spike_count(a, &cfg) as usize != ns || burst_isi(a, &cfg) != isi || train.spike_indices() != expected {
                burst_bad += 1;
            }
        }
    }
    out.push(Check::at_most(
        "burst spike count and interval",
        burst_bad as f64,
        0.0,
        "mismatching levels at (4, 32) and (8, 64)",
    ));
    Ok(out)
}

fn phase_saturation(seed: u64) -> Result<Check> {
    let cfg = CodecConfig::new(4, 32)?;
    let e = Estimator::new(Scheme::Phase, &cfg)?
        .with_energy_norm(EnergyNorm::Off)?
        .estimate(1e4, 20_000, mix(seed, &[0x7361]))?;
    Ok(Check::at_most(
        "phase mmse_a at snr 1e4",
        e.mmse_a,
        1e-4,
        "injective codebook, n_bits 4, train_len 32",
    ))
}
