//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails at the
//! end if any criterion failed. Criteria 5 and 7 share the two full CLI
//! sweeps, so the whole target takes a while in a release-like profile.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use spikelink::codec::{burst_isi, burst_spike_count, codebook, encode_deterministic, Amplitude, CodecConfig, Scheme};
use spikelink::estimator::{brute_force_mmse, prior_variance, Estimator};
use spikelink::info::{default_snr_grid, gaussian_capacity, gaussian_mmse, integrate_mi};
use spikelink::seed::mix;
use spikelink::sweep::{
    default_sigma2_grid, evaluation_snr_grid, read_csv, run_sweep, Preset, SweepConfig, SweepResult, SweepRow,
};

const SEED: u64 = 42;

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
    secs: f64,
}

fn record(out: &mut Vec<Outcome>, id: u32, title: &'static str, f: impl FnOnce() -> (bool, String)) {
    let t = Instant::now();
    let (passed, detail) = f();
    let o = Outcome {
        id,
        title,
        passed,
        detail,
        secs: t.elapsed().as_secs_f64(),
    };
    println!(
        "[{}] criterion {}: {} | {} | {:.1}s",
        if o.passed { "PASS" } else { "FAIL" },
        o.id,
        o.title,
        o.detail,
        o.secs
    );
    out.push(o);
}

fn joint(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

// ---- 1 ------------------------------------------------------------------

fn gaussian_self_test() -> (bool, String) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut where_ = 0.0;
    // the integration grid used by the sweep on the default noise grid, and
    // the dense grid used for standalone integration
    let display: Vec<f64> = default_sigma2_grid().iter().map(|s| 1.0 / s).collect();
    let grids = [evaluation_snr_grid(&display), default_snr_grid()];
    let mut at_one = f64::NAN;
    for (g, grid) in grids.iter().enumerate() {
        let mmse: Vec<f64> = grid.iter().map(|&s| gaussian_mmse(s).unwrap()).collect();
        let curve = integrate_mi(grid, &mmse).unwrap();
        for (&s, &mi) in grid.iter().zip(&curve.mi_nats) {
            if g == 0 && !display.contains(&s) {
                continue;
            }
            let exact = gaussian_capacity(s).unwrap();
            let rel = if exact == 0.0 { mi.abs() } else { (mi - exact).abs() / exact };
            if rel > worst {
                worst = rel;
                where_ = s;
            }
            if s == 1.0 {
                at_one = mi;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let m1 = gaussian_mmse(1.0).unwrap();
    let c1 = gaussian_capacity(1.0).unwrap();
    let ok = worst <= 0.01
        && m1 == 0.5
        && (c1 - 0.34657).abs() < 5e-6
        && (at_one - 0.34657).abs() <= 0.01 * 0.34657
        && secs < 1.0;
    (
        ok,
        format!(
            "max rel err {worst:.4} at snr {where_:.3e} (tol 0.01); mmse(1)={m1}, I(1)={c1:.5} nats, integrated I(1)={at_one:.5}; {secs:.3}s (limit 1s)"
        ),
    )
}

// ---- 2 ------------------------------------------------------------------

fn oracle_equivalence() -> (bool, String) {
    let t = Instant::now();
    let cfg = CodecConfig::new(2, 4).unwrap();
    let est = Estimator::new(Scheme::Rate, &cfg).unwrap();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (i, &snr) in [0.5, 1.0, 4.0].iter().enumerate() {
        let mc = est.estimate(snr, 100_000, mix(SEED, &[2, i as u64])).unwrap();
        let exact = brute_force_mmse(Scheme::Rate, &cfg, snr, 24).unwrap();
        let zx = (mc.mmse_x - exact.mmse_x).abs() / joint(mc.mmse_x_stderr, exact.mmse_x_stderr);
        let za = (mc.mmse_a - exact.mmse_a).abs() / joint(mc.mmse_a_stderr, exact.mmse_a_stderr);
        worst = worst.max(zx).max(za);
        parts.push(format!(
            "snr {snr}: x {:.5} vs {:.5} ({zx:.2}σ), a {:.5} vs {:.5} ({za:.2}σ)",
            mc.mmse_x, exact.mmse_x, mc.mmse_a, exact.mmse_a
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    (
        worst <= 3.0 && secs < 60.0,
        format!("{}; worst {worst:.2}σ (tol 3σ); {secs:.1}s (limit 60s)", parts.join("; ")),
    )
}

// ---- 3 ------------------------------------------------------------------

fn zero_information(small: &SweepResult) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    // closed form of the discrete-uniform variance on {0, 1/M, ..., 1}
    for (n_bits, stated) in [(4u32, 0.09444), (8, 0.083987)] {
        let target = prior_variance(n_bits);
        ok &= (target - stated).abs() < 5e-6;
        let cfg = CodecConfig::new(n_bits, 32).unwrap();
        let mut worst = 0.0f64;
        for scheme in Scheme::ALL {
            let e = Estimator::new(scheme, &cfg)
                .unwrap()
                .estimate(0.0, 100_000, mix(SEED, &[3, n_bits as u64]))
                .unwrap();
            worst = worst.max((e.mmse_a - target).abs() / e.mmse_a_stderr);
        }
        ok &= worst <= 3.0;
        parts.push(format!("n_bits {n_bits}: prior var {target:.6}, worst {worst:.2}σ (tol 3σ)"));
    }
    let mi0_max = small
        .cells
        .iter()
        .map(|c| {
            assert_eq!(c.curve.snr_grid[0], 0.0);
            c.curve.mi_nats[0].abs()
        })
        .fold(0.0, f64::max);
    ok &= mi0_max == 0.0 && !small.cells.is_empty();
    parts.push(format!("MI(0) max |value| {mi0_max} over {} cells", small.cells.len()));
    (ok, parts.join("; "))
}

// ---- 4 ------------------------------------------------------------------

fn saturation(paper: &[SweepRow]) -> (bool, String) {
    // same relative accuracy the integrator is held to against the gaussian closed form
    const INTEGRATION_REL_TOL: f64 = 0.01;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut cells: BTreeMap<(u32, usize), Vec<&SweepRow>> = BTreeMap::new();
    for r in paper.iter().filter(|r| r.scheme == Scheme::Phase) {
        cells.entry((r.n_bits, r.train_len)).or_default().push(r);
    }
    for ((n_bits, len), rows) in &cells {
        let nb = f64::from(*n_bits);
        let top = rows.iter().max_by(|a, b| a.snr.total_cmp(&b.snr)).unwrap();
        let peak = rows
            .iter()
            .map(|r| r.mi_bits - 3.0 * r.mi_stderr / LN_2)
            .fold(f64::NEG_INFINITY, f64::max);
        let reach = top.mi_bits >= 0.95 * nb;
        let cap = nb * (1.0 + INTEGRATION_REL_TOL);
        let bounded = peak <= cap;
        ok &= reach && bounded;
        parts.push(format!(
            "({n_bits},{len}) top {:.4} bits (need ≥ {:.2}), max-3se {:.4} (cap {:.2})",
            top.mi_bits,
            0.95 * nb,
            peak,
            cap
        ));
    }
    ok &= !cells.is_empty();
    for n_bits in [4u32, 8] {
        let cfg = CodecConfig::new(n_bits, 32).unwrap();
        let e = Estimator::new(Scheme::Phase, &cfg)
            .unwrap()
            .estimate(1e4, 100_000, mix(SEED, &[4, n_bits as u64]))
            .unwrap();
        ok &= e.mmse_a < 1e-4;
        parts.push(format!("mmse_a(snr 1e4, n_bits {n_bits}) = {:.2e} (< 1e-4)", e.mmse_a));
    }
    (ok, parts.join("; "))
}

// ---- 5 ------------------------------------------------------------------

fn ranking(paper: &[SweepRow]) -> (bool, String) {
    let mut idx: BTreeMap<(u32, usize, u64, Scheme), &SweepRow> = BTreeMap::new();
    for r in paper {
        idx.insert((r.n_bits, r.train_len, r.sigma2.to_bits(), r.scheme), r);
    }
    let mut points = 0;
    let mut burst_mmse = Vec::new();
    let mut burst_mi = Vec::new();
    let mut ttfs_worst = Vec::new();
    let mut phase_rate = Vec::new();
    let mut max_pr_z = 0.0f64;
    for n_bits in [4u32, 8] {
        for len in [32usize, 64] {
            let mut sigmas: Vec<f64> = paper
                .iter()
                .filter(|r| r.n_bits == n_bits && r.train_len == len && (0.1..=10.0).contains(&r.sigma2))
                .map(|r| r.sigma2)
                .collect();
            sigmas.sort_by(f64::total_cmp);
            sigmas.dedup();
            for s in sigmas {
                let get = |sc: Scheme| idx.get(&(n_bits, len, s.to_bits(), sc)).copied();
                let (Some(rate), Some(ttfs), Some(phase), Some(burst)) =
                    (get(Scheme::Rate), get(Scheme::Ttfs), get(Scheme::Phase), get(Scheme::Burst))
                else {
                    burst_mmse.push(format!("missing rows at ({n_bits},{len},{s})"));
                    continue;
                };
                points += 1;
                let tag = format!("({n_bits},{len},σ²={s:.3})");
                if !(burst.mmse_a < rate.mmse_a && burst.mmse_a < ttfs.mmse_a && burst.mmse_a < phase.mmse_a) {
                    burst_mmse.push(tag.clone());
                }
                if !(burst.mi_bits > rate.mi_bits && burst.mi_bits > ttfs.mi_bits && burst.mi_bits > phase.mi_bits) {
                    burst_mi.push(tag.clone());
                }
                if !(ttfs.mmse_a >= phase.mmse_a && ttfs.mmse_a >= rate.mmse_a) {
                    ttfs_worst.push(tag.clone());
                }
                let z = (phase.mmse_a - rate.mmse_a).abs() / joint(phase.mmse_a_stderr, rate.mmse_a_stderr);
                max_pr_z = max_pr_z.max(z);
                if z > 5.0 {
                    phase_rate.push(format!("{tag} {z:.0}σ"));
                }
            }
        }
    }
    let summary = |v: &Vec<String>| {
        if v.is_empty() {
            "ok".to_string()
        } else {
            format!("{} violations, e.g. {}", v.len(), v.iter().take(3).cloned().collect::<Vec<_>>().join(" "))
        }
    };
    let ok = points > 0 && burst_mmse.is_empty() && burst_mi.is_empty() && ttfs_worst.is_empty() && phase_rate.is_empty();
    (
        ok,
        format!(
            "{points} points; burst lowest mmse_a: {}; burst highest MI: {}; ttfs ≥ phase, rate: {}; |phase - rate| ≤ 5σ: {} (max {max_pr_z:.1}σ)",
            summary(&burst_mmse),
            summary(&burst_mi),
            summary(&ttfs_worst),
            summary(&phase_rate)
        ),
    )
}

// ---- 6 ------------------------------------------------------------------

fn monotonicity(paper: &[SweepRow], small: &SweepResult) -> (bool, String) {
    let mut cells: BTreeMap<(Scheme, u32, usize), Vec<&SweepRow>> = BTreeMap::new();
    for r in paper {
        cells.entry((r.scheme, r.n_bits, r.train_len)).or_default().push(r);
    }
    let mut worst = 0.0f64;
    let mut violations = Vec::new();
    for (key, rows) in &mut cells {
        rows.sort_by(|a, b| a.snr.total_cmp(&b.snr));
        for w in rows.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let zx = (hi.mmse_x_train - lo.mmse_x_train) / joint(hi.mmse_x_train_stderr, lo.mmse_x_train_stderr);
            let za = (hi.mmse_a - lo.mmse_a) / joint(hi.mmse_a_stderr, lo.mmse_a_stderr);
            worst = worst.max(zx).max(za);
            // MI is an integral of a nonnegative curve, so any decrease is a bug
            if zx > 3.0 || za > 3.0 || hi.mi_nats < lo.mi_nats {
                violations.push(format!("{key:?} snr {}", hi.snr));
            }
        }
    }
    let max_norm = small
        .cells
        .iter()
        .flat_map(|c| c.estimates.iter().map(|e| e.max_normalization_error))
        .fold(0.0, f64::max);
    let points: usize = small.cells.iter().map(|c| c.estimates.len()).sum();
    let ok = violations.is_empty() && !cells.is_empty() && max_norm <= 1e-12;
    (
        ok,
        format!(
            "{} cells, worst rise {worst:.2}σ (tol 3σ), {} violations; posterior normalization max {max_norm:.1e} over {points} points (tol 1e-12)",
            cells.len(),
            violations.len()
        ),
    )
}

// ---- 7 ------------------------------------------------------------------

fn sweep_via_cli(out: &Path, threads: &str) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_spikelink"))
        .args(["sweep", "--preset", "paper", "--seed", "42", "--out"])
        .arg(out)
        .env("SPIKELINK_THREADS", threads)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("sweep exited with {status}"));
    }
    std::fs::read(out.join("sweep.csv")).map_err(|e| e.to_string())
}

// ---- 8 ------------------------------------------------------------------

fn codec_contracts() -> (bool, String) {
    let mut bad = Vec::new();
    let mut checked = 0usize;

    for len in [16usize, 32, 64] {
        let book = codebook(Scheme::Ttfs, &CodecConfig::new(8, len).unwrap()).unwrap();
        for (k, t) in book.trains().iter().enumerate() {
            checked += 1;
            if t.spike_count() > 1 {
                bad.push(format!("ttfs L={len} level {k}"));
            }
        }
    }

    for n_bits in [1u32, 4, 8] {
        for len in [8usize, 16, 32, 64] {
            if len < n_bits as usize {
                continue;
            }
            let cfg = CodecConfig::new(n_bits, len).unwrap();
            for level in 0..(1u32 << n_bits) {
                checked += 1;
                let got = encode_deterministic(Scheme::Phase, Amplitude::new(level, n_bits).unwrap(), &cfg)
                    .unwrap()
                    .spike_indices();
                // bit i (MSB first) of the level sits at slot floor(i L / Nb)
                let bits = format!("{level:0width$b}", width = n_bits as usize);
                let want: Vec<usize> = bits
                    .chars()
                    .enumerate()
                    .filter(|(_, c)| *c == '1')
                    .map(|(i, _)| i * len / n_bits as usize)
                    .collect();
                if got != want {
                    bad.push(format!("phase ({n_bits},{len}) level {level}"));
                }
            }
        }
    }

    for (n_bits, len) in [(2u32, 8usize), (4, 16), (4, 32), (4, 64), (8, 32), (8, 64)] {
        let cfg = CodecConfig::new(n_bits, len).unwrap();
        if cfg.validate_for(Scheme::Burst).is_err() {
            continue;
        }
        let m = (1u64 << n_bits) - 1;
        let (n_max, t_min, t_max) = (cfg.n_max as u64, cfg.t_min as u64, cfg.t_max as u64);
        for level in 0..=m {
            checked += 1;
            let a = Amplitude::new(level as u32, n_bits).unwrap();
            // ceil(A n_max) and ceil(t_max - (t_max - t_min) A) with A = level / m
            let ns = (level * n_max).div_ceil(m);
            let isi = (t_max * m - (t_max - t_min) * level).div_ceil(m);
            let got_ns = u64::from(burst_spike_count(a, &cfg));
            let got_isi = burst_isi(a, &cfg) as u64;
            let spikes = encode_deterministic(Scheme::Burst, a, &cfg).unwrap().spike_indices();
            let want: Vec<usize> = (0..ns).map(|j| (j * isi) as usize).collect();
            let isi_ok = ns < 2 || got_isi == isi;
            if got_ns != ns || !isi_ok || spikes != want || !(t_min..=t_max).contains(&got_isi) {
                bad.push(format!("burst ({n_bits},{len}) level {level}"));
            }
        }
    }
    (
        bad.is_empty(),
        format!("{checked} codewords checked exhaustively, {} mismatches {:?}", bad.len(), &bad[..bad.len().min(3)]),
    )
}

#[test]
fn acceptance_criteria() {
    let mut out = Vec::new();

    record(&mut out, 1, "Gaussian closed-form self-test", gaussian_self_test);
    record(&mut out, 2, "brute-force oracle vs Monte Carlo (rate, 2 bits, 4 chips)", oracle_equivalence);

    // full matrix at reduced trial count; every evaluated point is inspected
    let mut small_cfg = SweepConfig::preset(Preset::Paper);
    small_cfg.n_trials = 2_000;
    let small = run_sweep(&small_cfg).expect("reduced sweep");

    record(&mut out, 3, "zero-information limit", || zero_information(&small));
    record(&mut out, 8, "codec unit contracts", codec_contracts);

    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let first = sweep_via_cli(&dir.path().join("a"), "1");
    let first_secs = t.elapsed().as_secs_f64();
    let paper = match &first {
        Ok(_) => read_csv(&dir.path().join("a/sweep.csv")).expect("sweep csv parses").rows,
        Err(_) => Vec::new(),
    };
    println!("paper sweep: {} rows in {first_secs:.0}s", paper.len());

    record(&mut out, 4, "phase saturation", || saturation(&paper));
    record(&mut out, 5, "ranking on the default matrix", || {
        let (ok, d) = ranking(&paper);
        (ok && first_secs < 1800.0, format!("{d}; sweep {first_secs:.0}s (limit 1800s)"))
    });
    record(&mut out, 6, "monotonicity and normalization", || monotonicity(&paper, &small));
    record(&mut out, 7, "byte-identical CSV across runs and thread counts", || {
        let second = sweep_via_cli(&dir.path().join("b"), "4");
        match (&first, &second) {
            (Ok(a), Ok(b)) => (
                a == b && !a.is_empty(),
                format!("{} bytes, threads 1 vs 4, identical: {}", a.len(), a == b),
            ),
            (a, b) => (false, format!("run failed: {:?} {:?}", a.as_ref().err(), b.as_ref().err())),
        }
    });

    out.sort_by_key(|o| o.id);
    println!("---- summary ----");
    for o in &out {
        println!("[{}] criterion {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.title);
    }
    let failed: Vec<u32> = out.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
