use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spikelink::codec::{encode, max_level, Amplitude, CodecConfig, Scheme};
use spikelink::estimator::EnergyNorm;
use spikelink::seed::mix;
use spikelink::sweep::{
    emit_plots, read_csv, run_sweep, write_csv_atomic, PlotOptions, Preset, SweepConfig, SweepOverrides,
};
use spikelink::validate::{run_validation, ValidateOptions};
use spikelink::Error;

/// Environment variable that turns on the negative-control likelihood flip.
const FAULT_ENV: &str = "SPIKELINK_INJECT_FAULT";
const THREADS_ENV: &str = "SPIKELINK_THREADS";

/// Spike-train codecs over an AWGN impulse-radio link: Bayesian MMSE and
/// mutual information by Monte Carlo.
///
/// Set SPIKELINK_THREADS to cap the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "spikelink", version)]
struct Cli {
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the spike train of every level (or one level) as CSV
    Encode(EncodeArgs),
    /// Run the scheme x resolution x train length x noise matrix
    Sweep(SweepArgs),
    /// Run the built-in oracle checks; exits 2 if any fails
    Validate(ValidateArgs),
    /// Render SVG plots from an existing sweep CSV
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// rate, ttfs, phase or burst
    #[arg(long)]
    scheme: Scheme,
    #[arg(long)]
    n_bits: u32,
    /// Chips per train
    #[arg(long)]
    train_len: usize,
    /// Only this level (0 ..= 2^n_bits - 1)
    #[arg(long)]
    level: Option<u32>,
    /// Required for rate coding; level k draws from a stream keyed by (seed, k)
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Key-value config file; its values override the preset, flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Starting point. paper: schemes rate,ttfs,phase,burst; n_bits 4,8;
    /// train_len 16,32,64; 25 log-spaced sigma2 in [0.01, 100]; 100000 trials
    /// per point; seed 42. quick: n_bits 4, train_len 32, 9 sigma2 points,
    /// 2000 trials.
    #[arg(long, default_value = "paper")]
    preset: Preset,
    /// Output directory for sweep.csv and plots [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for every random stream
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per snr point
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated schemes
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated quantizer resolutions
    #[arg(long)]
    n_bits: Option<String>,
    /// Comma-separated train lengths in chips
    #[arg(long)]
    train_len: Option<String>,
    /// Comma-separated noise variances (inf for snr 0); replaces the range flags
    #[arg(long, conflicts_with_all = ["sigma2_min", "sigma2_max", "sigma2_points"])]
    sigma2: Option<String>,
    /// Lower end of the log-spaced noise variance grid
    #[arg(long)]
    sigma2_min: Option<f64>,
    /// Upper end of the log-spaced noise variance grid
    #[arg(long)]
    sigma2_max: Option<f64>,
    /// Number of log-spaced noise variances
    #[arg(long)]
    sigma2_points: Option<usize>,
    /// off or equal_average
    #[arg(long)]
    energy_norm: Option<EnergyNorm>,
    /// Also write SVG plots into the output directory
    #[arg(long)]
    plots: bool,
    /// Draw the Gaussian-input reference curves on every plot
    #[arg(long)]
    gaussian_overlay: bool,
    /// Fill the wall_ms column (makes the CSV run-dependent)
    #[arg(long)]
    record_timing: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Smaller subset of the checks
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV to plot
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Draw the Gaussian-input reference curves on every plot
    #[arg(long)]
    gaussian_overlay: bool,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Encode(a) => cmd_encode(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Plot(a) => cmd_plot(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.msg.is_empty() {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| input_error(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| input_error(format!("cannot start {n} worker threads: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    log::info!("{THREADS_ENV}={n} ignored in a sequential build");
    Ok(())
}

fn cmd_encode(a: EncodeArgs) -> Result<(), Failure> {
    let cfg = CodecConfig::new(a.n_bits, a.train_len)?;
    cfg.validate_for(a.scheme)?;
    if a.scheme == Scheme::Rate && a.seed.is_none() {
        return Err(input_error("rate coding is stochastic: pass --seed for a reproducible dump"));
    }
    let levels: Vec<u32> = match a.level {
        Some(l) => vec![l],
        None => (0..=max_level(a.n_bits)).collect(),
    };

    let mut text = String::from("level,value");
    for t in 0..cfg.train_len {
        text.push_str(&format!(",chip_{t}"));
    }
    text.push('\n');
    for level in levels {
        let amp = Amplitude::new(level, a.n_bits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix(a.seed.unwrap_or(0), &[u64::from(level)]));
        let train = encode(a.scheme, amp, &cfg, &mut rng)?;
        text.push_str(&format!("{level},{}", amp.value()));
        for &c in train.chips() {
            text.push_str(if c { ",1" } else { ",0" });
        }
        text.push('\n');
    }

    match a.out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    Ok(())
}

fn flag_overrides(a: &SweepArgs) -> Result<SweepOverrides, Failure> {
    let mut o = SweepOverrides::default();
    let mut set = |key: &str, value: Option<String>| -> Result<(), Failure> {
        if let Some(v) = value {
            o.set(key, &v).map_err(|e| input_error(format!("--{}: {e}", key.replace('_', "-"))))?;
        }
        Ok(())
    };
    set("schemes", a.schemes.clone())?;
    set("n_bits", a.n_bits.clone())?;
    set("train_len", a.train_len.clone())?;
    set("sigma2", a.sigma2.clone())?;
    set("sigma2_min", a.sigma2_min.map(|v| v.to_string()))?;
    set("sigma2_max", a.sigma2_max.map(|v| v.to_string()))?;
    set("sigma2_points", a.sigma2_points.map(|v| v.to_string()))?;
    set("trials", a.trials.map(|v| v.to_string()))?;
    set("seed", a.seed.map(|v| v.to_string()))?;
    o.energy_norm = a.energy_norm;
    o.out = a.out.clone();
    // boolean switches can only turn a setting on
    o.plots = a.plots.then_some(true);
    o.gaussian_overlay = a.gaussian_overlay.then_some(true);
    o.record_timing = a.record_timing.then_some(true);
    Ok(o)
}

/// Fails early if `dir` cannot hold the output, before any work is done.
fn check_writable(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let file = match &a.config {
        Some(path) => SweepOverrides::load(path)?,
        None => SweepOverrides::default(),
    };
    let layered = file.merged(flag_overrides(&a)?);
    let mut cfg = SweepConfig::preset(a.preset);
    layered.apply(&mut cfg)?;
    cfg.validate()?;

    let out_dir = layered.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    check_writable(&out_dir)?;

    let result = run_sweep(&cfg)?;
    let csv = out_dir.join("sweep.csv");
    write_csv_atomic(&result, &csv)?;
    eprintln!(
        "wrote {} ({} rows, {} skipped cells)",
        csv.display(),
        result.rows.len(),
        result.skipped.len()
    );
    if layered.plots.unwrap_or(false) {
        if result.rows.is_empty() {
            log::warn!("no rows to plot");
        } else {
            let opts = PlotOptions {
                gaussian_overlay: layered.gaussian_overlay.unwrap_or(false),
            };
            let files = emit_plots(&result, &out_dir, opts)?;
            eprintln!("wrote {} plots to {}", files.len(), out_dir.display());
        }
    }
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Failure> {
    let inject_fault = match std::env::var(FAULT_ENV) {
        Ok(v) if v == "flip-likelihood-sign" => true,
        Ok(v) if v.is_empty() => false,
        Ok(v) => return Err(input_error(format!("unknown {FAULT_ENV} value `{v}`"))),
        Err(_) => false,
    };
    let report = run_validation(ValidateOptions {
        quick: a.quick,
        seed: a.seed,
        inject_fault,
    })?;
    for c in &report.checks {
        println!("{c}");
    }
    let failed = report.failures().count();
    if failed == 0 {
        println!("all {} checks passed", report.checks.len());
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            msg: format!("{failed} of {} checks failed", report.checks.len()),
        })
    }
}

fn cmd_plot(a: PlotArgs) -> Result<(), Failure> {
    let result = read_csv(&a.input)?;
    let files = emit_plots(
        &result,
        &a.out,
        PlotOptions {
            gaussian_overlay: a.gaussian_overlay,
        },
    )?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}
