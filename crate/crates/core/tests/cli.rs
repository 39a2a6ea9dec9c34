use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn spikelink() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spikelink"));
    c.env_remove("SPIKELINK_THREADS").env_remove("SPIKELINK_INJECT_FAULT");
    c
}

fn run(args: &[&str]) -> Output {
    spikelink().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn encode_phase_dumps_every_level() {
    let o = run(&["encode", "--scheme", "phase", "--n-bits", "4", "--train-len", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17);
    assert!(lines[0].starts_with("level,value,chip_0,chip_1,"));
    assert!(lines[0].ends_with(",chip_31"));
    // level 5 = 0101: slots 8 and 24
    let row: Vec<&str> = lines[6].split(',').collect();
    assert_eq!(row[0], "5");
    let ones: Vec<usize> = row[2..].iter().enumerate().filter(|(_, v)| **v == "1").map(|(i, _)| i).collect();
    assert_eq!(ones, vec![8, 24]);
}

#[test]
fn encode_ttfs_full_scale_fires_at_chip_zero() {
    let o = run(&["encode", "--scheme", "ttfs", "--n-bits", "4", "--train-len", "32", "--level", "15"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(row[0], "15");
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "1");
    assert!(row[3..].iter().all(|v| *v == "0"));
}

#[test]
fn encode_rate_requires_seed_and_is_reproducible() {
    let o = run(&["encode", "--scheme", "rate", "--n-bits", "3", "--train-len", "16"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--seed"));

    let args = ["encode", "--scheme", "rate", "--n-bits", "3", "--train-len", "16", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["encode", "--scheme", "rate", "--n-bits", "3", "--train-len", "16", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn encode_invalid_config_names_the_invariant() {
    let o = run(&["encode", "--scheme", "phase", "--n-bits", "8", "--train-len", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("train_len >= n_bits"), "{}", stderr(&o));

    let o = run(&["encode", "--scheme", "burst", "--n-bits", "4", "--train-len", "16", "--level", "16"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_succeeds_and_unknown_flags_fail() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["sweep", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let help = stdout(&o);
    for flag in [
        "--config",
        "--out",
        "--seed",
        "--trials",
        "--schemes",
        "--n-bits",
        "--train-len",
        "--sigma2-min",
        "--sigma2-max",
        "--sigma2-points",
        "--preset",
        "--energy-norm",
        "--plots",
        "--verbose",
    ] {
        assert!(help.contains(flag), "sweep --help lacks {flag}");
    }
    assert!(stdout(&run(&["validate", "--help"])).contains("--quick"));

    let o = run(&["sweep", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_point_sweep_is_fast_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        let mut c = spikelink();
        c.args(["sweep", "--schemes", "burst", "--trials", "1000", "--sigma2", "1.0", "--out"])
            .arg(out);
        c
    };
    let t = Instant::now();
    let o = args(&dir.path().join("a")).output().unwrap();
    let secs = t.elapsed().as_secs_f64();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(secs < 5.0, "took {secs}s");
    args(&dir.path().join("b")).output().unwrap();
    let a = std::fs::read_to_string(dir.path().join("a/sweep.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b/sweep.csv")).unwrap();
    assert_eq!(a, b);
    // paper preset lists: 2 resolutions x 3 train lengths, one noise level
    assert_eq!(a.lines().count(), 1 + 6);
    assert!(a.starts_with("scheme,n_bits,train_len,sigma2,snr,"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let o = spikelink()
            .args(["sweep", "--preset", "quick", "--trials", "600", "--schemes", "rate,phase", "--out"])
            .arg(&out)
            .env("SPIKELINK_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(std::fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    let o = spikelink().args(["validate", "--quick"]).env("SPIKELINK_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("out");
    let o = spikelink()
        .args(["sweep", "--schemes", "burst", "--trials", "100", "--sigma2", "1.0", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!out.exists());

    // permission bits are ignored for root, so only check them when they bite
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let ro = dir.path().join("ro");
        std::fs::create_dir(&ro).unwrap();
        std::fs::set_permissions(&ro, std::fs::Permissions::from_mode(0o555)).unwrap();
        if std::fs::write(ro.join("probe"), "x").is_err() {
            let o = spikelink()
                .args(["sweep", "--schemes", "burst", "--trials", "100", "--sigma2", "1.0", "--out"])
                .arg(&ro)
                .output()
                .unwrap();
            assert_eq!(o.status.code(), Some(1));
            assert_eq!(std::fs::read_dir(&ro).unwrap().count(), 0);
        }
        std::fs::set_permissions(&ro, std::fs::Permissions::from_mode(0o755)).unwrap();
    }
}

#[test]
fn config_file_sits_between_preset_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "# small run\nschemes = ttfs\nn_bits = 4\ntrain_len = 16\nsigma2 = 2.0, 0.5\ntrials = 500\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = spikelink()
        .args(["sweep", "--config"])
        .arg(&conf)
        .args(["--trials", "300", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!((r[0], r[1], r[2]), ("ttfs", "4", "16"));
        assert_eq!(r[13], "300");
    }
    // descending noise variance
    assert_eq!(rows[0][3], "2");
    assert_eq!(rows[1][3], "0.5");

    std::fs::write(&conf, "trials = 10\nbogus_key = 3\n").unwrap();
    let o = spikelink().args(["sweep", "--config"]).arg(&conf).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
}

#[test]
fn sweep_plots_and_plot_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = spikelink()
        .args(["sweep", "--preset", "quick", "--trials", "300", "--plots", "--gaussian-overlay", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["sweep.csv", "mmse_Nb4_Ni32.svg", "mi_Nb4_Ni32.svg"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }

    let replot = dir.path().join("replot");
    let o = spikelink()
        .args(["plot", "--input"])
        .arg(out.join("sweep.csv"))
        .arg("--out")
        .arg(&replot)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(replot.join("mi_Nb4_Ni32.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    for scheme in ["rate", "ttfs", "phase", "burst"] {
        assert!(svg.contains(scheme));
    }

    let o = spikelink().args(["plot", "--input"]).arg(dir.path().join("nope.csv")).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_quick_passes_and_catches_injected_fault() {
    let t = Instant::now();
    let o = run(&["validate", "--quick"]);
    let secs = t.elapsed().as_secs_f64();
    assert_eq!(o.status.code(), Some(0), "{}\n{}", stdout(&o), stderr(&o));
    assert!(secs < 30.0, "validate --quick took {secs}s");
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!text.contains("FAIL"));

    let o = spikelink()
        .args(["validate", "--quick"])
        .env("SPIKELINK_INJECT_FAULT", "flip-likelihood-sign")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL orthogonality")), "{}", stdout(&o));
}
