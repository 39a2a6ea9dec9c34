use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{SkippedCell, SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "scheme,n_bits,train_len,sigma2,snr,mmse_x_train,mmse_x_train_stderr,mmse_x_chip,mmse_a,mmse_a_stderr,mi_nats,mi_bits,mi_stderr,n_trials,wall_ms";

const COLUMNS: usize = 15;

/// Writes the result table. Floats use the shortest representation that
/// parses back to the same value. Skipped cells become rows whose numeric
/// columns are empty and whose `n_trials` is 0.
pub fn write_to<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.n_bits,
            r.train_len,
            r.sigma2,
            r.snr,
            r.mmse_x_train,
            r.mmse_x_train_stderr,
            r.mmse_x_chip,
            r.mmse_a,
            r.mmse_a_stderr,
            r.mi_nats,
            r.mi_bits,
            r.mi_stderr,
            r.n_trials,
            r.wall_ms
        )?;
    }
    for s in &result.skipped {
        writeln!(out, "{},{},{},,,,,,,,,,,0,", s.scheme, s.n_bits, s.train_len)?;
    }
    Ok(())
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_to(result, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed run never leaves a partial table behind.
pub fn write_csv_atomic(result: &SweepResult, path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        write_to(result, &mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(file, path)
}

pub(crate) fn read_from<R: std::io::Read>(input: R, path: &Path) -> Result<SweepResult> {
    let parse_err = |line: u64, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    let header: Vec<&str> = header.iter().collect();
    if header.join(",") != CSV_HEADER {
        return Err(parse_err(1, format!("unexpected header `{}`", header.join(","))));
    }

    let mut result = SweepResult::default();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != COLUMNS {
            return Err(parse_err(line, format!("expected {COLUMNS} fields, found {}", record.len())));
        }
        let field = |i: usize| &record[i];
        let scheme = field(0).parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        let n_bits = parse(field(1), "n_bits").map_err(|m| parse_err(line, m))?;
        let train_len = parse(field(2), "train_len").map_err(|m| parse_err(line, m))?;
        if field(3).is_empty() {
            result.skipped.push(SkippedCell {
                scheme,
                n_bits,
                train_len,
                reason: "skipped".into(),
            });
            continue;
        }
        let f = |i: usize, name: &str| parse::<f64>(field(i), name).map_err(|m| parse_err(line, m));
        result.rows.push(SweepRow {
            scheme,
            n_bits,
            train_len,
            sigma2: f(3, "sigma2")?,
            snr: f(4, "snr")?,
            mmse_x_train: f(5, "mmse_x_train")?,
            mmse_x_train_stderr: f(6, "mmse_x_train_stderr")?,
            mmse_x_chip: f(7, "mmse_x_chip")?,
            mmse_a: f(8, "mmse_a")?,
            mmse_a_stderr: f(9, "mmse_a_stderr")?,
            mi_nats: f(10, "mi_nats")?,
            mi_bits: f(11, "mi_bits")?,
            mi_stderr: f(12, "mi_stderr")?,
            n_trials: parse(field(13), "n_trials").map_err(|m| parse_err(line, m))?,
            wall_ms: parse(field(14), "wall_ms").map_err(|m| parse_err(line, m))?,
        });
    }
    Ok(result)
}

fn parse<T: std::str::FromStr>(s: &str, name: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| format!("bad {name} `{s}`: {e}"))
}
