//! Minimal SVG line charts for sweep results: x = noise variance on a log
//! axis, one curve per scheme with a ±1 standard error band.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{SweepResult, SweepRow};
use crate::codec::Scheme;
use crate::error::{Error, Result};
use crate::info::{gaussian_capacity, gaussian_mmse};

#[derive(Debug, Clone, Copy, Default)]
pub struct PlotOptions {
    /// Draw the Gaussian-input reference (`1/(1+snr)` or `ln(1+snr)/2` in bits).
    pub gaussian_overlay: bool,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const LOG_FLOOR: f64 = 1e-12;

fn color(s: Scheme) -> &'static str {
    match s {
        Scheme::Rate => "#1f77b4",
        Scheme::Ttfs => "#d62728",
        Scheme::Phase => "#2ca02c",
        Scheme::Burst => "#9467bd",
    }
}

#[derive(Clone, Copy)]
enum Metric {
    Mmse,
    Mi,
}

impl Metric {
    fn value(self, r: &SweepRow) -> (f64, f64) {
        match self {
            Metric::Mmse => (r.mmse_a, r.mmse_a_stderr),
            Metric::Mi => (r.mi_bits, r.mi_stderr / std::f64::consts::LN_2),
        }
    }

    fn reference(self, sigma2: f64) -> f64 {
        let snr = 1.0 / sigma2;
        match self {
            Metric::Mmse => gaussian_mmse(snr).unwrap_or(f64::NAN),
            Metric::Mi => gaussian_capacity(snr).unwrap_or(f64::NAN) / std::f64::consts::LN_2,
        }
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    pix_lo: f64,
    pix_hi: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        let t = if self.log {
            (v.max(LOG_FLOOR).log10() - self.lo) / (self.hi - self.lo)
        } else {
            (v - self.lo) / (self.hi - self.lo)
        };
        self.pix_lo + t * (self.pix_hi - self.pix_lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 8).max(1);
            (a..=b)
                .step_by(step as usize)
                .map(|k| (10f64.powi(k), format!("1e{k}")))
                .collect()
        } else {
            let span = self.hi - self.lo;
            let raw = span / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut out = Vec::new();
            let mut v = (self.lo / step).ceil() * step;
            while v <= self.hi + 1e-12 * span {
                out.push((v, format!("{}", (v / step).round() * step)));
                v += step;
            }
            out
        }
    }
}

fn padded(lo: f64, hi: f64, pad: f64) -> (f64, f64) {
    if hi - lo < 1e-12 {
        (lo - pad, hi + pad)
    } else {
        let p = 0.04 * (hi - lo);
        (lo - p, hi + p)
    }
}

fn render(rows: &[&SweepRow], metric: Metric, title: &str, y_label: &str, opts: PlotOptions) -> String {
    let finite: Vec<&&SweepRow> = rows.iter().filter(|r| r.sigma2.is_finite()).collect();
    let xs: Vec<f64> = finite.iter().map(|r| r.sigma2.log10()).collect();
    let (x_lo, x_hi) = padded(
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        0.5,
    );
    let (x_lo, x_hi) = if x_lo.is_finite() { (x_lo, x_hi) } else { (-1.0, 1.0) };
    let x = Axis {
        lo: x_lo,
        hi: x_hi,
        log: true,
        pix_lo: LEFT,
        pix_hi: WIDTH - RIGHT,
    };

    let mut ys: Vec<f64> = Vec::new();
    for r in &finite {
        let (v, se) = metric.value(r);
        ys.push(v + se);
        ys.push(v - se);
        ys.push(v);
    }
    if opts.gaussian_overlay {
        ys.extend(finite.iter().map(|r| metric.reference(r.sigma2)));
    }
    ys.retain(|v| v.is_finite());
    let y = match metric {
        Metric::Mmse => {
            let logs: Vec<f64> = ys.iter().filter(|v| **v > 0.0).map(|v| v.max(LOG_FLOOR).log10()).collect();
            let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (lo, hi) = if lo.is_finite() { padded(lo, hi, 0.5) } else { (-1.0, 0.0) };
            Axis {
                lo,
                hi,
                log: true,
                pix_lo: HEIGHT - BOTTOM,
                pix_hi: TOP,
            }
        }
        Metric::Mi => {
            let hi = ys.iter().copied().fold(0.0, f64::max);
            let hi = if hi > 0.0 { hi * 1.05 } else { 1.0 };
            Axis {
                lo: 0.0,
                hi,
                log: false,
                pix_lo: HEIGHT - BOTTOM,
                pix_hi: TOP,
            }
        }
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
    let (px0, px1, py0, py1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r##"<rect x="{px0}" y="{py1}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        px1 - px0,
        py0 - py1
    );
    for (v, label) in x.ticks() {
        let px = x.map(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{py1}" x2="{px:.2}" y2="{py0}" stroke="#ddd"/><text x="{px:.2}" y="{}" text-anchor="middle">{label}</text>"##,
            py0 + 18.0
        );
    }
    for (v, label) in y.ticks() {
        let py = y.map(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{px0}" y1="{py:.2}" x2="{px1}" y2="{py:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"##,
            px0 - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">noise variance σ²</text>"#,
        (px0 + px1) / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0,
        escape(y_label)
    );

    let mut legend_y = TOP + 10.0;
    for scheme in Scheme::ALL {
        let mut pts: Vec<(f64, f64, f64)> = finite
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| {
                let (v, se) = metric.value(r);
                (r.sigma2, v, se)
            })
            .collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let c = color(scheme);
        let upper: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", x.map(p.0), y.map(p.1 + p.2))).collect();
        let lower: Vec<String> = pts
            .iter()
            .rev()
            .map(|p| format!("{:.2},{:.2}", x.map(p.0), y.map(p.1 - p.2)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{} {}" fill="{c}" fill-opacity="0.18" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", x.map(p.0), y.map(p.1))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
            line.join(" ")
        );
        for p in &pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#,
                x.map(p.0),
                y.map(p.1)
            );
        }
        let lx = px1 + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{c}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            legend_y + 4.0,
            scheme
        );
        legend_y += 20.0;
    }

    if opts.gaussian_overlay {
        let n = 200;
        let pts: Vec<String> = (0..=n)
            .map(|i| {
                let lx = x.lo + (x.hi - x.lo) * i as f64 / n as f64;
                let s2 = 10f64.powf(lx);
                format!("{:.2},{:.2}", x.map(s2), y.map(metric.reference(s2)))
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="#555" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
            pts.join(" ")
        );
        let lx = px1 + 16.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="#555" stroke-dasharray="6 4" stroke-width="1.5"/><text x="{}" y="{}">gaussian</text>"##,
            lx + 24.0,
            lx + 30.0,
            legend_y + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `mmse_Nb{b}_Ni{n}.svg` and `mi_Nb{b}_Ni{n}.svg` for every
/// `(n_bits, train_len)` panel present in the result.
pub fn emit_plots(result: &SweepResult, out_dir: &Path, opts: PlotOptions) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(Error::InvalidInput("no rows to plot".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (n_bits, train_len) in result.panels() {
        let rows: Vec<&SweepRow> = result
            .rows
            .iter()
            .filter(|r| r.n_bits == n_bits && r.train_len == train_len)
            .collect();
        for (metric, stem, title, label) in [
            (Metric::Mmse, "mmse", "MMSE versus noise variance", "amplitude MMSE"),
            (Metric::Mi, "mi", "Mutual information versus noise variance", "mutual information [bits/train]"),
        ] {
            let title = format!("{title}, Nb={n_bits}, Ni={train_len}");
            let svg = render(&rows, metric, &title, label, opts);
            let path = out_dir.join(format!("{stem}_Nb{n_bits}_Ni{train_len}.svg"));
            std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
