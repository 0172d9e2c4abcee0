use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::experiment::RegretCurve;
use super::stats::{mean_se, summarize, Summary};
use super::sweep::{read_curve_csv, write_summaries};

pub const REPORT_SUMMARY: &str = "report_summary.csv";
pub const REPORT_SVG: &str = "report.svg";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: no run CSVs (expected files named <config>__seed<n>.csv)")]
    NoRuns { path: String },
    #[error("{path}: {msg}")]
    Corrupt { path: String, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl ReportError {
    /// The offending file or directory.
    pub fn path(&self) -> &str {
        match self {
            ReportError::NoRuns { path }
            | ReportError::Corrupt { path, .. }
            | ReportError::Io { path, .. } => path,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> ReportError {
    ReportError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// `(config id, seed)` from a run file name.
fn parse_run_name(name: &str) -> Option<(&str, u64)> {
    let stem = name.strip_suffix(".csv")?;
    let (id, seed) = stem.rsplit_once("__seed")?;
    if id.is_empty() || seed.is_empty() || !seed.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((id, seed.parse().ok()?))
}

/// Every run CSV in `dir`, grouped by config id, seeds ascending.
pub fn load_runs(dir: &Path) -> Result<BTreeMap<String, Vec<RegretCurve>>, ReportError> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut files: Vec<(String, u64, PathBuf)> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some((id, seed)) = parse_run_name(&name) {
            files.push((id.to_string(), seed, entry.path()));
        }
    }
    if files.is_empty() {
        return Err(ReportError::NoRuns {
            path: dir.display().to_string(),
        });
    }
    files.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let mut groups: BTreeMap<String, Vec<RegretCurve>> = BTreeMap::new();
    for (id, seed, path) in files {
        let curve = read_curve_csv(&path, &id, seed).map_err(|msg| ReportError::Corrupt {
            path: path.display().to_string(),
            msg,
        })?;
        groups.entry(id).or_default().push(curve);
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub summary: PathBuf,
    pub svg: PathBuf,
    pub summaries: Vec<Summary>,
}

/// Writes `report_summary.csv` and `report.svg` into `dir`. Both are pure
/// functions of the run CSVs found there.
pub fn write_report(dir: &Path) -> Result<ReportFiles, ReportError> {
    let groups = load_runs(dir)?;
    let summaries: Vec<Summary> = groups
        .iter()
        .map(|(id, runs)| summarize(id, runs))
        .collect();
    let summary = dir.join(REPORT_SUMMARY);
    write_summaries(&summary, &summaries).map_err(|e| io_err(&summary, e))?;
    let svg = dir.join(REPORT_SVG);
    std::fs::write(&svg, render_svg(&groups)).map_err(|e| io_err(&svg, e))?;
    Ok(ReportFiles {
        summary,
        svg,
        summaries,
    })
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 400;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Band {
    k: Vec<usize>,
    mean: Vec<f64>,
    se: Vec<f64>,
}

/// Mean and standard error of `Reg(k)` at up to `MAX_POINTS` episodes,
/// always including the last one. Runs shorter than the longest are
/// averaged over the seeds that reached `k`.
fn band(runs: &[RegretCurve]) -> Band {
    let k_max = runs.iter().map(|c| c.episodes()).max().unwrap_or(0);
    let step = k_max.div_ceil(MAX_POINTS).max(1);
    let mut ks: Vec<usize> = (1..=k_max).step_by(step).collect();
    if ks.last() != Some(&k_max) {
        ks.push(k_max);
    }
    let (mut mean, mut se) = (Vec::new(), Vec::new());
    for &k in &ks {
        let xs: Vec<f64> = runs
            .iter()
            .filter(|c| c.episodes() >= k)
            .map(|c| c.regret_at(k))
            .collect();
        let (m, s) = mean_se(&xs);
        mean.push(m);
        se.push(s);
    }
    Band { k: ks, mean, se }
}

/// Line chart of mean cumulative regret with a shaded one-standard-error
/// band per config; the legend lists config ids.
pub fn render_svg(groups: &BTreeMap<String, Vec<RegretCurve>>) -> String {
    let bands: Vec<(&str, Band)> = groups
        .iter()
        .map(|(id, runs)| (id.as_str(), band(runs)))
        .collect();
    let k_max = bands
        .iter()
        .flat_map(|(_, b)| b.k.last().copied())
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let y_lo = bands
        .iter()
        .flat_map(|(_, b)| b.mean.iter().zip(&b.se).map(|(m, s)| m - s))
        .fold(0.0, f64::min);
    let y_hi = bands
        .iter()
        .flat_map(|(_, b)| b.mean.iter().zip(&b.se).map(|(m, s)| m + s))
        .fold(0.0, f64::max);
    let y_hi = if y_hi - y_lo > 0.0 {
        y_hi + 0.05 * (y_hi - y_lo)
    } else {
        y_lo + 1.0
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |k: f64| {
        LEFT + if k_max > 1.0 {
            (k - 1.0) / (k_max - 1.0)
        } else {
            0.0
        } * plot_w
    };
    let y = |v: f64| TOP + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let kv = 1.0 + f * (k_max - 1.0);
        let yv = y_lo + f * (y_hi - y_lo);
        let (px, py) = (x(kv), y(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            kv.round()
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">episode k</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">cumulative regret</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for (i, (id, b)) in bands.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut band_pts = String::new();
        for (j, &k) in b.k.iter().enumerate() {
            let _ = write!(
                band_pts,
                "{:.2},{:.2} ",
                x(k as f64),
                y(b.mean[j] + b.se[j])
            );
        }
        for (j, &k) in b.k.iter().enumerate().rev() {
            let _ = write!(
                band_pts,
                "{:.2},{:.2} ",
                x(k as f64),
                y(b.mean[j] - b.se[j])
            );
        }
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band_pts.trim_end()
        );
        let line: Vec<String> =
            b.k.iter()
                .zip(&b.mean)
                .map(|(&k, &m)| format!("{:.2},{:.2}", x(k as f64), y(m)))
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"><title>{}</title></polyline>"#,
            line.join(" "),
            escape(id)
        );
        let ly = TOP + 15.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/><text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(id)
        );
    }
    out.push_str("</svg>\n");
    out
}
