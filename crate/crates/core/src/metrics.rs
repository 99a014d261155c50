//! Phase-aware precision metrics and controller-comparison reports.
//!
//! Errors are aggregated per motion phase (idle, transient, scan). The
//! valid-scan pair (`e_s`, `t_p/t_s`) is defined by a band sweep: for a band
//! `[−b, b]`, `t_p(b)` is the scan-phase time remaining after the error last
//! escapes the band; `e_s` is the smallest band whose containment ratio
//! reaches the target.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sim::RunRecord;
use crate::trajectory::Phase;

/// Error aggregates for one motion phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMetric {
    /// Root-mean-square of the error samples, `sqrt(mean(e²))`.
    pub rms: f64,
    /// Largest absolute error sample.
    pub max: f64,
}

/// Valid-scan precision pair from the band sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMetrics {
    /// Half-width of the selected symmetric error band, metres.
    pub e_s: f64,
    /// Fraction of the scan phase spent inside that band after the last
    /// escape; always in `[0, 1]`.
    pub tp_over_ts: f64,
    /// The containment ratio the sweep was asked to reach.
    pub ratio_target: f64,
    /// False when no grid band reached the target, in which case `e_s`
    /// falls back to the scan-phase error peak and `tp_over_ts` reports the
    /// best ratio the grid achieved.
    pub target_achieved: bool,
}

/// Per-controller metrics row: one aggregate per phase that actually
/// occurred, plus the optional valid-scan pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Row label, normally the controller family name.
    pub label: String,
    /// Idle/hold-phase aggregate; absent when the phase never occurred.
    pub ip: Option<PhaseMetric>,
    /// Acceleration-transient aggregate.
    pub ad: Option<PhaseMetric>,
    /// Constant-velocity scan aggregate.
    pub sp: Option<PhaseMetric>,
    /// Valid-scan pair; absent until a band sweep has been run.
    pub scan: Option<ScanMetrics>,
}

fn aggregate<I: IntoIterator<Item = f64>>(values: I) -> Option<PhaseMetric> {
    let mut n = 0_usize;
    let mut sum_sq = 0.0;
    let mut max = 0.0_f64;
    for e in values {
        n += 1;
        sum_sq += e * e;
        max = max.max(e.abs());
    }
    (n > 0).then(|| PhaseMetric {
        rms: (sum_sq / n as f64).sqrt(),
        max,
    })
}

fn phase_values<'a>(record: &'a RunRecord, phase: Phase) -> impl Iterator<Item = f64> + 'a {
    record
        .e
        .iter()
        .zip(&record.phase)
        .filter(move |(_, &ph)| ph == phase)
        .map(|(&e, _)| e)
}

/// Aggregates the tracking error per motion phase. Phases with no samples
/// are reported absent, never as zero.
pub fn phase_metrics(record: &RunRecord) -> MetricsReport {
    MetricsReport {
        label: record.meta.controller.family.to_string(),
        ip: aggregate(phase_values(record, Phase::Ip)),
        ad: aggregate(phase_values(record, Phase::Ad)),
        sp: aggregate(phase_values(record, Phase::Sp)),
        scan: None,
    }
}

/// Containment ratio `t_p(b)/t_s` of the scan-phase subsequence for one
/// band half-width. With the last escape at index `i` (0-based, of `n`
/// samples), the time after it is `(n − 1 − i)` sample periods out of `n`.
fn containment_ratio(sp_errors: &[f64], band: f64) -> f64 {
    match sp_errors.iter().rposition(|&e| e.abs() > band) {
        None => 1.0,
        Some(i) => (sp_errors.len() - 1 - i) as f64 / sp_errors.len() as f64,
    }
}

/// Sweeps the band grid (ascending) and selects the smallest band whose
/// containment ratio reaches `ratio_target`.
///
/// When no band qualifies, the result falls back to the scan-phase error
/// peak as `e_s` and reports the best ratio the grid achieved, flagged via
/// [`ScanMetrics::target_achieved`].
pub fn valid_scan_metrics(
    record: &RunRecord,
    ratio_target: f64,
    band_grid: &[f64],
) -> Result<ScanMetrics> {
    if !(ratio_target > 0.0 && ratio_target <= 1.0) {
        return Err(Error::invalid(
            "ratio_target",
            format!("must lie in (0, 1], got {ratio_target}"),
        ));
    }
    if band_grid.is_empty() {
        return Err(Error::invalid("band_grid", "must hold at least one band"));
    }
    for pair in band_grid.windows(2) {
        if !(pair[0] <= pair[1]) {
            return Err(Error::invalid(
                "band_grid",
                format!("must be sorted ascending, got {} before {}", pair[0], pair[1]),
            ));
        }
    }
    if band_grid.iter().any(|&b| !(b.is_finite() && b > 0.0)) {
        return Err(Error::invalid(
            "band_grid",
            "bands must be finite and positive",
        ));
    }
    let sp: Vec<f64> = phase_values(record, Phase::Sp).collect();
    if sp.is_empty() {
        return Err(Error::invalid(
            "record",
            "valid-scan metrics need at least one scan-phase sample",
        ));
    }

    let mut best_ratio = 0.0_f64;
    for &band in band_grid {
        let ratio = containment_ratio(&sp, band);
        best_ratio = best_ratio.max(ratio);
        if ratio >= ratio_target {
            return Ok(ScanMetrics {
                e_s: band,
                tp_over_ts: ratio,
                ratio_target,
                target_achieved: true,
            });
        }
    }
    let peak = sp.iter().fold(0.0_f64, |m, &e| m.max(e.abs()));
    Ok(ScanMetrics {
        e_s: peak,
        tp_over_ts: best_ratio,
        ratio_target,
        target_achieved: false,
    })
}

/// Phase aggregates plus the valid-scan pair in one report.
pub fn full_report(
    record: &RunRecord,
    ratio_target: f64,
    band_grid: &[f64],
) -> Result<MetricsReport> {
    let mut report = phase_metrics(record);
    report.scan = Some(valid_scan_metrics(record, ratio_target, band_grid)?);
    Ok(report)
}

/// Geometric band grid from `min` to `max` inclusive.
pub fn log_spaced_bands(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && min > 0.0 && max.is_finite() && max >= min) {
        return Err(Error::invalid(
            "min/max",
            format!("need 0 < min <= max, got {min} and {max}"),
        ));
    }
    if count < 2 {
        return Err(Error::invalid("count", "need at least two bands"));
    }
    let log_min = min.ln();
    let step = (max.ln() - log_min) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| (log_min + step * i as f64).exp())
        .collect())
}

/// A rendered comparison of controller metrics rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    /// Machine-readable form, full float precision.
    pub csv: String,
    /// Column-aligned human-readable form.
    pub text: String,
}

const GAP: &str = "n/a";

fn phase_cells(metric: Option<PhaseMetric>) -> [Option<f64>; 2] {
    match metric {
        Some(m) => [Some(m.rms), Some(m.max)],
        None => [None, None],
    }
}

/// Renders the reports in input order with a fixed column layout:
/// `controller, ip_rms, ip_max, ad_rms, ad_max, sp_rms, sp_max, e_s,
/// tp_over_ts`. Missing phases or scan metrics appear as explicit gap
/// markers rather than zeros.
pub fn comparison_table(reports: &[MetricsReport]) -> Result<ComparisonTable> {
    if reports.is_empty() {
        return Err(Error::invalid("reports", "need at least one report"));
    }
    const HEADERS: [&str; 9] = [
        "controller",
        "ip_rms",
        "ip_max",
        "ad_rms",
        "ad_max",
        "sp_rms",
        "sp_max",
        "e_s",
        "tp_over_ts",
    ];

    let mut csv = String::new();
    csv.push_str(&HEADERS.join(","));
    csv.push('\n');
    for report in reports {
        let mut cells: Vec<Option<f64>> = Vec::with_capacity(8);
        cells.extend(phase_cells(report.ip));
        cells.extend(phase_cells(report.ad));
        cells.extend(phase_cells(report.sp));
        match report.scan {
            Some(scan) => {
                cells.push(Some(scan.e_s));
                cells.push(Some(scan.tp_over_ts));
            }
            None => {
                cells.push(None);
                cells.push(None);
            }
        }
        csv.push_str(&report.label);
        for cell in &cells {
            match cell {
                Some(v) => write!(csv, ",{v}").expect("infallible"),
                None => write!(csv, ",{GAP}").expect("infallible"),
            }
        }
        csv.push('\n');
    }

    let label_width = reports
        .iter()
        .map(|r| r.label.len())
        .chain([HEADERS[0].len()])
        .max()
        .unwrap_or(0);
    const CELL_WIDTH: usize = 12;
    let mut text = String::new();
    write!(text, "{:<label_width$}", HEADERS[0]).expect("infallible");
    for header in &HEADERS[1..] {
        write!(text, "  {header:>CELL_WIDTH$}").expect("infallible");
    }
    text.push('\n');
    for line in csv.lines().skip(1) {
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or("");
        write!(text, "{label:<label_width$}").expect("infallible");
        for field in fields {
            match field.parse::<f64>() {
                Ok(v) => write!(text, "  {v:>CELL_WIDTH$.4e}").expect("infallible"),
                Err(_) => write!(text, "  {GAP:>CELL_WIDTH$}").expect("infallible"),
            }
        }
        text.push('\n');
    }
    Ok(ComparisonTable { csv, text })
}
