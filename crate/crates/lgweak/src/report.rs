//! Report shapes and serialization for runs and sweeps.
//!
//! One [`RunReport`] covers one coupling strength: both probe signs'
//! displacements and post-selection probabilities, the direct weak values
//! (the oracle every estimate is judged against), and one
//! [`MethodResult`] per applicable extraction method with its residuals.
//!
//! Two wire formats:
//!
//! * JSON mirrors the structs verbatim, complex numbers as `[re, im]`.
//! * CSV holds one line per (run, method), fixed header, floats with 17
//!   significant digits so parsing reproduces every bit. Rows whose run
//!   produced no estimate (|l| = 0) keep their displacement columns and
//!   leave the method columns empty.
//!
//! [`parse_report_csv`] accepts the same CSV back, including files written
//! by other tools as long as the header matches, which is what feeds the
//! `extract --from-csv` path.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extraction::{
    equal_squares_check, extract_joints_two_probe, extract_l2_sum_difference,
    extract_single_probe_equal_squares, extract_singles_two_probe, ExtractionError,
    ExtractionMethod, WeakValueEstimate,
};
use crate::evolution::ScenarioConfig;
use crate::numeric::{complex_pair, complex_pair_opt, fmt_g17};
use crate::probe::DisplacementSet;
use crate::quantum::WeakValueReport;
use crate::sweep::RowResult;

pub const CSV_HEADER: &str = "g,l,prob_plus,prob_minus,dx_plus,dy_plus,dxy_plus,dx2y2h_plus,\
dx_minus,dy_minus,dxy_minus,dx2y2h_minus,method,re_sym_ab,im_sym_ab,re_diff_sq,im_diff_sq,\
re_residual_sym,im_residual_sym";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv error at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One extraction method's output next to its distance from the oracle.
/// Residuals are estimate − oracle on the same (unhalved) scale, stored at
/// construction so serialized reports are self-consistent by definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub estimate: WeakValueEstimate,
    #[serde(with = "complex_pair")]
    pub residual_sym: Complex64,
    #[serde(with = "complex_pair_opt")]
    pub residual_diff: Option<Complex64>,
    #[serde(with = "complex_pair_opt")]
    pub residual_a: Option<Complex64>,
    #[serde(with = "complex_pair_opt")]
    pub residual_b: Option<Complex64>,
}

impl MethodResult {
    pub fn new(estimate: WeakValueEstimate, oracle: &WeakValueReport) -> Self {
        Self {
            estimate,
            residual_sym: estimate.sym_ab_w - 2.0 * oracle.sym_ab_half_w,
            residual_diff: estimate.diff_sq_w.map(|d| d - 2.0 * oracle.diff_sq_half_w),
            residual_a: estimate.a_w.map(|a| a - oracle.a_w),
            residual_b: estimate.b_w.map(|b| b - oracle.b_w),
        }
    }
}

/// Everything measured and estimated at one coupling strength.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub g: f64,
    /// Probe index magnitude; displacements were taken at l = ±l_mag.
    pub l_mag: u32,
    pub sigma: f64,
    pub hbar: f64,
    pub grid_n: usize,
    pub grid_extent: f64,
    pub prob_plus: f64,
    pub prob_minus: f64,
    pub displacements_plus: DisplacementSet,
    pub displacements_minus: DisplacementSet,
    /// Direct weak values from the pre/post pair.
    pub oracle: WeakValueReport,
    pub methods: Vec<MethodResult>,
}

impl RunReport {
    /// Scenario echo shared by every row of a sweep.
    pub fn scenario_echo(sc: &ScenarioConfig) -> (f64, f64, usize, f64) {
        (sc.sigma, sc.hbar(), sc.grid.n(), sc.grid.extent())
    }
}

/// One CSV line, faithful to the wire format: estimate fields are absent
/// whenever the column was empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub g: f64,
    pub l_mag: u32,
    pub prob_plus: Option<f64>,
    pub prob_minus: Option<f64>,
    pub dplus: DisplacementSet,
    pub dminus: DisplacementSet,
    pub method: Option<ExtractionMethod>,
    pub re_sym_ab: Option<f64>,
    pub im_sym_ab: Option<f64>,
    pub re_diff_sq: Option<f64>,
    pub im_diff_sq: Option<f64>,
    pub re_residual_sym: Option<f64>,
    pub im_residual_sym: Option<f64>,
}

impl CsvRow {
    fn to_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_g17).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_g17(self.g),
            self.l_mag,
            opt(self.prob_plus),
            opt(self.prob_minus),
            fmt_g17(self.dplus.dx),
            fmt_g17(self.dplus.dy),
            fmt_g17(self.dplus.dxy),
            fmt_g17(self.dplus.dx2y2h),
            fmt_g17(self.dminus.dx),
            fmt_g17(self.dminus.dy),
            fmt_g17(self.dminus.dxy),
            fmt_g17(self.dminus.dx2y2h),
            self.method.map(|m| m.as_str()).unwrap_or(""),
            opt(self.re_sym_ab),
            opt(self.im_sym_ab),
            opt(self.re_diff_sq),
            opt(self.im_diff_sq),
            opt(self.re_residual_sym),
            opt(self.im_residual_sym),
        )
    }
}

/// Flattens reports into CSV rows, one per method (or one bare row when a
/// report has no methods). Failed sweep rows carry no displacement data and
/// are skipped here; they are reported on stderr by the harness.
pub fn csv_rows(rows: &[RowResult]) -> Vec<CsvRow> {
    let mut out = Vec::new();
    for row in rows {
        let RowResult::Ok(report) = row else {
            continue;
        };
        let base = CsvRow {
            g: report.g,
            l_mag: report.l_mag,
            prob_plus: Some(report.prob_plus),
            prob_minus: Some(report.prob_minus),
            dplus: report.displacements_plus,
            dminus: report.displacements_minus,
            method: None,
            re_sym_ab: None,
            im_sym_ab: None,
            re_diff_sq: None,
            im_diff_sq: None,
            re_residual_sym: None,
            im_residual_sym: None,
        };
        if report.methods.is_empty() {
            out.push(base);
            continue;
        }
        for m in &report.methods {
            let mut line = base.clone();
            line.method = Some(m.estimate.method);
            line.re_sym_ab = Some(m.estimate.sym_ab_w.re);
            line.im_sym_ab = Some(m.estimate.sym_ab_w.im);
            line.re_diff_sq = m.estimate.diff_sq_w.map(|d| d.re);
            line.im_diff_sq = m.estimate.diff_sq_w.map(|d| d.im);
            line.re_residual_sym = Some(m.residual_sym.re);
            line.im_residual_sym = Some(m.residual_sym.im);
            out.push(line);
        }
    }
    out
}

/// Renders rows in the requested format. CSV emits the fixed header plus
/// one line per (run, method); JSON mirrors the report structs verbatim.
pub fn emit_report(rows: &[RowResult], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => rows_to_csv(&csv_rows(rows)),
        ReportFormat::Json => {
            serde_json::to_string_pretty(rows).expect("report serialization cannot fail")
        }
    }
}

/// CSV text from already-flattened rows.
pub fn rows_to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_line());
        out.push('\n');
    }
    out
}

/// Parses CSV produced by [`rows_to_csv`] (or by anything else honoring the
/// header). Empty optional fields parse to absent; the required fields are
/// g, l, and the eight displacement columns.
pub fn parse_report_csv(text: &str) -> Result<Vec<CsvRow>, ReportError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ReportError::Csv {
        line: 1,
        reason: "empty input".into(),
    })?;
    if header.trim() != CSV_HEADER {
        return Err(ReportError::Csv {
            line: 1,
            reason: format!("unexpected header {:?}", header.trim()),
        });
    }

    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 19 {
            return Err(ReportError::Csv {
                line: lineno,
                reason: format!("{} fields, expected 19", fields.len()),
            });
        }
        let req = |i: usize, name: &str| -> Result<f64, ReportError> {
            fields[i].parse().map_err(|_| ReportError::Csv {
                line: lineno,
                reason: format!("unreadable {name}: {:?}", fields[i]),
            })
        };
        let opt = |i: usize, name: &str| -> Result<Option<f64>, ReportError> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                req(i, name).map(Some)
            }
        };
        let method = if fields[12].is_empty() {
            None
        } else {
            Some(fields[12].parse().map_err(|e| ReportError::Csv {
                line: lineno,
                reason: e,
            })?)
        };
        rows.push(CsvRow {
            g: req(0, "g")?,
            l_mag: fields[1].parse().map_err(|_| ReportError::Csv {
                line: lineno,
                reason: format!("unreadable l: {:?}", fields[1]),
            })?,
            prob_plus: opt(2, "prob_plus")?,
            prob_minus: opt(3, "prob_minus")?,
            dplus: DisplacementSet {
                dx: req(4, "dx_plus")?,
                dy: req(5, "dy_plus")?,
                dxy: req(6, "dxy_plus")?,
                dx2y2h: req(7, "dx2y2h_plus")?,
            },
            dminus: DisplacementSet {
                dx: req(8, "dx_minus")?,
                dy: req(9, "dy_minus")?,
                dxy: req(10, "dxy_minus")?,
                dx2y2h: req(11, "dx2y2h_minus")?,
            },
            method,
            re_sym_ab: opt(13, "re_sym_ab")?,
            im_sym_ab: opt(14, "im_sym_ab")?,
            re_diff_sq: opt(15, "re_diff_sq")?,
            im_diff_sq: opt(16, "im_diff_sq")?,
            re_residual_sym: opt(17, "re_residual_sym")?,
            im_residual_sym: opt(18, "im_residual_sym")?,
        });
    }
    Ok(rows)
}

/// Applies every applicable inversion to externally measured displacement
/// rows: the general two-probe method for l ≥ 1, plus the |l| = 2 shortcut
/// and (if requested) the single-probe readout at l = 2. Residual columns
/// stay empty; there is no oracle for external data.
///
/// A sweep report lists one row per method with the displacement block
/// repeated, so consecutive rows carrying the same (g, l, displacements)
/// collapse to a single extraction: feeding a sweep CSV back in yields one
/// output row per (coupling, method), not per input line.
pub fn extract_rows(
    rows: &[CsvRow],
    include_single_probe: bool,
) -> Result<Vec<CsvRow>, ReportError> {
    let mut out = Vec::new();
    let mut last: Option<(f64, u32, DisplacementSet, DisplacementSet)> = None;
    for row in rows {
        let block = (row.g, row.l_mag, row.dplus, row.dminus);
        if last == Some(block) {
            continue;
        }
        last = Some(block);
        let mut push = |method: ExtractionMethod, sym: Complex64, diff: Option<Complex64>| {
            let mut line = row.clone();
            line.method = Some(method);
            line.re_sym_ab = Some(sym.re);
            line.im_sym_ab = Some(sym.im);
            line.re_diff_sq = diff.map(|d| d.re);
            line.im_diff_sq = diff.map(|d| d.im);
            line.re_residual_sym = None;
            line.im_residual_sym = None;
            out.push(line);
        };
        if row.l_mag >= 1 {
            let singles = extract_singles_two_probe(&row.dplus, &row.dminus, row.l_mag, row.g)?;
            let joints =
                extract_joints_two_probe(&row.dplus, &row.dminus, singles, row.l_mag, row.g)?;
            push(
                ExtractionMethod::TwoProbeGeneral,
                joints.sym_ab_w,
                Some(joints.diff_sq_w),
            );
        }
        if row.l_mag == 2 {
            let (sym, diff) = extract_l2_sum_difference(&row.dplus, &row.dminus, row.g)?;
            push(ExtractionMethod::TwoProbeL2, sym, Some(diff));
            if include_single_probe {
                let sym = extract_single_probe_equal_squares(&row.dplus, 1, row.g)?;
                push(ExtractionMethod::SingleProbeEqualSquares, sym, None);
            }
        }
    }
    Ok(out)
}

/// Assembles the method list for a simulated run: general two-probe for
/// l ≥ 1, the |l| = 2 shortcut, and the single-probe readout when the
/// observable pair satisfies Â² = B̂² within `equal_squares_tol`. The
/// single-probe estimate uses the + probe's displacements.
pub fn build_methods(
    sc: &ScenarioConfig,
    dplus: &DisplacementSet,
    dminus: &DisplacementSet,
    oracle: &WeakValueReport,
    equal_squares_tol: f64,
) -> Result<Vec<MethodResult>, ExtractionError> {
    let l_mag = sc.l.unsigned_abs();
    let mut methods = Vec::new();
    if l_mag >= 1 {
        let singles = extract_singles_two_probe(dplus, dminus, l_mag, sc.g)?;
        let joints = extract_joints_two_probe(dplus, dminus, singles, l_mag, sc.g)?;
        methods.push(MethodResult::new(
            WeakValueEstimate::two_probe_general(singles, joints),
            oracle,
        ));
    }
    if l_mag == 2 {
        let (sym, diff) = extract_l2_sum_difference(dplus, dminus, sc.g)?;
        methods.push(MethodResult::new(
            WeakValueEstimate::two_probe_l2(sym, diff),
            oracle,
        ));
        if equal_squares_check(&sc.a, &sc.b, equal_squares_tol) {
            let sym = extract_single_probe_equal_squares(dplus, 1, sc.g)?;
            methods.push(MethodResult::new(
                WeakValueEstimate::single_probe_equal_squares(sym),
                oracle,
            ));
        }
    }
    Ok(methods)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> CsvRow {
        CsvRow {
            g: 0.0125,
            l_mag: 2,
            prob_plus: Some(0.7499999999999911),
            prob_minus: Some(0.75),
            dplus: DisplacementSet {
                dx: 1.0 / 3.0,
                dy: -2.0e-17,
                dxy: 5.55e-5,
                dx2y2h: -1.25e-6,
            },
            dminus: DisplacementSet {
                dx: 0.333333333333333,
                dy: 0.0,
                dxy: 5.5e-5,
                dx2y2h: 1.25e-6,
            },
            method: Some(ExtractionMethod::TwoProbeL2),
            re_sym_ab: Some(-0.6666666666666666),
            im_sym_ab: Some(1.0e-14),
            re_diff_sq: Some(0.0),
            im_diff_sq: None,
            re_residual_sym: Some(3.3e-8),
            im_residual_sym: Some(1.0e-14),
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let rows = vec![sample_row()];
        let text = rows_to_csv(&rows);
        let parsed = parse_report_csv(&text).unwrap();
        assert_eq!(parsed, rows);

        // CSV → JSON → parse keeps every bit too.
        let json = serde_json::to_string(&parsed).unwrap();
        let back: Vec<CsvRow> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn header_only_for_empty_input() {
        let text = emit_report(&[], ReportFormat::Csv);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        assert_eq!(parse_report_csv(&text).unwrap(), vec![]);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(
            parse_report_csv("g,l\n1,2\n"),
            Err(ReportError::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn extract_rows_covers_all_l2_methods() {
        let g = 0.05;
        let mut row = sample_row();
        row.g = g;
        row.method = None;
        row.dplus = DisplacementSet {
            dx: g,
            dy: g,
            dxy: g * g,
            dx2y2h: 0.0,
        };
        row.dminus = row.dplus;
        let out = extract_rows(&[row], true).unwrap();
        assert_eq!(out.len(), 3);
        for line in &out {
            assert!((line.re_sym_ab.unwrap() - 2.0).abs() < 1e-12);
            assert_eq!(line.re_residual_sym, None);
        }
    }
}
