use std::path::Path;

use crate::error::{Error, Result};

pub const REPORT_HEADER: &str = "family,param,true_value,method,bias,mse,ne_percent,reps_used,wall_seconds";

/// One line of a simulation table: a parameter component under one method.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub family: String,
    pub param: String,
    pub true_value: f64,
    pub method: String,
    /// Mean of `θ̂ − θ*` over eligible repetitions.
    pub bias: f64,
    /// Mean of `(θ̂ − θ*)²` over eligible repetitions.
    pub mse: f64,
    pub ne_percent: f64,
    pub reps_used: usize,
    pub wall_seconds: f64,
}

/// `x` rounded to 15 significant digits, trailing zeros dropped. Fixed
/// notation for magnitudes in `[1e-4, 1e15)`, scientific otherwise.
pub(crate) fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

fn check_text(field: &str, value: &str) -> Result<()> {
    if value.contains([',', '\n', '"']) {
        return Err(Error::Usage(format!("{field} `{value}` cannot be written to CSV")));
    }
    Ok(())
}

pub fn format_report(rows: &[ReportRow]) -> Result<String> {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        check_text("family", &r.family)?;
        check_text("param", &r.param)?;
        check_text("method", &r.method)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.family,
            r.param,
            format_number(r.true_value),
            r.method,
            format_number(r.bias),
            format_number(r.mse),
            format_number(r.ne_percent),
            r.reps_used,
            format_number(r.wall_seconds),
        ));
    }
    Ok(out)
}

pub fn write_report(rows: &[ReportRow], path: &Path) -> Result<()> {
    std::fs::write(path, format_report(rows)?)?;
    Ok(())
}

pub fn parse_report(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == REPORT_HEADER => {}
        _ => return Err(Error::parse(1, None, format!("expected header `{REPORT_HEADER}`"))),
    }
    let columns: Vec<&str> = REPORT_HEADER.split(',').collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.trim_end().split(',').collect();
        if cells.len() != columns.len() {
            return Err(Error::parse(
                line_no,
                None,
                format!("expected {} columns, found {}", columns.len(), cells.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            cells[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, Some(columns[i]), format!("`{}` is not a number", cells[i])))
        };
        rows.push(ReportRow {
            family: cells[0].to_string(),
            param: cells[1].to_string(),
            true_value: num(2)?,
            method: cells[3].to_string(),
            bias: num(4)?,
            mse: num(5)?,
            ne_percent: num(6)?,
            reps_used: cells[7]
                .parse()
                .map_err(|_| Error::parse(line_no, Some(columns[7]), format!("`{}` is not a count", cells[7])))?,
            wall_seconds: num(8)?,
        });
    }
    Ok(rows)
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    parse_report(&std::fs::read_to_string(path)?)
}
