use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::report::format_number;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::stein::{ml_asymptotic_variance_logarithmic, sandwich_covariance, CovarianceMode, LinearSteinForm, TestFunction};

/// Asymptotic variances of the Stein (`f(k) = k − 1`) and maximum likelihood
/// estimators of the logarithmic `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyRow {
    pub p: f64,
    pub v_st: f64,
    pub v_ml: f64,
    pub ratio: f64,
}

pub fn efficiency_curve(grid: &[f64]) -> Result<Vec<EfficiencyRow>> {
    grid.par_iter()
        .map(|&p| {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("grid value {p} is outside (0, 1)")));
            }
            let model = ModelSpec::logarithmic(p)?;
            let form = LinearSteinForm::new(model.setting(), vec![TestFunction::KMinus1])?;
            let v_st = sandwich_covariance(&model, &form, CovarianceMode::Exact)?[(0, 0)];
            let v_ml = ml_asymptotic_variance_logarithmic(p)?;
            Ok(EfficiencyRow {
                p,
                v_st,
                v_ml,
                ratio: v_st / v_ml,
            })
        })
        .collect()
}

pub fn format_efficiency(rows: &[EfficiencyRow]) -> String {
    let mut out = String::from("p,v_st,v_ml,ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_number(r.p),
            format_number(r.v_st),
            format_number(r.v_ml),
            format_number(r.ratio)
        );
    }
    out
}

pub fn write_efficiency(rows: &[EfficiencyRow], path: &Path) -> Result<()> {
    std::fs::write(path, format_efficiency(rows))?;
    Ok(())
}
