//! Least-squares line fits for log-log rate checks.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
    pub points: usize,
}

/// Ordinary least squares y = slope * x + intercept.
pub fn ols_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "line fit needs at least two points".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument(
            "line fit needs distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
        points: xs.len(),
    })
}

/// Fit ln(y) against ln(x), skipping non-positive pairs; errors if fewer
/// than two usable points remain.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (x, y) in xs.iter().zip(ys) {
        if *x > 0.0 && *y > 0.0 {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    ols_line(&lx, &ly)
}
