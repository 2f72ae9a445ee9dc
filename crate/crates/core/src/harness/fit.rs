//! Least-squares rate fits in log-log coordinates.

use crate::error::{Error, Result};

/// Minimum number of points a fit needs.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFit {
    Fit {
        slope: f64,
        intercept: f64,
        r_squared: f64,
        points: usize,
    },
    /// Some distance at or after `t_min` is zero: no power law to fit.
    ConvergedToZero { first: usize },
}

impl RateFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            RateFit::Fit { slope, .. } => Some(*slope),
            RateFit::ConvergedToZero { .. } => None,
        }
    }
}

/// Fits `log distance = intercept + slope · log t` over the points with `t ≥ t_min`.
pub fn fit_rate(points: &[(usize, f64)], t_min: usize) -> Result<RateFit> {
    let used: Vec<(usize, f64)> = points.iter().copied().filter(|&(t, _)| t >= t_min && t > 0).collect();
    if used.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidInput(format!(
            "rate fit needs at least {MIN_FIT_POINTS} checkpoints with t ≥ {t_min}, found {}",
            used.len()
        )));
    }
    if let Some(&(t, _)) = used.iter().find(|&&(_, v)| v <= 0.0) {
        return Ok(RateFit::ConvergedToZero { first: t });
    }
    if used.iter().any(|&(_, v)| !v.is_finite()) {
        return Err(Error::InvalidInput("rate fit needs finite distances".into()));
    }
    let xs: Vec<f64> = used.iter().map(|&(t, _)| (t as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("rate fit needs distinct checkpoints".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit::Fit {
        slope,
        intercept,
        r_squared,
        points: used.len(),
    })
}
