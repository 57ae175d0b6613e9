use serde::Serialize;

use crate::error::StatsError;

/// Straight-line fit `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope.
    pub stderr: f64,
}

/// Weighted least squares; `weights = None` gives ordinary least squares.
pub fn least_squares(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LineFit, StatsError> {
    let n = xs.len();
    if n < 2 {
        return Err(StatsError::InsufficientPoints { needed: 2, got: n });
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..n).map(w).sum();
    let mx = (0..n).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let my = (0..n).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (xs[i] - mx).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| w(i) * (xs[i] - mx) * (ys[i] - my)).sum();
    let syy: f64 = (0..n).map(|i| w(i) * (ys[i] - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::InsufficientPoints { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = (0..n).map(|i| w(i) * (ys[i] - intercept - slope * xs[i]).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    let stderr = if n > 2 {
        // weights are treated as relative; rescale to n effective points
        let scale = n as f64 / sw;
        ((sse * scale / (n - 2) as f64) / (sxx * scale)).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        stderr,
    })
}
