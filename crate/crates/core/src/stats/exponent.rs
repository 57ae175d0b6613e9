//! Estimating the exponent `E` of a packing from its distribution function.
//!
//! `N(x)` is a staircase, and regressing `ln N` against `ln x` at arbitrary
//! sample points is biased by where the samples fall on each step. Each
//! log-spaced sample is therefore moved down to the corner of its step
//! (the largest inverse diameter not exceeding it), duplicates are
//! dropped, and the fit is weighted by `N` since counts have roughly
//! Poisson scatter.

use serde::Serialize;

use super::distribution::CurvatureDistribution;
use super::fit::{least_squares, LineFit};
use crate::error::StatsError;

pub const SAMPLES_PER_DECADE: usize = 16;
pub const MIN_SAMPLES: usize = 8;
pub const MIN_DISTINCT_COUNTS: usize = 3;
/// Width of a crossover shell in inverse diameter.
const SHELL_RATIO: f64 = 3.162_277_660_168_379_5;
const CROSSOVER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMethod {
    Slope,
    PartialSumCrossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shell {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossover {
    pub t: f64,
    pub shells: Vec<Shell>,
    /// `I_{j+1}(t) / I_j(t)` for consecutive nonempty shells at the crossover.
    pub tail_ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEstimate {
    #[serde(rename = "E")]
    pub e: f64,
    pub method: ExponentMethod,
    pub fit: LineFit,
    pub x_range: (f64, f64),
    pub samples: usize,
    pub corners: Vec<(f64, usize)>,
    pub crossover: Option<Crossover>,
}

/// `x_lo · 10^(k/16)` up to `x_hi`, with `x_hi` itself appended.
pub fn log_spaced(x_lo: f64, x_hi: f64, per_decade: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let x = x_lo * 10f64.powf(k as f64 / per_decade as f64);
        if x > x_hi * (1.0 + 1e-12) {
            break;
        }
        out.push(x);
        k += 1;
    }
    if out.last().is_some_and(|&x| x < x_hi * (1.0 - 1e-9)) {
        out.push(x_hi);
    }
    out
}

pub fn exponent_estimate(d: &CurvatureDistribution, x_lo: f64, x_hi: f64) -> Result<ExponentEstimate, StatsError> {
    if !(x_lo > 0.0) {
        return Err(StatsError::NonpositiveX(x_lo));
    }
    let xs = if x_hi > x_lo { log_spaced(x_lo, x_hi, SAMPLES_PER_DECADE) } else { vec![x_lo] };
    let mut corners: Vec<(f64, usize)> = Vec::new();
    for &x in &xs {
        let Some(c) = d.corner_at_or_below(x) else { continue };
        if c < x_lo * (1.0 - 1e-12) {
            continue;
        }
        if corners.last().is_some_and(|&(last, _)| last == c) {
            continue;
        }
        corners.push((c, d.count(c)));
    }
    let distinct = corners.len();
    if xs.len() < MIN_SAMPLES || distinct < MIN_DISTINCT_COUNTS {
        return Err(StatsError::InsufficientScales {
            samples: xs.len(),
            distinct,
        });
    }
    let lx: Vec<f64> = corners.iter().map(|c| c.0.ln()).collect();
    let ln: Vec<f64> = corners.iter().map(|c| (c.1 as f64).ln()).collect();
    let w: Vec<f64> = corners.iter().map(|c| c.1 as f64).collect();
    let fit = least_squares(&lx, &ln, Some(&w))?;
    Ok(ExponentEstimate {
        e: fit.slope,
        method: ExponentMethod::Slope,
        fit,
        x_range: (x_lo, x_hi),
        samples: xs.len(),
        corners,
        crossover: crossover(d, x_lo, x_hi),
    })
}

/// The `t` at which shell sums `Σ diam^t` over inverse-diameter shells of
/// ratio √10 stop growing: the zero of the least-squares slope of
/// `ln I_j(t)` against the log shell edge. `None` with fewer than three
/// nonempty shells.
pub fn crossover(d: &CurvatureDistribution, x_lo: f64, x_hi: f64) -> Option<Crossover> {
    let inv = d.inverse_diameters();
    let mut shells: Vec<(Shell, Vec<f64>)> = Vec::new();
    let mut lo = x_lo;
    // only complete shells [lo, lo √10) inside the range
    while lo * SHELL_RATIO <= x_hi * (1.0 + 1e-9) {
        let hi = lo * SHELL_RATIO;
        let a = inv.partition_point(|&v| v < lo * (1.0 - 1e-12));
        let b = inv.partition_point(|&v| v < hi * (1.0 - 1e-12));
        if b > a {
            let diam: Vec<f64> = inv[a..b].iter().map(|v| v.recip()).collect();
            shells.push((Shell { lo, hi, count: b - a }, diam));
        }
        lo = hi;
    }
    if shells.len() < 3 {
        return None;
    }
    let edges: Vec<f64> = shells.iter().map(|s| s.0.lo.ln()).collect();
    let log_sums = |t: f64| -> Vec<f64> {
        shells
            .iter()
            .map(|(_, diam)| {
                // log-sum-exp for stability at large t
                let logs: Vec<f64> = diam.iter().map(|x| t * x.ln()).collect();
                let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
            })
            .collect()
    };
    let slope = |t: f64| least_squares(&edges, &log_sums(t), None).map(|f| f.slope).unwrap_or(0.0);
    let (mut a, mut b) = (0.0f64, 4.0f64);
    if slope(a) <= 0.0 || slope(b) >= 0.0 {
        return None;
    }
    while b - a > CROSSOVER_TOL {
        let m = 0.5 * (a + b);
        if slope(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let t = 0.5 * (a + b);
    let sums = log_sums(t);
    Some(Crossover {
        t,
        shells: shells.into_iter().map(|s| s.0).collect(),
        tail_ratios: sums.windows(2).map(|w| (w[1] - w[0]).exp()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::carpet::carpet_generate;
    use crate::geometry::MetricTag;
    use crate::stats::curvature_distribution;

    #[test]
    fn carpet_exponent() {
        let s = 8f64.ln() / 3f64.ln();
        let d = curvature_distribution(&carpet_generate(7).unwrap()).unwrap();
        let est = exponent_estimate(&d, 3.0, 3f64.powi(7) / std::f64::consts::SQRT_2).unwrap();
        assert!((est.e - s).abs() < 0.01, "{}", est.e);
        let c = est.crossover.unwrap();
        assert!((c.t - s).abs() < 1e-3, "{}", c.t);
        assert!((c.t - est.e).abs() < 0.05);
    }

    #[test]
    fn two_curves_are_insufficient() {
        let d = CurvatureDistribution::from_diameters([2.0, 1.0], MetricTag::Euclidean).unwrap();
        assert!(matches!(
            exponent_estimate(&d, 0.1, 100.0),
            Err(StatsError::InsufficientScales { .. })
        ));
    }

    #[test]
    fn pure_power_law_is_recovered() {
        // N(x) = floor(x^1.5) exactly at the corners
        let diam: Vec<f64> = (1..=20_000).map(|k| (k as f64).powf(-1.0 / 1.5)).collect();
        let d = CurvatureDistribution::from_diameters(diam, MetricTag::Euclidean).unwrap();
        let est = exponent_estimate(&d, 10.0, 500.0).unwrap();
        assert!((est.e - 1.5).abs() < 0.01, "{}", est.e);
        let c = est.crossover.unwrap();
        assert!((c.t - 1.5).abs() < 0.05, "{}", c.t);
    }

    #[test]
    fn sample_grid() {
        let xs = log_spaced(1.0, 100.0, 16);
        assert_eq!(xs.len(), 33);
        assert!((xs[16] - 10.0).abs() < 1e-12);
        assert!((xs.last().unwrap() - 100.0).abs() < 1e-9);
    }
}
