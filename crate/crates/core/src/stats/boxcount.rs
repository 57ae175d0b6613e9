//! Covering numbers of the unresolved cells of a raster.

use rayon::prelude::*;
use serde::Serialize;

use super::distribution::CurvatureDistribution;
use super::fit::{least_squares, LineFit};
use crate::dynamics::grid::{CellLabel, Grid};
use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingConvention {
    /// Number of ε-grid boxes meeting the set.
    GridCover,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountSeries {
    /// `(ε, n(ε))` with ε strictly decreasing.
    pub points: Vec<(f64, u64)>,
    pub convention: CountingConvention,
    pub cell: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    #[serde(flatten)]
    pub fit: LineFit,
    pub range: (f64, f64),
}

impl DimensionEstimate {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Boxes `[k ε, (k+1) ε)` on one axis met by cell `i` of width `h`.
fn box_span(i: usize, h: f64, eps: f64) -> (usize, usize) {
    let lo = (i as f64 * h / eps + 1e-9).floor() as usize;
    let hi = ((i + 1) as f64 * h / eps - 1e-9).floor() as usize;
    (lo, hi.max(lo))
}

/// `n(ε)` for each ε, anchored at the grid's lower-left corner. Each
/// ε must be at least two cell widths.
pub fn box_count(grid: &Grid, eps: &[f64]) -> Result<BoxCountSeries, StatsError> {
    let h = grid.cell;
    let mut eps: Vec<f64> = eps.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let mut points = Vec::with_capacity(eps.len());
    for &e in &eps {
        if !(e >= 2.0 * h * (1.0 - 1e-9)) {
            return Err(StatsError::EpsilonBelowResolution { eps: e, cell: h });
        }
        points.push((e, count_one(grid, e)));
    }
    Ok(BoxCountSeries {
        points,
        convention: CountingConvention::GridCover,
        cell: h,
    })
}

fn count_one(grid: &Grid, eps: f64) -> u64 {
    let h = grid.cell;
    let nbx = box_span(grid.width - 1, h, eps).1 + 1;
    let nby = box_span(grid.height - 1, h, eps).1 + 1;
    // each box row is owned by one task; a cell row can touch two box rows
    (0..nby)
        .into_par_iter()
        .map(|by| {
            let mut hit = vec![false; nbx];
            let j_lo = ((by as f64 * eps / h).floor() as usize).saturating_sub(1);
            let j_hi = (((by + 1) as f64 * eps / h).ceil() as usize + 1).min(grid.height);
            for j in j_lo..j_hi {
                let (ya, yb) = box_span(j, h, eps);
                if by < ya || by > yb {
                    continue;
                }
                let row = &grid.labels[j * grid.width..(j + 1) * grid.width];
                for (i, l) in row.iter().enumerate() {
                    if matches!(l, CellLabel::Unresolved) {
                        let (xa, xb) = box_span(i, h, eps);
                        hit[xa] = true;
                        hit[xb] = true;
                    }
                }
            }
            hit.iter().filter(|&&b| b).count() as u64
        })
        .sum()
}

/// Least-squares slope of `ln n` against `ln(1/ε)`.
pub fn dimension_estimate(series: &BoxCountSeries) -> Result<DimensionEstimate, StatsError> {
    let pts: Vec<&(f64, u64)> = series.points.iter().filter(|p| p.1 > 0).collect();
    if pts.len() < 4 {
        return Err(StatsError::InsufficientPoints {
            needed: 4,
            got: pts.len(),
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| -p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| (p.1 as f64).ln()).collect();
    let fit = least_squares(&xs, &ys, None)?;
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(DimensionEstimate { fit, range: (lo, hi) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub eps: f64,
    pub big_n: usize,
    pub small_n: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub beta: f64,
    pub rows: Vec<CompareRow>,
    pub max_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    /// Fewer than two scales on either side.
    pub low_confidence: bool,
}

/// `N(β/ε) / n(ε)` along a box-count series.
pub fn compare_n_n(d: &CurvatureDistribution, series: &BoxCountSeries, beta: f64) -> Comparison {
    let rows: Vec<CompareRow> = series
        .points
        .iter()
        .map(|&(eps, small_n)| {
            let big_n = d.count(beta / eps);
            CompareRow {
                eps,
                big_n,
                small_n,
                ratio: if small_n == 0 { f64::INFINITY } else { big_n as f64 / small_n as f64 },
            }
        })
        .collect();
    let finite = rows.iter().map(|r| r.ratio).filter(|r| r.is_finite());
    Comparison {
        beta,
        max_ratio: finite.clone().reduce(f64::max),
        min_ratio: finite.reduce(f64::min),
        low_confidence: d.distinct_scales() < 2 || rows.len() < 2,
        rows,
    }
}
