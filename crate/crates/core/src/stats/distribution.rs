use serde::Serialize;

use crate::error::StatsError;
use crate::geometry::MetricTag;
use crate::packing::Packing;

/// Relative slack when comparing `1/diam` with `x`, so that values such as
/// `3^n/√2` count the squares of diameter `√2/3^n` despite rounding.
const RELATIVE_SLACK: f64 = 8.0 * f64::EPSILON;

/// Inverse diameters of a packing, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureDistribution {
    inverse: Vec<f64>,
    pub metric: MetricTag,
}

impl CurvatureDistribution {
    pub fn from_packing(p: &Packing) -> Result<Self, StatsError> {
        Self::from_diameters(p.diameters(), p.metric)
    }

    pub fn from_diameters(diameters: impl IntoIterator<Item = f64>, metric: MetricTag) -> Result<Self, StatsError> {
        let mut inverse: Vec<f64> = diameters.into_iter().map(f64::recip).collect();
        if inverse.is_empty() {
            return Err(StatsError::EmptyPacking);
        }
        inverse.sort_by(f64::total_cmp);
        Ok(Self { inverse, metric })
    }

    pub fn inverse_diameters(&self) -> &[f64] {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inverse.is_empty()
    }

    /// Number of distinct diameter scales.
    pub fn distinct_scales(&self) -> usize {
        let mut n = 0;
        let mut last = f64::NAN;
        for &v in &self.inverse {
            if !(v <= last * (1.0 + RELATIVE_SLACK)) {
                n += 1;
                last = v;
            }
        }
        n
    }

    /// `N(x) = #{k : 1/diam_k <= x}`.
    pub fn eval(&self, x: f64) -> Result<usize, StatsError> {
        if !(x > 0.0) {
            return Err(StatsError::NonpositiveX(x));
        }
        Ok(self.count(x))
    }

    pub(crate) fn count(&self, x: f64) -> usize {
        let bound = x * (1.0 + RELATIVE_SLACK);
        self.inverse.partition_point(|&v| v <= bound)
    }

    /// Largest inverse diameter not exceeding `x`.
    pub(crate) fn corner_at_or_below(&self, x: f64) -> Option<f64> {
        let k = self.count(x);
        (k > 0).then(|| self.inverse[k - 1])
    }
}

pub fn curvature_distribution(p: &Packing) -> Result<CurvatureDistribution, StatsError> {
    CurvatureDistribution::from_packing(p)
}

pub fn eval_n(d: &CurvatureDistribution, x: f64) -> Result<usize, StatsError> {
    d.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub x: f64,
    pub n: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRatioSeries {
    pub s: f64,
    pub rows: Vec<ScalingRow>,
    /// Extremes over rows with `N(x) > 0`; `None` when there are none.
    pub sup: Option<f64>,
    pub inf: Option<f64>,
}

/// `N(x)/x^s` along `xs`.
pub fn scaling_ratio_series(d: &CurvatureDistribution, s: f64, xs: &[f64]) -> ScalingRatioSeries {
    let rows: Vec<ScalingRow> = xs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let n = d.count(x);
            ScalingRow {
                x,
                n,
                ratio: n as f64 / x.powf(s),
            }
        })
        .collect();
    let positive = rows.iter().filter(|r| r.n > 0).map(|r| r.ratio);
    let sup = positive.clone().reduce(f64::max);
    let inf = positive.reduce(f64::min);
    ScalingRatioSeries { s, rows, sup, inf }
}
