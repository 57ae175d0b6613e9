//! Empirical homogeneity constants of a packing: quasi-ball ratio α,
//! scale density β, relative separation δ and fatness τ.

pub mod checks;
pub mod index;
pub mod sampling;
pub mod shape;

pub use checks::{
    alpha, curve_distance, fatness, relative_separation, scale_density, BallSample, Fatness, QuasiBallResult,
    ScaleDensity, Separation,
};
pub use index::CurveIndex;
pub use sampling::{carpet_points, curve_points, raster_points};
pub use shape::{component_regions, quasi_ball_stats, QuasiBall, RasterRegion, Shape};

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::components::ComponentMap;
use crate::packing::Packing;
use crate::stats::log_spaced;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityParams {
    /// Residual points for the scale-density balls.
    pub points: usize,
    pub radii_per_decade: usize,
    /// Defaults to four times the smallest diameter.
    pub r_min: Option<f64>,
    /// Defaults to the diameter of the whole packing.
    pub r_max: Option<f64>,
    pub trial_beta: f64,
    pub pair_budget: usize,
    pub fatness_samples: usize,
    pub seed: u64,
}

impl Default for HomogeneityParams {
    fn default() -> Self {
        Self {
            points: 500,
            radii_per_decade: 8,
            r_min: None,
            r_max: None,
            trial_beta: 10.0,
            pair_budget: 50_000_000,
            fatness_samples: 10_000,
            seed: 0,
        }
    }
}

impl HomogeneityParams {
    pub fn radii(&self, p: &Packing) -> Vec<f64> {
        let d_max = p.curves().first().map_or(1.0, |c| c.diameter);
        let d_min = p.curves().last().map_or(1.0, |c| c.diameter);
        let hi = self.r_max.unwrap_or(d_max);
        let lo = self.r_min.unwrap_or(4.0 * d_min).min(hi);
        log_spaced(lo, hi, self.radii_per_decade.max(1))
    }
}

/// A constant, or the reason it does not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Check<T> {
    Computed(T),
    Inapplicable { reason: String },
}

impl<T> Check<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Check::Computed(v) => Some(v),
            Check::Inapplicable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sampling {
    pub sampler: String,
    pub residual_points: usize,
    pub radii: Vec<f64>,
    #[serde(flatten)]
    pub params: HomogeneityParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub alpha: Check<QuasiBallResult>,
    pub beta: Check<ScaleDensity>,
    pub delta: Check<Separation>,
    pub tau: Check<Fatness>,
    pub sampling: Sampling,
}

/// Regions for the round and square curves, outer curve excluded.
pub fn exact_shapes(p: &Packing) -> Vec<(u64, Shape)> {
    p.curves()
        .iter()
        .filter(|c| !c.outer)
        .filter_map(|c| Shape::from_curve(c).map(|s| (c.id, s)))
        .collect()
}

/// Raster regions of the packing's bounded components. Curve ids are
/// component ids of `map`.
pub fn raster_shapes(p: &Packing, map: &ComponentMap) -> Vec<(u64, Shape)> {
    let mut regions: Vec<Option<RasterRegion>> = component_regions(map).into_iter().map(Some).collect();
    p.curves()
        .iter()
        .filter(|c| !c.outer)
        .filter_map(|c| {
            let r = regions.get_mut(c.id as usize)?.take()?;
            Some((c.id, Shape::Raster(r)))
        })
        .collect()
}

/// Runs all four checks. `residual` holds the ball centers; `sampler`
/// names how they were drawn.
pub fn homogeneity_report(
    p: &Packing,
    shapes: &[(u64, Shape)],
    residual: &[Complex64],
    sampler: &str,
    params: &HomogeneityParams,
) -> HomogeneityReport {
    let radii = params.radii(p);
    let alpha = match alpha(shapes) {
        Ok(a) => Check::Computed(a),
        Err(e) => Check::Inapplicable { reason: e.to_string() },
    };
    let beta = if residual.is_empty() {
        Check::Inapplicable {
            reason: "no residual sample points".into(),
        }
    } else {
        Check::Computed(scale_density(p, residual, &radii, params.trial_beta))
    };
    let delta = match relative_separation(p, params.pair_budget) {
        Ok(s) => Check::Computed(s),
        Err(e) => Check::Inapplicable { reason: e.to_string() },
    };
    let tau = match fatness(shapes, params.fatness_samples, params.seed) {
        Some(f) => Check::Computed(f),
        None => Check::Inapplicable {
            reason: "no components with area".into(),
        },
    };
    HomogeneityReport {
        alpha,
        beta,
        delta,
        tau,
        sampling: Sampling {
            sampler: sampler.into(),
            residual_points: residual.len(),
            radii,
            params: params.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::carpet_generate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn carpet_report() {
        let p = carpet_generate(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = carpet_points(100, 30, &mut rng);
        let params = HomogeneityParams {
            fatness_samples: 2000,
            ..Default::default()
        };
        let r = homogeneity_report(&p, &exact_shapes(&p), &pts, "carpet-digits", &params);
        assert!((r.alpha.value().unwrap().alpha - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(r.beta.value().unwrap().beta.is_finite());
        assert!((r.delta.value().unwrap().delta - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let tau = r.tau.value().unwrap().tau;
        assert!(tau > 0.0 && tau <= std::f64::consts::PI);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["delta"]["status"], "computed");
        assert_eq!(json["sampling"]["seed"], 0);
    }
}
