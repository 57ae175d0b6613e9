//! Basins of attraction of a rational map on a raster, their components,
//! and the packing formed by the component boundaries.

pub mod attractors;
pub mod chart;
pub mod components;
pub mod grid;
pub mod orbits;

pub use attractors::{detect_attractors, detect_attractors_allowing_parabolic, AttractorSet, Cycle};
pub use components::{extract_packing, label_components, Component, ComponentMap, DEFAULT_MIN_CELLS};
pub use grid::{classify_grid, CellLabel, ClassifyParams, Grid, GridSpec};
pub use orbits::{classify_critical_orbits, CriticalOrbitReport, OrbitFate};

use crate::expr::RationalMap;
use crate::geometry::BoundingBox;

/// Finite attractor points and critical points that fall outside `bbox`.
pub fn window_warnings(f: &RationalMap, attractors: &AttractorSet, bbox: &BoundingBox) -> Vec<String> {
    let mut out = Vec::new();
    for (k, c) in attractors.cycles.iter().enumerate() {
        for p in c.points.iter().filter_map(|p| p.finite()) {
            if !bbox.contains(p) {
                out.push(format!("attractor {k} point {p} lies outside the window"));
            }
        }
    }
    if let Ok(cps) = f.critical_points() {
        for p in cps.iter().filter_map(|c| c.point.finite()) {
            if !bbox.contains(p) {
                out.push(format!("critical point {p} lies outside the window"));
            }
        }
    }
    out
}
