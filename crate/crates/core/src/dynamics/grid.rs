//! Square-cell rasters of the plane and escape-time classification.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::attractors::AttractorSet;
use super::chart::Stepper;
use crate::error::DynamicsError;
use crate::expr::RationalMap;
use crate::geometry::{spherical_distance, BoundingBox, ExtendedComplex};

pub const MIN_GRID_SIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellLabel {
    Unresolved,
    Basin { attractor: u32, iters: u16 },
}

impl CellLabel {
    pub fn attractor(&self) -> Option<u32> {
        match *self {
            CellLabel::Unresolved => None,
            CellLabel::Basin { attractor, .. } => Some(attractor),
        }
    }
}

/// Requested raster: `resolution` cells along the longer side of `bbox`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bbox: BoundingBox,
    pub width: usize,
    pub height: usize,
    pub cell: f64,
}

impl GridSpec {
    pub fn new(bbox: BoundingBox, resolution: usize) -> Result<Self, DynamicsError> {
        let (w, h) = (bbox.width(), bbox.height());
        let cell = w.max(h) / resolution.max(1) as f64;
        let width = (w / cell).round().max(1.0) as usize;
        let height = (h / cell).round().max(1.0) as usize;
        if width < MIN_GRID_SIDE || height < MIN_GRID_SIDE {
            return Err(DynamicsError::GridTooSmall { width, height });
        }
        Ok(Self {
            bbox,
            width,
            height,
            cell,
        })
    }
}

/// A raster of labels. Cell `(i, j)` covers
/// `[x0 + i h, x0 + (i+1) h] × [y0 + j h, y0 + (j+1) h]`; row 0 is the
/// bottom (minimum imaginary part) of the box.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub bbox: BoundingBox,
    pub width: usize,
    pub height: usize,
    pub cell: f64,
    pub labels: Vec<CellLabel>,
}

impl Grid {
    /// Wraps precomputed labels; the cell size is taken from the box width.
    pub fn from_labels(bbox: BoundingBox, width: usize, height: usize, labels: Vec<CellLabel>) -> Self {
        assert_eq!(labels.len(), width * height, "label count must match grid size");
        Self {
            cell: bbox.width() / width as f64,
            bbox,
            width,
            height,
            labels,
        }
    }

    pub fn label(&self, i: usize, j: usize) -> CellLabel {
        self.labels[j * self.width + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.bbox.min[0] + (i as f64 + 0.5) * self.cell,
            self.bbox.min[1] + (j as f64 + 0.5) * self.cell,
        )
    }

    /// Cell containing `p`, if inside the grid.
    pub fn cell_of(&self, p: Complex64) -> Option<(usize, usize)> {
        let i = ((p.re - self.bbox.min[0]) / self.cell).floor();
        let j = ((p.im - self.bbox.min[1]) / self.cell).floor();
        if i < 0.0 || j < 0.0 || i >= self.width as f64 || j >= self.height as f64 {
            return None;
        }
        Some((i as usize, j as usize))
    }

    pub fn unresolved_count(&self) -> usize {
        self.labels.iter().filter(|l| matches!(l, CellLabel::Unresolved)).count()
    }

    pub fn unresolved_fraction(&self) -> f64 {
        self.unresolved_count() as f64 / self.labels.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub max_iters: usize,
    /// Chordal capture radius around attracting cycle points.
    pub capture_radius: f64,
    /// Cells whose estimated distance to the unresolved set is below
    /// `band` cell widths stay `Unresolved`.
    pub band: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            capture_radius: 1e-6,
            band: 1.0,
        }
    }
}

/// Extra steps taken after capture to sharpen the distance estimate.
const REFINE_STEPS: usize = 4;

#[derive(Debug, Clone, Copy)]
pub enum Capture {
    Captured { attractor: u32, iters: usize, distance: f64 },
    Escaped,
}

/// Escape-time iteration of a single point, with a conformal estimate of
/// its Euclidean distance to the boundary of its basin.
pub struct Classifier<'a> {
    stepper: Stepper,
    attractors: &'a AttractorSet,
    params: ClassifyParams,
}

impl<'a> Classifier<'a> {
    pub fn new(f: &RationalMap, attractors: &'a AttractorSet, params: ClassifyParams) -> Self {
        Self {
            stepper: Stepper::new(f),
            attractors,
            params,
        }
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }

    /// Attractor id and chordal distance if `z` lies within the capture region.
    fn captured(&self, z: ExtendedComplex) -> Option<(usize, f64, usize)> {
        if let Some(k) = self.attractors.infinity {
            let escaped = match z {
                ExtendedComplex::Infinity => true,
                ExtendedComplex::Finite(w) => w.norm() > self.attractors.escape_radius,
            };
            if escaped {
                return Some((k, spherical_distance(z, ExtendedComplex::Infinity), 0));
            }
        }
        for (k, cycle) in self.attractors.cycles.iter().enumerate() {
            if Some(k) == self.attractors.infinity {
                continue;
            }
            for (idx, &c) in cycle.points.iter().enumerate() {
                let d = spherical_distance(z, c);
                if d < self.params.capture_radius {
                    return Some((k, d, idx));
                }
            }
        }
        None
    }

    pub fn run(&self, z0: ExtendedComplex) -> Capture {
        let mut z = z0;
        let mut log_sigma = 0.0f64;
        for n in 0..=self.params.max_iters {
            if let Some((k, mut s, mut idx)) = self.captured(z) {
                let cycle = &self.attractors.cycles[k];
                let superattracting = cycle.multiplier < 1e-8;
                for _ in 0..REFINE_STEPS {
                    if s < 1e-150 {
                        break;
                    }
                    let st = self.stepper.step(z);
                    let next_idx = (idx + 1) % cycle.points.len();
                    let ns = spherical_distance(st.image, cycle.points[next_idx]);
                    if !(ns > 0.0) || st.sigma == 0.0 {
                        break;
                    }
                    log_sigma += st.sigma.ln();
                    z = st.image;
                    s = ns;
                    idx = next_idx;
                }
                let distance = if s <= 0.0 || !log_sigma.is_finite() {
                    f64::INFINITY
                } else {
                    let sph = if superattracting {
                        s * (1.0 / s).ln().max(1.0)
                    } else {
                        s
                    };
                    let d_sph = sph * (-log_sigma).exp();
                    let scale = match z0 {
                        ExtendedComplex::Finite(w) => (1.0 + w.norm_sqr()) / 2.0,
                        ExtendedComplex::Infinity => f64::INFINITY,
                    };
                    d_sph * scale
                };
                return Capture::Captured {
                    attractor: k as u32,
                    iters: n,
                    distance,
                };
            }
            let st = self.stepper.step(z);
            if st.sigma == 0.0 {
                // landed on a critical point: the estimate degenerates, keep going
                log_sigma = f64::NEG_INFINITY;
            } else if log_sigma.is_finite() {
                log_sigma += st.sigma.ln();
            }
            z = st.image;
        }
        Capture::Escaped
    }

    pub fn classify_point(&self, z0: Complex64, cell: f64) -> CellLabel {
        match self.run(ExtendedComplex::Finite(z0)) {
            Capture::Captured {
                attractor,
                iters,
                distance,
            } if distance >= self.params.band * cell => CellLabel::Basin {
                attractor,
                iters: iters.min(u16::MAX as usize) as u16,
            },
            _ => CellLabel::Unresolved,
        }
    }
}

/// Classifies every cell center of `spec`. Rows are processed in parallel;
/// the result does not depend on the thread count.
pub fn classify_grid(f: &RationalMap, attractors: &AttractorSet, spec: &GridSpec, params: ClassifyParams) -> Grid {
    let classifier = Classifier::new(f, attractors, params);
    let (x0, y0, h) = (spec.bbox.min[0], spec.bbox.min[1], spec.cell);
    let mut labels = vec![CellLabel::Unresolved; spec.width * spec.height];
    labels.par_chunks_mut(spec.width).enumerate().for_each(|(j, row)| {
        let y = y0 + (j as f64 + 0.5) * h;
        for (i, cell) in row.iter_mut().enumerate() {
            let x = x0 + (i as f64 + 0.5) * h;
            *cell = classifier.classify_point(Complex64::new(x, y), h);
        }
    });
    let bbox = BoundingBox {
        min: [x0, y0],
        max: [x0 + spec.width as f64 * h, y0 + spec.height as f64 * h],
    };
    Grid {
        bbox,
        width: spec.width,
        height: spec.height,
        cell: h,
        labels,
    }
}
