//! Residual-set samplers: points on which scale-density balls are centered.

use num_complex::Complex64;
use rand::Rng;

use crate::dynamics::grid::{CellLabel, Grid};
use crate::packing::{CurveKind, Packing};

/// Offsets of the eight kept subsquares of the carpet construction.
const CARPET_DIGITS: [(u8, u8); 8] = [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2), (2, 2)];

/// Points of the Sierpinski carpet from `depth` random base-3 digit pairs.
pub fn carpet_points<R: Rng>(n: usize, depth: u32, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let (mut x, mut y, mut scale) = (0.0, 0.0, 1.0 / 3.0);
            for _ in 0..depth {
                let (a, b) = CARPET_DIGITS[rng.gen_range(0..8)];
                x += a as f64 * scale;
                y += b as f64 * scale;
                scale /= 3.0;
            }
            Complex64::new(x, y)
        })
        .collect()
}

/// A random curve, then a random point on it.
pub fn curve_points<R: Rng>(p: &Packing, n: usize, rng: &mut R) -> Vec<Complex64> {
    let curves = p.curves();
    if curves.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|_| match &curves[rng.gen_range(0..curves.len())].kind {
            CurveKind::RoundCircle(c) => c.center + Complex64::from_polar(c.radius, rng.gen_range(0.0..std::f64::consts::TAU)),
            CurveKind::SquareBoundary { corner, side } => {
                let t = rng.gen_range(0.0..4.0 * side);
                let (k, u) = ((t / side).floor().min(3.0), t % side);
                corner
                    + match k as u8 {
                        0 => Complex64::new(u, 0.0),
                        1 => Complex64::new(*side, u),
                        2 => Complex64::new(side - u, *side),
                        _ => Complex64::new(0.0, side - u),
                    }
            }
            CurveKind::RasterBoundary { points, .. } => points[rng.gen_range(0..points.len())],
        })
        .collect()
}

/// Centers of randomly chosen unresolved cells.
pub fn raster_points<R: Rng>(grid: &Grid, n: usize, rng: &mut R) -> Vec<Complex64> {
    let cells: Vec<usize> = grid
        .labels
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, CellLabel::Unresolved))
        .map(|(k, _)| k)
        .collect();
    if cells.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|_| {
            let k = cells[rng.gen_range(0..cells.len())];
            grid.cell_center(k % grid.width, k / grid.width)
        })
        .collect()
}
