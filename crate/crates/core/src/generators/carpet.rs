//! The standard Sierpiński carpet on `[0,1]^2`, as a packing of square
//! boundaries and as an exact raster.
//!
//! Surviving squares are addressed by base-8 digit strings: digit `d`
//! selects one of the eight non-central cells of a 3×3 subdivision, in
//! row-major order. The removed square of level `m` inside the survivor
//! with digits `d_1..d_{m-1}` gets id `1 + (8^{m-1} - 1)/7 + index`, where
//! `index` reads the digits as a base-8 number. `C_0` has id 0.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::grid::{CellLabel, Grid};
use crate::error::GeneratorError;
use crate::geometry::{BoundingBox, MetricTag};
use crate::packing::{CurveKind, CurveRecord, Packing};

pub const MAX_LEVELS: u32 = 12;

/// (column, row) of the eight surviving subsquares, row-major.
const OFFSETS: [(u64, u64); 8] = [
    (0, 0),
    (1, 0),
    (2, 0),
    (0, 1),
    (2, 1),
    (0, 2),
    (1, 2),
    (2, 2),
];

fn digit_of(col: u64, row: u64) -> Option<u64> {
    OFFSETS.iter().position(|&o| o == (col, row)).map(|d| d as u64)
}

/// Id of the first removed square of level `m`.
pub fn level_offset(m: u32) -> u64 {
    1 + (8u64.pow(m - 1) - 1) / 7
}

/// `1 + (8^n - 1)/7`: number of curves in a level-`n` carpet packing.
pub fn carpet_curve_count(levels: u32) -> u64 {
    1 + (8u64.pow(levels) - 1) / 7
}

pub fn square_diameter(level: u32) -> f64 {
    std::f64::consts::SQRT_2 / 3f64.powi(level as i32)
}

fn check_levels(levels: u32) -> Result<(), GeneratorError> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(GeneratorError::LevelOutOfRange(levels));
    }
    Ok(())
}

pub fn carpet_generate(levels: u32) -> Result<Packing, GeneratorError> {
    check_levels(levels)?;
    let mut curves = Vec::with_capacity(carpet_curve_count(levels) as usize);
    curves.push(CurveRecord {
        id: 0,
        diameter: std::f64::consts::SQRT_2,
        kind: CurveKind::SquareBoundary {
            corner: Complex64::new(0.0, 0.0),
            side: 1.0,
        },
        generation: 0,
        outer: true,
        parents: Vec::new(),
    });
    for m in 1..=levels {
        let scale = 3u64.pow(m);
        let side = 1.0 / scale as f64;
        let diameter = square_diameter(m);
        let offset = level_offset(m);
        for index in 0..8u64.pow(m - 1) {
            // survivor corner in units of 3^-m
            let (mut cx, mut cy) = (0u64, 0u64);
            let mut rest = index;
            for j in (1..m).rev() {
                let (ox, oy) = OFFSETS[(rest % 8) as usize];
                cx += ox * 3u64.pow(m - j);
                cy += oy * 3u64.pow(m - j);
                rest /= 8;
            }
            let corner = Complex64::new((cx + 1) as f64 / scale as f64, (cy + 1) as f64 / scale as f64);
            curves.push(CurveRecord {
                id: offset + index,
                diameter,
                kind: CurveKind::SquareBoundary { corner, side },
                generation: m,
                outer: false,
                parents: Vec::new(),
            });
        }
    }
    Ok(Packing::new(
        MetricTag::Euclidean,
        format!("carpet levels={levels}"),
        curves,
    ))
}

/// Id of the removed square containing the level-`levels` cell `(a, b)`,
/// or `None` when the cell belongs to the residual set.
pub fn removed_square_id(a: u64, b: u64, levels: u32) -> Option<u64> {
    let mut index = 0u64;
    for m in 1..=levels {
        let p = 3u64.pow(levels - m);
        let (dx, dy) = ((a / p) % 3, (b / p) % 3);
        if dx == 1 && dy == 1 {
            return Some(level_offset(m) + index);
        }
        index = index * 8 + digit_of(dx, dy).expect("non-central digit");
    }
    None
}

/// Exact raster of the level-`levels` carpet: residual cells are
/// `Unresolved`, cells of removed squares are `Basin(square id)`.
pub fn carpet_raster(levels: u32, resolution: usize) -> Result<Grid, GeneratorError> {
    check_levels(levels)?;
    let base = 3usize.pow(levels);
    if resolution == 0 || resolution % base != 0 {
        return Err(GeneratorError::ResolutionNotMultiple { resolution, levels });
    }
    let c = (resolution / base) as u64;
    let bbox = BoundingBox::new(0.0, 0.0, 1.0, 1.0).expect("unit box");
    let mut labels = vec![CellLabel::Unresolved; resolution * resolution];
    labels
        .par_chunks_mut(resolution)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, cell) in row.iter_mut().enumerate() {
                if let Some(id) = removed_square_id(i as u64 / c, j as u64 / c, levels) {
                    *cell = CellLabel::Basin {
                        attractor: id as u32,
                        iters: 0,
                    };
                }
            }
        });
    Ok(Grid::from_labels(bbox, resolution, resolution, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_diameters() {
        let p = carpet_generate(1).unwrap();
        assert_eq!(p.len(), 2);
        let d: Vec<f64> = p.diameters().collect();
        assert_eq!(d, vec![std::f64::consts::SQRT_2, std::f64::consts::SQRT_2 / 3.0]);
        let p3 = carpet_generate(3).unwrap();
        assert_eq!(p3.len(), 74);
        for c in p3.curves() {
            assert_eq!(c.diameter, square_diameter(c.generation));
            let exact = c.kind.exact_diameter().unwrap();
            assert!((exact - c.diameter).abs() <= 1e-15);
        }
        assert_eq!(carpet_generate(0), Err(GeneratorError::LevelOutOfRange(0)));
        assert_eq!(carpet_generate(13), Err(GeneratorError::LevelOutOfRange(13)));
    }

    #[test]
    fn closed_form_counts_per_level() {
        let p = carpet_generate(5).unwrap();
        for m in 1..=5u32 {
            let n = p.curves().iter().filter(|c| c.generation == m).count();
            assert_eq!(n as u64, 8u64.pow(m - 1));
        }
        assert_eq!(p.len() as u64, carpet_curve_count(5));
    }

    #[test]
    fn square_placement_matches_raster_ids() {
        let levels = 3;
        let p = carpet_generate(levels).unwrap();
        let scale = 27.0;
        for c in p.curves().iter().filter(|c| !c.outer) {
            let CurveKind::SquareBoundary { corner, side } = c.kind else { unreachable!() };
            // a cell in the middle of the square maps back to the same id
            let mid = corner + Complex64::new(side / 2.0, side / 2.0);
            let (a, b) = ((mid.re * scale).floor() as u64, (mid.im * scale).floor() as u64);
            assert_eq!(removed_square_id(a, b, levels), Some(c.id));
        }
    }

    #[test]
    fn removed_area_partial_sums_increase_to_one() {
        let mut prev = 0.0;
        for n in 1..=8u32 {
            let area: f64 = (1..=n).map(|m| 8f64.powi(m as i32 - 1) / 9f64.powi(m as i32)).sum();
            assert!(area > prev && area < 1.0);
            prev = area;
        }
        assert!((1.0 - prev - (8.0f64 / 9.0).powi(8)).abs() < 1e-12);
    }

    /// Ternary-digit brute force, independent of the id machinery.
    fn residual_brute(levels: u32, resolution: usize) -> usize {
        let c = resolution / 3usize.pow(levels);
        let mut n = 0;
        for j in 0..resolution {
            for i in 0..resolution {
                let (mut a, mut b) = (i / c, j / c);
                let mut removed = false;
                for _ in 0..levels {
                    if a % 3 == 1 && b % 3 == 1 {
                        removed = true;
                    }
                    a /= 3;
                    b /= 3;
                }
                if !removed {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn raster_residual_counts() {
        let g = carpet_raster(1, 9).unwrap();
        assert_eq!(g.unresolved_count(), 72);
        for (levels, c) in [(2u32, 1usize), (2, 3), (3, 2), (4, 1)] {
            let res = 3usize.pow(levels) * c;
            let g = carpet_raster(levels, res).unwrap();
            let expected = 8usize.pow(levels) * c * c;
            assert_eq!(g.unresolved_count(), expected);
            assert_eq!(residual_brute(levels, res), expected);
        }
        assert!(matches!(
            carpet_raster(2, 10),
            Err(GeneratorError::ResolutionNotMultiple { .. })
        ));
    }
}
