//! Regions bounded by packing curves, with exact or cell-exact areas of
//! their intersections with disks.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::components::ComponentMap;
use crate::error::HomogeneityError;
use crate::packing::{CurveKind, CurveRecord};

/// A raster region as a mask over its bounding cell range.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterRegion {
    /// Lower-left corner of mask cell `(0, 0)`.
    pub origin: Complex64,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
    pub cells: Vec<(usize, usize)>,
}

impl RasterRegion {
    pub fn from_cells(origin: Complex64, cell: f64, cells: &[(usize, usize)]) -> Self {
        let i0 = cells.iter().map(|c| c.0).min().unwrap_or(0);
        let j0 = cells.iter().map(|c| c.1).min().unwrap_or(0);
        let i1 = cells.iter().map(|c| c.0).max().unwrap_or(0);
        let j1 = cells.iter().map(|c| c.1).max().unwrap_or(0);
        let (width, height) = (i1 - i0 + 1, j1 - j0 + 1);
        let mut mask = vec![false; width * height];
        let local: Vec<(usize, usize)> = cells.iter().map(|&(i, j)| (i - i0, j - j0)).collect();
        for &(i, j) in &local {
            mask[j * width + i] = true;
        }
        Self {
            origin: origin + Complex64::new(i0 as f64 * cell, j0 as f64 * cell),
            cell,
            width,
            height,
            mask,
            cells: local,
        }
    }

    pub fn center_of(&self, i: usize, j: usize) -> Complex64 {
        self.origin + Complex64::new((i as f64 + 0.5) * self.cell, (j as f64 + 0.5) * self.cell)
    }

    fn contains_cell(&self, i: isize, j: isize) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.width && (j as usize) < self.height && self.mask[j as usize * self.width + i as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disk { center: Complex64, radius: f64 },
    Rect { min: Complex64, max: Complex64 },
    Raster(RasterRegion),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiBall {
    pub center: [f64; 2],
    pub inner: f64,
    pub outer: f64,
    pub ratio: f64,
}

impl Shape {
    /// Region bounded by an exact curve; `None` for raster curves, whose
    /// region must come from the component map.
    pub fn from_curve(c: &CurveRecord) -> Option<Self> {
        match &c.kind {
            CurveKind::RoundCircle(circle) => Some(Shape::Disk {
                center: circle.center,
                radius: circle.radius,
            }),
            CurveKind::SquareBoundary { corner, side } => Some(Shape::Rect {
                min: *corner,
                max: *corner + Complex64::new(*side, *side),
            }),
            CurveKind::RasterBoundary { .. } => None,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Shape::Rect { min, max } => (max.re - min.re) * (max.im - min.im),
            Shape::Raster(r) => r.cells.len() as f64 * r.cell * r.cell,
        }
    }

    /// Largest distance from `p` to a point of the closed region.
    pub fn max_distance(&self, p: Complex64) -> f64 {
        match self {
            Shape::Disk { center, radius } => (p - center).norm() + radius,
            Shape::Rect { min, max } => {
                let dx = (p.re - min.re).abs().max((max.re - p.re).abs());
                let dy = (p.im - min.im).abs().max((max.im - p.im).abs());
                dx.hypot(dy)
            }
            Shape::Raster(r) => {
                let h = r.cell * 0.5;
                r.cells
                    .iter()
                    .map(|&(i, j)| {
                        let c = r.center_of(i, j);
                        ((c.re - p.re).abs() + h).hypot((c.im - p.im).abs() + h)
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Area of the region inside the disk `B(p, r)`.
    pub fn area_in_disk(&self, p: Complex64, r: f64) -> f64 {
        match self {
            Shape::Disk { center, radius } => lens_area(*radius, r, (p - center).norm()),
            Shape::Rect { min, max } => rect_disk_area(min.re - p.re, max.re - p.re, min.im - p.im, max.im - p.im, r),
            Shape::Raster(reg) => {
                let h = reg.cell;
                let lo = (p - Complex64::new(r, r) - reg.origin) / h;
                let hi = (p + Complex64::new(r, r) - reg.origin) / h;
                let i0 = lo.re.floor().max(0.0) as usize;
                let j0 = lo.im.floor().max(0.0) as usize;
                let i1 = (hi.re.floor() as isize).min(reg.width as isize - 1);
                let j1 = (hi.im.floor() as isize).min(reg.height as isize - 1);
                if i1 < 0 || j1 < 0 {
                    return 0.0;
                }
                let mut total = 0.0;
                for j in j0..=j1 as usize {
                    for i in i0..=i1 as usize {
                        if reg.mask[j * reg.width + i] {
                            let x0 = reg.origin.re + i as f64 * h - p.re;
                            let y0 = reg.origin.im + j as f64 * h - p.im;
                            total += rect_disk_area(x0, x0 + h, y0, y0 + h, r);
                        }
                    }
                }
                total
            }
        }
    }
}

/// Area of the intersection of disks of radii `a`, `b` at center distance `d`.
pub fn lens_area(a: f64, b: f64, d: f64) -> f64 {
    use std::f64::consts::PI;
    if d >= a + b {
        return 0.0;
    }
    if d <= (a - b).abs() {
        let m = a.min(b);
        return PI * m * m;
    }
    let alpha = ((d * d + a * a - b * b) / (2.0 * d * a)).clamp(-1.0, 1.0).acos();
    let beta = ((d * d + b * b - a * a) / (2.0 * d * b)).clamp(-1.0, 1.0).acos();
    a * a * (alpha - alpha.sin() * alpha.cos()) + b * b * (beta - beta.sin() * beta.cos())
}

/// Antiderivative in `x` of the disk's chord length above height `h`.
fn chord_integral(x: f64, h: f64, r: f64) -> f64 {
    let t = (x / r).clamp(-1.0, 1.0);
    0.5 * ((1.0 - t * t).max(0.0).sqrt() * x * r + r * r * t.asin() - 2.0 * h * x)
}

/// Area of `{x0 <= x <= x1, y >= h} ∩ B(0, r)` for `h >= 0`.
fn area_above(x0: f64, x1: f64, h: f64, r: f64) -> f64 {
    if h >= r {
        return 0.0;
    }
    let s = (r * r - h * h).sqrt();
    let a = x0.clamp(-s, s);
    let b = x1.clamp(-s, s);
    chord_integral(b, h, r) - chord_integral(a, h, r)
}

/// Area of the rectangle `[x0, x1] × [y0, y1]` inside `B(0, r)`.
pub fn rect_disk_area(x0: f64, x1: f64, y0: f64, y1: f64, r: f64) -> f64 {
    if r <= 0.0 || x1 <= x0 || y1 <= y0 {
        return 0.0;
    }
    if y0 < 0.0 {
        if y1 <= 0.0 {
            return rect_disk_area(x0, x1, -y1, -y0, r);
        }
        return rect_disk_area(x0, x1, 0.0, -y0, r) + rect_disk_area(x0, x1, 0.0, y1, r);
    }
    (area_above(x0, x1, y0, r) - area_above(x0, x1, y1, r)).max(0.0)
}

/// Exact squared Euclidean distance transform (Felzenszwalb–Huttenlocher)
/// of a 1-D sampled function, in place.
fn edt_1d(f: &mut [f64]) {
    let n = f.len();
    let Some(first) = f.iter().position(|v| v.is_finite()) else { return };
    let mut v = vec![first; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let meet = |q: usize, p: usize, f: &[f64]| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    for q in first + 1..n {
        if f[q].is_infinite() {
            continue;
        }
        let mut s = meet(q, v[k], f);
        while s <= z[k] {
            k -= 1;
            s = meet(q, v[k], f);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    let mut d = vec![0.0f64; n];
    let mut k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *out = (q as f64 - p as f64).powi(2) + f[p];
    }
    f.copy_from_slice(&d);
}

/// Squared distance, in cells, from each mask cell center to the nearest
/// cell center outside the region (a one-cell margin counts as outside).
fn distance_transform(reg: &RasterRegion) -> (usize, usize, Vec<f64>) {
    let (w, h) = (reg.width + 2, reg.height + 2);
    let mut g = vec![0.0f64; w * h];
    for j in 0..reg.height {
        for i in 0..reg.width {
            if reg.mask[j * reg.width + i] {
                g[(j + 1) * w + i + 1] = f64::INFINITY;
            }
        }
    }
    let mut col = vec![0.0; h];
    for i in 0..w {
        for j in 0..h {
            col[j] = g[j * w + i];
        }
        edt_1d(&mut col);
        for j in 0..h {
            g[j * w + i] = col[j];
        }
    }
    for row in g.chunks_mut(w) {
        edt_1d(row);
    }
    (w, h, g)
}

/// Concentric inscribed and circumscribed circles about the point farthest
/// from the boundary.
pub fn quasi_ball_stats(shape: &Shape) -> Result<QuasiBall, HomogeneityError> {
    let (center, inner) = match shape {
        Shape::Disk { center, radius } if *radius > 0.0 => (*center, *radius),
        Shape::Rect { min, max } if max.re > min.re && max.im > min.im => {
            ((min + max) * 0.5, 0.5 * (max.re - min.re).min(max.im - min.im))
        }
        Shape::Raster(reg) => {
            let interior = reg.cells.iter().any(|&(i, j)| {
                let (i, j) = (i as isize, j as isize);
                [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .all(|(di, dj)| reg.contains_cell(i + di, j + dj))
            });
            if !interior {
                return Err(HomogeneityError::DegenerateComponent);
            }
            let (w, _, g) = distance_transform(reg);
            // ties go to the first cell in row-major order
            let (mut best, mut at) = (-1.0, (0, 0));
            for &(i, j) in &reg.cells {
                let v = g[(j + 1) * w + i + 1];
                if v > best || (v == best && (j, i) < (at.1, at.0)) {
                    best = v;
                    at = (i, j);
                }
            }
            // the nearest outside centre is half a cell beyond the boundary
            (reg.center_of(at.0, at.1), (best.sqrt() - 0.5) * reg.cell)
        }
        _ => return Err(HomogeneityError::DegenerateComponent),
    };
    let outer = shape.max_distance(center).max(inner);
    Ok(QuasiBall {
        center: [center.re, center.im],
        inner,
        outer,
        ratio: outer / inner,
    })
}

/// Regions of every component of a component map, indexed by component id.
pub fn component_regions(map: &ComponentMap) -> Vec<RasterRegion> {
    let mut cells: Vec<Vec<(usize, usize)>> = vec![Vec::new(); map.len()];
    for j in 0..map.height {
        for i in 0..map.width {
            if let Some(c) = map.component_at(i, j) {
                cells[c as usize].push((i, j));
            }
        }
    }
    let origin = Complex64::new(map.bbox.min[0], map.bbox.min[1]);
    cells
        .iter()
        .map(|c| RasterRegion::from_cells(origin, map.cell, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn quasi_ball_examples() {
        let disk = Shape::Disk {
            center: Complex64::new(3.0, -1.0),
            radius: 0.7,
        };
        assert_eq!(quasi_ball_stats(&disk).unwrap().ratio, 1.0);
        let sq = Shape::Rect {
            min: Complex64::new(0.0, 0.0),
            max: Complex64::new(2.0, 2.0),
        };
        let q = quasi_ball_stats(&sq).unwrap();
        assert_eq!(q.inner, 1.0);
        assert!((q.ratio - 2f64.sqrt()).abs() < 1e-15);
        let rect = Shape::Rect {
            min: Complex64::new(0.0, 0.0),
            max: Complex64::new(3.0, 1.0),
        };
        let q = quasi_ball_stats(&rect).unwrap();
        assert_eq!(q.inner, 0.5);
        assert!((q.outer - (1.5f64.powi(2) + 0.25).sqrt()).abs() < 1e-15);
        assert!((q.ratio - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn raster_square_approaches_exact_ratio() {
        let n = 41;
        let cells: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
        let reg = RasterRegion::from_cells(Complex64::new(0.0, 0.0), 1.0 / n as f64, &cells);
        let q = quasi_ball_stats(&Shape::Raster(reg)).unwrap();
        assert!((q.inner - 0.5).abs() < 1.0 / n as f64);
        assert!((q.ratio - 2f64.sqrt()).abs() < 0.05);
        // a one-cell-thick line has no interior
        let line: Vec<(usize, usize)> = (0..10).map(|i| (i, 0)).collect();
        let reg = RasterRegion::from_cells(Complex64::new(0.0, 0.0), 1.0, &line);
        assert_eq!(quasi_ball_stats(&Shape::Raster(reg)), Err(HomogeneityError::DegenerateComponent));
    }

    #[test]
    fn raster_ratio_invariant_under_translation() {
        let cells: Vec<(usize, usize)> = (0..8).flat_map(|j| (0..20).map(move |i| (i + 3, j + 5))).collect();
        let shifted: Vec<(usize, usize)> = cells.iter().map(|&(i, j)| (i + 11, j + 2)).collect();
        let a = quasi_ball_stats(&Shape::Raster(RasterRegion::from_cells(Complex64::new(0.0, 0.0), 0.1, &cells))).unwrap();
        let b = quasi_ball_stats(&Shape::Raster(RasterRegion::from_cells(Complex64::new(-5.0, 2.0), 0.1, &shifted))).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    fn edt_brute(mask: &[bool], w: usize, h: usize) -> Vec<f64> {
        let mut out = vec![0.0; w * h];
        for j in 0..h {
            for i in 0..w {
                if !mask[j * w + i] {
                    continue;
                }
                let mut best = f64::INFINITY;
                for jj in 0..h {
                    for ii in 0..w {
                        if !mask[jj * w + ii] {
                            best = best.min(((i as f64 - ii as f64).powi(2)) + (j as f64 - jj as f64).powi(2));
                        }
                    }
                }
                out[j * w + i] = best;
            }
        }
        out
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (w, h) = (rng.gen_range(1..12), rng.gen_range(1..12));
            let cells: Vec<(usize, usize)> = (0..h)
                .flat_map(|j| (0..w).map(move |i| (i, j)))
                .filter(|_| rng.gen_bool(0.7))
                .collect();
            if cells.is_empty() {
                continue;
            }
            let reg = RasterRegion::from_cells(Complex64::new(0.0, 0.0), 1.0, &cells);
            let (pw, ph, g) = distance_transform(&reg);
            let mut padded = vec![false; pw * ph];
            for &(i, j) in &reg.cells {
                padded[(j + 1) * pw + i + 1] = true;
            }
            assert_eq!(g, edt_brute(&padded, pw, ph));
        }
    }

    #[test]
    fn lens_and_segment_areas() {
        // ball centred on the boundary of a unit disk, radius equal to the disk's
        let a = lens_area(1.0, 1.0, 1.0);
        assert!((a - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
        for k in 1..=20 {
            let r = k as f64 / 20.0;
            assert!(lens_area(1.0, r, 1.0) / (r * r) >= 1.0);
        }
        assert_eq!(lens_area(1.0, 0.5, 3.0), 0.0);
        assert!((lens_area(2.0, 0.5, 0.1) - PI * 0.25).abs() < 1e-15);
    }

    #[test]
    fn rect_disk_area_matches_monte_carlo_and_limits() {
        let r = 1.3;
        assert!((rect_disk_area(-2.0, 2.0, -2.0, 2.0, r) - PI * r * r).abs() < 1e-12);
        assert!((rect_disk_area(0.0, 2.0, 0.0, 2.0, r) - PI * r * r / 4.0).abs() < 1e-12);
        assert!((rect_disk_area(-0.1, 0.1, -0.2, 0.2, r) - 0.08).abs() < 1e-15);
        assert_eq!(rect_disk_area(2.0, 3.0, 2.0, 3.0, r), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x0: f64 = rng.gen_range(-1.5..1.0);
            let y0: f64 = rng.gen_range(-1.5..1.0);
            let (x1, y1) = (x0 + rng.gen_range(0.1..1.5), y0 + rng.gen_range(0.1..1.5));
            let n = 200_000;
            let hits = (0..n)
                .filter(|_| {
                    let (x, y) = (rng.gen_range(x0..x1), rng.gen_range(y0..y1));
                    x * x + y * y <= r * r
                })
                .count();
            let mc = hits as f64 / n as f64 * (x1 - x0) * (y1 - y0);
            let exact = rect_disk_area(x0, x1, y0, y1, r);
            assert!((mc - exact).abs() < 0.01, "{mc} vs {exact}");
        }
    }

    #[test]
    fn raster_area_sums_cells() {
        let cells: Vec<(usize, usize)> = (0..10).flat_map(|j| (0..10).map(move |i| (i, j))).collect();
        let reg = Shape::Raster(RasterRegion::from_cells(Complex64::new(0.0, 0.0), 0.1, &cells));
        let sq = Shape::Rect {
            min: Complex64::new(0.0, 0.0),
            max: Complex64::new(1.0, 1.0),
        };
        for (p, r) in [(Complex64::new(0.0, 0.0), 0.7), (Complex64::new(0.5, 0.2), 0.33), (Complex64::new(1.3, 0.5), 0.5)] {
            assert!((reg.area_in_disk(p, r) - sq.area_in_disk(p, r)).abs() < 1e-12);
        }
    }
}
