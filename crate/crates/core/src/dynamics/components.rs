//! Connected components of a labelled grid and their boundary curves.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{CellLabel, Grid};
use crate::geometry::{diameter, euclidean_diameter, BoundingBox, ExtendedComplex, MetricTag};
use crate::packing::{CurveKind, CurveRecord, Packing};

pub const DEFAULT_MIN_CELLS: usize = 4;
const NO_COMPONENT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: u32,
    pub attractor: u32,
    pub cell_count: usize,
    /// Cell indices `j * width + i` of boundary cells, ascending.
    pub boundary: Vec<usize>,
    pub touches_border: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMap {
    pub bbox: BoundingBox,
    pub width: usize,
    pub height: usize,
    pub cell: f64,
    cell_component: Vec<u32>,
    pub components: Vec<Component>,
}

impl ComponentMap {
    pub fn component_at(&self, i: usize, j: usize) -> Option<u32> {
        let c = self.cell_component[j * self.width + i];
        (c != NO_COMPONENT).then_some(c)
    }

    pub fn cell_center(&self, index: usize) -> Complex64 {
        let (i, j) = (index % self.width, index / self.width);
        Complex64::new(
            self.bbox.min[0] + (i as f64 + 0.5) * self.cell,
            self.bbox.min[1] + (j as f64 + 0.5) * self.cell,
        )
    }

    pub fn unresolved_count(&self) -> usize {
        self.cell_component.iter().filter(|&&c| c == NO_COMPONENT).count()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The largest component touching the grid border.
    pub fn outer(&self) -> Option<u32> {
        self.components.iter().find(|c| c.touches_border).map(|c| c.id)
    }
}

/// 4-connected flood fill over cells sharing an attractor. Components are
/// numbered by descending cell count, ties broken by first cell in
/// row-major order.
pub fn label_components(grid: &Grid) -> ComponentMap {
    let (w, h) = (grid.width, grid.height);
    let mut comp = vec![NO_COMPONENT; w * h];
    struct Raw {
        attractor: u32,
        cells: usize,
        first: usize,
        boundary: Vec<usize>,
        border: bool,
    }
    let mut raw: Vec<Raw> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        let Some(a) = grid.labels[start].attractor() else { continue };
        if comp[start] != NO_COMPONENT {
            continue;
        }
        let id = raw.len() as u32;
        let mut r = Raw {
            attractor: a,
            cells: 0,
            first: start,
            boundary: Vec::new(),
            border: false,
        };
        comp[start] = id;
        stack.push(start);
        while let Some(k) = stack.pop() {
            r.cells += 1;
            let (i, j) = (k % w, k / w);
            let mut on_boundary = false;
            let neighbours = [
                (i > 0).then(|| k - 1),
                (i + 1 < w).then(|| k + 1),
                (j > 0).then(|| k - w),
                (j + 1 < h).then(|| k + w),
            ];
            for n in neighbours {
                match n {
                    None => {
                        on_boundary = true;
                        r.border = true;
                    }
                    Some(n) => match grid.labels[n] {
                        CellLabel::Unresolved => on_boundary = true,
                        CellLabel::Basin { attractor, .. } if attractor == a => {
                            if comp[n] == NO_COMPONENT {
                                comp[n] = id;
                                stack.push(n);
                            }
                        }
                        CellLabel::Basin { .. } => {}
                    },
                }
            }
            if on_boundary {
                r.boundary.push(k);
            }
        }
        r.boundary.sort_unstable();
        raw.push(r);
    }
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&x, &y| raw[y].cells.cmp(&raw[x].cells).then(raw[x].first.cmp(&raw[y].first)));
    let mut rename = vec![0u32; raw.len()];
    for (new, &old) in order.iter().enumerate() {
        rename[old] = new as u32;
    }
    for c in comp.iter_mut().filter(|c| **c != NO_COMPONENT) {
        *c = rename[*c as usize];
    }
    let mut slots: Vec<Option<Raw>> = raw.into_iter().map(Some).collect();
    let components = order
        .iter()
        .enumerate()
        .map(|(new, &old)| {
            let r = slots[old].take().expect("each component renamed once");
            Component {
                id: new as u32,
                attractor: r.attractor,
                cell_count: r.cells,
                boundary: r.boundary,
                touches_border: r.border,
            }
        })
        .collect();
    ComponentMap {
        bbox: grid.bbox,
        width: w,
        height: h,
        cell: grid.cell,
        cell_component: comp,
        components,
    }
}

/// Midpoints of the cell edges separating component `id` from in-grid
/// cells outside it. They lie on the polygonal boundary of the component's
/// cell union; edges on the grid border are not part of any curve.
fn edge_points(map: &ComponentMap, id: u32, boundary: &[usize]) -> Vec<Complex64> {
    let (w, h, half) = (map.width, map.height, 0.5 * map.cell);
    let mut out = Vec::with_capacity(boundary.len());
    for &k in boundary {
        let (i, j) = (k % w, k / w);
        let c = map.cell_center(k);
        let sides = [
            (i > 0).then(|| (k - 1, Complex64::new(-half, 0.0))),
            (i + 1 < w).then(|| (k + 1, Complex64::new(half, 0.0))),
            (j > 0).then(|| (k - w, Complex64::new(0.0, -half))),
            (j + 1 < h).then(|| (k + w, Complex64::new(0.0, half))),
        ];
        for (n, offset) in sides.into_iter().flatten() {
            if map.cell_component[n] != id {
                out.push(c + offset);
            }
        }
    }
    out
}

/// One curve per component with at least `min_cells` cells, traced by
/// [`edge_points`]. The largest component touching the grid border is
/// marked as the outer curve.
pub fn extract_packing(map: &ComponentMap, metric: MetricTag, min_cells: usize) -> Packing {
    let outer = map.outer();
    let curves: Vec<CurveRecord> = map
        .components
        .par_iter()
        .filter(|c| c.cell_count >= min_cells)
        .filter_map(|c| {
            let points = edge_points(map, c.id, &c.boundary);
            if points.is_empty() {
                return None;
            }
            let d = match metric {
                MetricTag::Euclidean => euclidean_diameter(&points),
                MetricTag::Spherical => {
                    let ext: Vec<ExtendedComplex> = points.iter().map(|&p| ExtendedComplex::Finite(p)).collect();
                    diameter(&ext, metric).expect("nonempty finite point set")
                }
            };
            Some(CurveRecord {
                id: c.id as u64,
                diameter: d,
                kind: CurveKind::RasterBoundary { points, cell: map.cell },
                generation: 0,
                outer: Some(c.id) == outer,
                parents: Vec::new(),
            })
        })
        .collect();
    Packing::new(metric, format!("raster {}x{} cell={}", map.width, map.height, map.cell), curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_from(rows: &[&str]) -> Grid {
        // rows listed top to bottom; '.' is unresolved, digits are attractors
        let h = rows.len();
        let w = rows[0].len();
        let mut labels = vec![CellLabel::Unresolved; w * h];
        for (r, line) in rows.iter().enumerate() {
            let j = h - 1 - r;
            for (i, ch) in line.chars().enumerate() {
                if let Some(a) = ch.to_digit(10) {
                    labels[j * w + i] = CellLabel::Basin { attractor: a, iters: 0 };
                }
            }
        }
        Grid::from_labels(BoundingBox::new(0.0, 0.0, w as f64, h as f64).unwrap(), w, h, labels)
    }

    #[test]
    fn flood_fill_and_boundaries() {
        let g = grid_from(&["00.11", "00.11", ".....", "1.0.0", "1.000"]);
        let m = label_components(&g);
        let counts: Vec<usize> = m.components.iter().map(|c| c.cell_count).collect();
        assert_eq!(counts, vec![5, 4, 4, 2]);
        assert_eq!(counts.iter().sum::<usize>() + m.unresolved_count(), 25);
        // diagonal contact does not connect
        let g2 = grid_from(&["0.", ".0"]);
        assert_eq!(label_components(&g2).len(), 2);
        // different attractors side by side stay separate
        let g3 = grid_from(&["01"]);
        let m3 = label_components(&g3);
        assert_eq!(m3.len(), 2);
        assert!(m3.components.iter().all(|c| c.touches_border));
    }

    #[test]
    fn interior_cells_are_not_boundary() {
        let g = grid_from(&[".....", ".000.", ".000.", ".000.", "....."]);
        let m = label_components(&g);
        assert_eq!(m.len(), 1);
        assert_eq!(m.components[0].boundary.len(), 8);
        assert!(!m.components[0].touches_border);
        let p = extract_packing(&m, MetricTag::Euclidean, 1);
        assert_eq!(p.len(), 1);
        // edge midpoints of the block [1, 4]^2, e.g. (1, 1.5) to (4, 3.5)
        assert!((p.curves()[0].diameter - 13f64.sqrt()).abs() < 1e-12);
        assert!(extract_packing(&m, MetricTag::Euclidean, 10).is_empty());
    }

    #[test]
    fn empty_inputs() {
        let g = grid_from(&["....", "...."]);
        let m = label_components(&g);
        assert!(m.is_empty());
        assert!(extract_packing(&m, MetricTag::Euclidean, DEFAULT_MIN_CELLS).is_empty());
    }
}
