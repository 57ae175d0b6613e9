//! Curves bucketed by diameter octave, each octave on a uniform grid
//! whose spacing is the octave's largest diameter, so a curve's bounding
//! box touches only a few grid cells.

use std::collections::HashMap;

use crate::geometry::BoundingBox;
use crate::packing::Packing;

/// Beyond this many grid cells a query scans the whole band instead.
const MAX_QUERY_CELLS: i64 = 4096;

pub struct Band {
    pub octave: i32,
    spacing: f64,
    members: Vec<usize>,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

pub struct CurveIndex {
    /// Ascending by octave.
    pub bands: Vec<Band>,
    boxes: Vec<BoundingBox>,
}

fn octave(d: f64) -> i32 {
    d.log2().floor() as i32
}

impl CurveIndex {
    pub fn new(p: &Packing) -> Self {
        let boxes: Vec<BoundingBox> = p.curves().iter().map(|c| c.kind.bounds()).collect();
        let mut by_octave: HashMap<i32, Vec<usize>> = HashMap::new();
        for (k, c) in p.curves().iter().enumerate() {
            by_octave.entry(octave(c.diameter)).or_default().push(k);
        }
        let mut bands: Vec<Band> = by_octave
            .into_iter()
            .map(|(o, members)| {
                let spacing = 2f64.powi(o + 1);
                let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
                for &k in &members {
                    let b = &boxes[k];
                    let (i0, j0) = ((b.min[0] / spacing).floor() as i64, (b.min[1] / spacing).floor() as i64);
                    let (i1, j1) = ((b.max[0] / spacing).floor() as i64, (b.max[1] / spacing).floor() as i64);
                    for i in i0..=i1 {
                        for j in j0..=j1 {
                            cells.entry((i, j)).or_default().push(k);
                        }
                    }
                }
                Band {
                    octave: o,
                    spacing,
                    members,
                    cells,
                }
            })
            .collect();
        bands.sort_by_key(|b| b.octave);
        Self { bands, boxes }
    }

    pub fn bounds(&self, k: usize) -> &BoundingBox {
        &self.boxes[k]
    }

    /// Curves of `band` whose bounding box meets `[lo, hi]`, each once.
    pub fn query(&self, band: &Band, lo: [f64; 2], hi: [f64; 2], out: &mut Vec<usize>) {
        out.clear();
        let s = band.spacing;
        let (i0, j0) = ((lo[0] / s).floor() as i64, (lo[1] / s).floor() as i64);
        let (i1, j1) = ((hi[0] / s).floor() as i64, (hi[1] / s).floor() as i64);
        let meets = |k: usize| {
            let b = &self.boxes[k];
            b.min[0] <= hi[0] && b.max[0] >= lo[0] && b.min[1] <= hi[1] && b.max[1] >= lo[1]
        };
        if (i1 - i0 + 1).saturating_mul(j1 - j0 + 1) > MAX_QUERY_CELLS {
            out.extend(band.members.iter().copied().filter(|&k| meets(k)));
            return;
        }
        for i in i0..=i1 {
            for j in j0..=j1 {
                if let Some(v) = band.cells.get(&(i, j)) {
                    out.extend(v.iter().copied().filter(|&k| meets(k)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}
