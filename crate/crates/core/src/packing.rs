//! Curve records, packings and the JSONL packing file format.
//!
//! A packing file starts with a header object `{metric, provenance, count}`
//! followed by one record per line with fields in the fixed order
//! `id, diameter, kind, <kind parameters>, parents, generation, outer`.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::geometry::{BoundingBox, Circle, MetricTag};

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    RoundCircle(Circle),
    /// Boundary of the axis-aligned square with lower-left `corner`.
    SquareBoundary { corner: Complex64, side: f64 },
    /// Boundary cells of a raster component, as cell centers.
    RasterBoundary { points: Vec<Complex64>, cell: f64 },
}

impl CurveKind {
    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::RoundCircle(_) => "circle",
            CurveKind::SquareBoundary { .. } => "square",
            CurveKind::RasterBoundary { .. } => "raster",
        }
    }

    /// Diameter implied by the geometry for the exact kinds.
    pub fn exact_diameter(&self) -> Option<f64> {
        match self {
            CurveKind::RoundCircle(c) => Some(2.0 * c.radius),
            CurveKind::SquareBoundary { side, .. } => Some(side * std::f64::consts::SQRT_2),
            CurveKind::RasterBoundary { .. } => None,
        }
    }

    pub fn bounds(&self) -> BoundingBox {
        let (lo, hi) = match self {
            CurveKind::RoundCircle(c) => (
                c.center - Complex64::new(c.radius, c.radius),
                c.center + Complex64::new(c.radius, c.radius),
            ),
            CurveKind::SquareBoundary { corner, side } => {
                (*corner, *corner + Complex64::new(*side, *side))
            }
            CurveKind::RasterBoundary { points, cell } => {
                let h = cell * 0.5;
                let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in points {
                    lo.re = lo.re.min(p.re - h);
                    lo.im = lo.im.min(p.im - h);
                    hi.re = hi.re.max(p.re + h);
                    hi.im = hi.im.max(p.im + h);
                }
                (lo, hi)
            }
        };
        BoundingBox {
            min: [lo.re, lo.im],
            max: [hi.re, hi.im],
        }
    }

    /// Euclidean distance from `p` to the curve itself.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match self {
            CurveKind::RoundCircle(c) => ((p - c.center).norm() - c.radius).abs(),
            CurveKind::SquareBoundary { corner, side } => {
                square_boundary_distance(p, *corner, *side)
            }
            CurveKind::RasterBoundary { points, .. } => points
                .iter()
                .map(|q| (p - q).norm())
                .fold(f64::INFINITY, f64::min),
        }
    }
}

pub(crate) fn square_boundary_distance(p: Complex64, corner: Complex64, side: f64) -> f64 {
    let (x0, y0) = (corner.re, corner.im);
    let (x1, y1) = (x0 + side, y0 + side);
    let inside = p.re >= x0 && p.re <= x1 && p.im >= y0 && p.im <= y1;
    if inside {
        (p.re - x0).min(x1 - p.re).min(p.im - y0).min(y1 - p.im)
    } else {
        let dx = (x0 - p.re).max(0.0).max(p.re - x1);
        let dy = (y0 - p.im).max(0.0).max(p.im - y1);
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub id: u64,
    pub diameter: f64,
    pub kind: CurveKind,
    pub generation: u32,
    /// Marks the outer curve `C_0` (bounding the unbounded region).
    pub outer: bool,
    /// Ids of the curves this one was constructed from (Apollonian parents).
    pub parents: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    pub metric: MetricTag,
    pub provenance: String,
    curves: Vec<CurveRecord>,
}

impl Packing {
    /// Sorts curves by descending diameter (ties by id). Panics on
    /// duplicate ids or more than one outer curve, which are generator bugs.
    pub fn new(metric: MetricTag, provenance: impl Into<String>, mut curves: Vec<CurveRecord>) -> Self {
        sort_curves(&mut curves);
        let mut seen = HashSet::with_capacity(curves.len());
        assert!(curves.iter().all(|c| seen.insert(c.id)), "duplicate curve id");
        assert!(curves.iter().filter(|c| c.outer).count() <= 1, "more than one outer curve");
        Self {
            metric,
            provenance: provenance.into(),
            curves,
        }
    }

    pub fn curves(&self) -> &[CurveRecord] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn outer(&self) -> Option<&CurveRecord> {
        self.curves.iter().find(|c| c.outer)
    }

    pub fn index_by_id(&self) -> HashMap<u64, usize> {
        self.curves.iter().enumerate().map(|(i, c)| (c.id, i)).collect()
    }

    pub fn diameters(&self) -> impl Iterator<Item = f64> + '_ {
        self.curves.iter().map(|c| c.diameter)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = Header {
            metric: self.metric,
            provenance: self.provenance.clone(),
            count: self.curves.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for c in &self.curves {
            serde_json::to_writer(&mut out, &RecordLine::from(c))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, FormatError> {
        let mut lines = input.lines().enumerate();
        let (_, first) = lines.next().ok_or(FormatError::Line {
            line: 1,
            message: "missing header".into(),
        })?;
        let header: Header = serde_json::from_str(&first?).map_err(|e| FormatError::Line {
            line: 1,
            message: format!("bad header: {e}"),
        })?;
        let mut curves = Vec::with_capacity(header.count);
        let mut ids = HashSet::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = i + 1;
            let rec: RecordLine = serde_json::from_str(&line).map_err(|e| FormatError::Line {
                line: lineno,
                message: e.to_string(),
            })?;
            let rec = rec.into_record().map_err(|message| FormatError::Line { line: lineno, message })?;
            if !ids.insert(rec.id) {
                return Err(FormatError::Line {
                    line: lineno,
                    message: format!("duplicate id {}", rec.id),
                });
            }
            curves.push(rec);
        }
        if curves.len() != header.count {
            return Err(FormatError::Line {
                line: 1,
                message: format!("header count {} but {} records", header.count, curves.len()),
            });
        }
        if curves.iter().filter(|c| c.outer).count() > 1 {
            return Err(FormatError::Line {
                line: 1,
                message: "more than one outer curve".into(),
            });
        }
        Ok(Self::new(header.metric, header.provenance, curves))
    }
}

pub(crate) fn sort_curves(curves: &mut [CurveRecord]) {
    curves.sort_by(|a, b| b.diameter.total_cmp(&a.diameter).then(a.id.cmp(&b.id)));
}

#[derive(Serialize, Deserialize)]
struct Header {
    metric: MetricTag,
    provenance: String,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    id: u64,
    diameter: f64,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    corner: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    side: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    parents: Vec<u64>,
    generation: u32,
    outer: bool,
}

impl From<&CurveRecord> for RecordLine {
    fn from(c: &CurveRecord) -> Self {
        let mut line = RecordLine {
            id: c.id,
            diameter: c.diameter,
            kind: c.kind.name().to_string(),
            center: None,
            curvature: None,
            corner: None,
            side: None,
            cell: None,
            points: None,
            parents: c.parents.clone(),
            generation: c.generation,
            outer: c.outer,
        };
        match &c.kind {
            CurveKind::RoundCircle(circle) => {
                line.center = Some([circle.center.re, circle.center.im]);
                line.curvature = Some(circle.signed_curvature);
            }
            CurveKind::SquareBoundary { corner, side } => {
                line.corner = Some([corner.re, corner.im]);
                line.side = Some(*side);
            }
            CurveKind::RasterBoundary { points, cell } => {
                line.cell = Some(*cell);
                line.points = Some(points.iter().map(|p| [p.re, p.im]).collect());
            }
        }
        line
    }
}

impl RecordLine {
    fn into_record(self) -> Result<CurveRecord, String> {
        let missing = |f: &str| format!("{} record missing field '{f}'", self.kind);
        let kind = match self.kind.as_str() {
            "circle" => {
                let c = self.center.ok_or_else(|| missing("center"))?;
                let k = self.curvature.ok_or_else(|| missing("curvature"))?;
                if k == 0.0 || !k.is_finite() {
                    return Err("circle curvature must be finite and nonzero".into());
                }
                CurveKind::RoundCircle(Circle::from_curvature(Complex64::new(c[0], c[1]), k))
            }
            "square" => {
                let c = self.corner.ok_or_else(|| missing("corner"))?;
                let side = self.side.ok_or_else(|| missing("side"))?;
                CurveKind::SquareBoundary {
                    corner: Complex64::new(c[0], c[1]),
                    side,
                }
            }
            "raster" => {
                let pts = self.points.as_ref().ok_or_else(|| missing("points"))?;
                CurveKind::RasterBoundary {
                    points: pts.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
                    cell: self.cell.ok_or_else(|| missing("cell"))?,
                }
            }
            other => return Err(format!("unknown kind '{other}'")),
        };
        if !(self.diameter > 0.0) || !self.diameter.is_finite() {
            return Err(format!("diameter must be positive, got {}", self.diameter));
        }
        Ok(CurveRecord {
            id: self.id,
            diameter: self.diameter,
            kind,
            generation: self.generation,
            outer: self.outer,
            parents: self.parents,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Packing {
        let curves = vec![
            CurveRecord {
                id: 3,
                diameter: 0.5,
                kind: CurveKind::RoundCircle(Circle::from_curvature(Complex64::new(0.1, 0.2), 4.0)),
                generation: 1,
                outer: false,
                parents: vec![0, 1, 2],
            },
            CurveRecord {
                id: 0,
                diameter: std::f64::consts::SQRT_2,
                kind: CurveKind::SquareBoundary {
                    corner: Complex64::new(0.0, 0.0),
                    side: 1.0,
                },
                generation: 0,
                outer: true,
                parents: vec![],
            },
            CurveRecord {
                id: 7,
                diameter: 0.1,
                kind: CurveKind::RasterBoundary {
                    points: vec![Complex64::new(0.0, 0.0), Complex64::new(0.1, 0.0)],
                    cell: 0.01,
                },
                generation: 0,
                outer: false,
                parents: vec![],
            },
        ];
        Packing::new(MetricTag::Euclidean, "unit test", curves)
    }

    #[test]
    fn sorted_descending_with_outer_first() {
        let p = sample();
        let ids: Vec<u64> = p.curves().iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![0, 3, 7]);
        assert_eq!(p.outer().unwrap().id, 0);
    }

    #[test]
    fn jsonl_round_trip_and_field_order() {
        let p = sample();
        let mut buf = Vec::new();
        p.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            r#"{"metric":"euclidean","provenance":"unit test","count":3}"#
        );
        assert!(lines[1].starts_with(r#"{"id":0,"diameter":1.4142135623730951,"kind":"square","corner":[0.0,0.0],"side":1.0,"generation":0,"outer":true}"#));
        assert!(lines[2].contains(r#""parents":[0,1,2],"generation":1"#));
        let back = Packing::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let text = "{\"metric\":\"euclidean\",\"provenance\":\"x\",\"count\":2}\n{\"id\":1,\"diameter\":1.0,\"kind\":\"square\",\"corner\":[0,0],\"side\":1,\"generation\":0,\"outer\":false}\n{\"id\":2,\"diameter\":1.0,\"kind\":\"blob\",\"generation\":0,\"outer\":false}\n";
        match Packing::read_jsonl(text.as_bytes()) {
            Err(FormatError::Line { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "{\"metric\":\"euclidean\",\"provenance\":\"x\",\"count\":5}\n";
        assert!(matches!(
            Packing::read_jsonl(text.as_bytes()),
            Err(FormatError::Line { line: 1, .. })
        ));
    }

    #[test]
    fn boundary_distances() {
        let sq = CurveKind::SquareBoundary {
            corner: Complex64::new(0.0, 0.0),
            side: 1.0,
        };
        assert!((sq.distance_to(Complex64::new(0.5, 0.5)) - 0.5).abs() < 1e-15);
        assert!((sq.distance_to(Complex64::new(2.0, 2.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sq.distance_to(Complex64::new(1.0, 0.3)), 0.0);
        let c = CurveKind::RoundCircle(Circle::new(Complex64::new(0.0, 0.0), 1.0));
        assert!((c.distance_to(Complex64::new(0.25, 0.0)) - 0.75).abs() < 1e-15);
    }
}
