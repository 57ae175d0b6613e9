//! Metrics on the plane and the Riemann sphere, diameters, enclosing circles.
//!
//! The spherical metric is the chordal metric of the unit sphere under
//! stereographic projection, so distances lie in `[0, 2]`.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Point sets at or below this size use the all-pairs diameter.
pub const BRUTE_FORCE_DIAMETER_LIMIT: usize = 64;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl PartialEq for ExtendedComplex {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => true,
            (Self::Finite(a), Self::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl ExtendedComplex {
    /// Wraps a complex value; anything non-finite becomes the point at infinity.
    pub fn new(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Self::Finite(z)
        } else {
            Self::Infinity
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Self {
        Self::new(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }

    /// `1/z` on the sphere, with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        match *self {
            Self::Infinity => Self::Finite(Complex64::new(0.0, 0.0)),
            Self::Finite(z) if z.re == 0.0 && z.im == 0.0 => Self::Infinity,
            Self::Finite(z) => Self::new(z.inv()),
        }
    }

    /// The antipodal point `-1/conj(z)`.
    pub fn antipode(&self) -> Self {
        match *self {
            Self::Infinity => Self::Finite(Complex64::new(0.0, 0.0)),
            Self::Finite(z) if z.re == 0.0 && z.im == 0.0 => Self::Infinity,
            Self::Finite(z) => Self::new(-z.conj().inv()),
        }
    }

    /// Unit-sphere coordinates under inverse stereographic projection.
    pub fn to_sphere(&self) -> [f64; 3] {
        match *self {
            Self::Infinity => [0.0, 0.0, 1.0],
            Self::Finite(z) => {
                let n = z.norm_sqr();
                if n.is_infinite() {
                    return [0.0, 0.0, 1.0];
                }
                let d = 1.0 + n;
                [2.0 * z.re / d, 2.0 * z.im / d, (n - 1.0) / d]
            }
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        Self::new(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricTag {
    Euclidean,
    Spherical,
}

impl std::fmt::Display for MetricTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Euclidean => f.write_str("euclidean"),
            Self::Spherical => f.write_str("spherical"),
        }
    }
}

/// A circle with a signed curvature. Negative curvature marks a circle
/// whose complementary disk is the enclosed region (the outer circle of
/// an Apollonian packing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub signed_curvature: f64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self {
            center,
            signed_curvature: radius.recip(),
            radius,
        }
    }

    pub fn from_curvature(center: Complex64, curvature: f64) -> Self {
        Self {
            center,
            signed_curvature: curvature,
            radius: curvature.abs().recip(),
        }
    }

    pub fn contains(&self, p: Complex64, slack: f64) -> bool {
        (p - self.center).norm() <= self.radius + slack
    }
}

/// Axis-aligned box in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl BoundingBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        let ok = [x0, y0, x1, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1;
        if !ok {
            return Err(GeometryError::InvalidBox(format!(
                "[{x0}, {y0}] x [{x1}, {y1}]"
            )));
        }
        Ok(Self {
            min: [x0, y0],
            max: [x1, y1],
        })
    }

    pub fn square(center: Complex64, half_side: f64) -> Result<Self, GeometryError> {
        Self::new(
            center.re - half_side,
            center.im - half_side,
            center.re + half_side,
            center.im + half_side,
        )
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn contains(&self, p: Complex64) -> bool {
        p.re >= self.min[0] && p.re <= self.max[0] && p.im >= self.min[1] && p.im <= self.max[1]
    }
}

/// Chordal distance on the Riemann sphere.
pub fn spherical_distance(z: ExtendedComplex, w: ExtendedComplex) -> f64 {
    use ExtendedComplex::*;
    match (z, w) {
        (Infinity, Infinity) => 0.0,
        (Finite(a), Infinity) | (Infinity, Finite(a)) => {
            let n = a.norm();
            if n > 1.0 {
                // 2 / sqrt(1 + n^2) without overflow
                2.0 / (n * (1.0 + (1.0 / n).powi(2)).sqrt())
            } else {
                2.0 / (1.0 + n * n).sqrt()
            }
        }
        (Finite(a), Finite(b)) => chordal_finite(a, b),
    }
}

fn chordal_finite(a: Complex64, b: Complex64) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na > 1.0 && nb > 1.0 {
        // z -> 1/z is an isometry of the chordal metric
        return chordal_finite(a.inv(), b.inv());
    }
    if nb > 1.0 {
        let q = a / b;
        let denom = ((1.0 + na * na) * (1.0 + 1.0 / (nb * nb))).sqrt();
        return (2.0 * (q - 1.0).norm() / denom).min(2.0);
    }
    if na > 1.0 {
        return chordal_finite(b, a);
    }
    let denom = ((1.0 + na * na) * (1.0 + nb * nb)).sqrt();
    (2.0 * (a - b).norm() / denom).min(2.0)
}

pub fn euclidean_distance(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

/// Largest pairwise distance in the chosen metric. Empty sets are an
/// error; a single point has diameter zero.
pub fn diameter(points: &[ExtendedComplex], metric: MetricTag) -> Result<f64, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    match metric {
        MetricTag::Euclidean => {
            let finite: Option<Vec<Complex64>> = points.iter().map(|p| p.finite()).collect();
            let finite = finite.ok_or(GeometryError::EuclideanInfinity)?;
            Ok(euclidean_diameter(&finite))
        }
        MetricTag::Spherical => Ok(spherical_diameter(points)),
    }
}

pub fn euclidean_diameter(points: &[Complex64]) -> f64 {
    if points.len() <= BRUTE_FORCE_DIAMETER_LIMIT {
        return brute_force_diameter(points, euclidean_distance);
    }
    let hull = convex_hull(points);
    rotating_calipers_diameter(&hull)
}

fn brute_force_diameter<P: Copy, F: Fn(P, P) -> f64>(points: &[P], dist: F) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(dist(a, b));
        }
    }
    best
}

fn spherical_diameter(points: &[ExtendedComplex]) -> f64 {
    if points.len() <= BRUTE_FORCE_DIAMETER_LIMIT {
        return brute_force_diameter(points, spherical_distance);
    }
    // Search on the embedded sphere, then re-evaluate the winning pair with
    // the chordal formula.
    let emb: Vec<[f64; 3]> = points.iter().map(|p| p.to_sphere()).collect();
    let (i, j, _) = (0..emb.len())
        .into_par_iter()
        .map(|i| {
            let a = emb[i];
            let mut best = (i, i, 0.0f64);
            for (j, b) in emb.iter().enumerate().skip(i + 1) {
                let d = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
                if d > best.2 {
                    best = (i, j, d);
                }
            }
            best
        })
        .reduce(
            || (0, 0, 0.0),
            |x, y| {
                if y.2 > x.2 || (y.2 == x.2 && (y.0, y.1) < (x.0, x.1)) {
                    y
                } else {
                    x
                }
            },
        );
    spherical_distance(points[i], points[j])
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Convex hull by the monotone chain; counter-clockwise, no collinear points.
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Diameter of a convex polygon given counter-clockwise.
pub fn rotating_calipers_diameter(hull: &[Complex64]) -> f64 {
    let n = hull.len();
    match n {
        0 | 1 => return 0.0,
        2 => return euclidean_distance(hull[0], hull[1]),
        _ => {}
    }
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        while cross(a, b, hull[(j + 1) % n]).abs() > cross(a, b, hull[j]).abs() {
            j = (j + 1) % n;
        }
        best = best
            .max(euclidean_distance(a, hull[j]))
            .max(euclidean_distance(b, hull[j]));
    }
    best
}

/// Smallest circle containing every point (randomized incremental Welzl,
/// fixed shuffle seed). A single point yields a radius-0 circle whose
/// curvature is infinite; callers treat that as degenerate.
pub fn min_enclosing_circle(points: &[Complex64]) -> Result<Circle, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    pts.shuffle(&mut rng);

    let eps = 1e-12;
    let inside = |c: &(Complex64, f64), p: Complex64| (p - c.0).norm() <= c.1 * (1.0 + eps) + eps;

    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(&c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, pts[j]) {
                continue;
            }
            c = circle_two(pts[i], pts[j]);
            for k in 0..j {
                if inside(&c, pts[k]) {
                    continue;
                }
                c = circle_three(pts[i], pts[j], pts[k]);
            }
        }
    }
    Ok(Circle::new(c.0, c.1))
}

fn circle_two(a: Complex64, b: Complex64) -> (Complex64, f64) {
    let center = (a + b) * 0.5;
    (center, (a - center).norm())
}

/// Circumcircle; collinear triples fall back to the widest pair.
fn circle_three(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, f64) {
    let (bx, by) = (b.re - a.re, b.im - a.im);
    let (cx, cy) = (c.re - a.re, c.im - a.im);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        let cands = [circle_two(a, b), circle_two(a, c), circle_two(b, c)];
        return cands
            .into_iter()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Complex64::new(a.re + ux, a.im + uy);
    let r = [a, b, c]
        .iter()
        .map(|p| (p - center).norm())
        .fold(0.0, f64::max);
    (center, r)
}

/// Distance from tangency, minimized over external and internal contact.
pub fn tangency_residual(a: &Circle, b: &Circle) -> f64 {
    let d = (a.center - b.center).norm();
    let external = (d - (a.radius + b.radius)).abs();
    let internal = (d - (a.radius - b.radius).abs()).abs();
    external.min(internal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fin(re: f64, im: f64) -> ExtendedComplex {
        ExtendedComplex::Finite(c(re, im))
    }

    #[test]
    fn chordal_examples() {
        assert_eq!(spherical_distance(fin(0.0, 0.0), ExtendedComplex::Infinity), 2.0);
        assert_eq!(spherical_distance(fin(0.3, -2.0), fin(0.3, -2.0)), 0.0);
        assert_eq!(
            spherical_distance(ExtendedComplex::Infinity, ExtendedComplex::Infinity),
            0.0
        );
        assert_abs_diff_eq!(
            spherical_distance(fin(0.0, 0.0), fin(1.0, 0.0)),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn chordal_huge_values_stay_finite() {
        let d = spherical_distance(fin(1e200, 0.0), fin(-1e200, 0.0));
        assert!(d.is_finite() && d < 1e-150);
        let d = spherical_distance(fin(1e300, 1e300), ExtendedComplex::Infinity);
        assert!(d.is_finite() && d < 1e-250);
        assert_abs_diff_eq!(
            spherical_distance(fin(0.0, 0.0), fin(1e300, 0.0)),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn extended_infinity_equality() {
        assert_eq!(ExtendedComplex::Infinity, ExtendedComplex::new(c(f64::INFINITY, 0.0)));
        assert_eq!(ExtendedComplex::new(c(f64::NAN, 1.0)), ExtendedComplex::Infinity);
        assert_eq!(fin(0.0, 0.0).recip(), ExtendedComplex::Infinity);
    }

    #[test]
    fn square_diagonal() {
        let pts = [fin(0.0, 0.0), fin(1.0, 0.0), fin(0.0, 1.0), fin(1.0, 1.0)];
        assert_abs_diff_eq!(
            diameter(&pts, MetricTag::Euclidean).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
        assert_eq!(diameter(&pts[..1], MetricTag::Spherical).unwrap(), 0.0);
        assert_eq!(
            diameter(&[fin(0.0, 0.0), ExtendedComplex::Infinity], MetricTag::Euclidean),
            Err(GeometryError::EuclideanInfinity)
        );
        assert_eq!(diameter(&[], MetricTag::Euclidean), Err(GeometryError::EmptySet));
    }

    fn brute(points: &[ExtendedComplex], metric: MetricTag) -> f64 {
        let mut best = 0.0f64;
        for a in points {
            for b in points {
                let d = match metric {
                    MetricTag::Euclidean => (a.finite().unwrap() - b.finite().unwrap()).norm(),
                    MetricTag::Spherical => spherical_distance(*a, *b),
                };
                best = best.max(d);
            }
        }
        best
    }

    #[test]
    fn diameter_matches_all_pairs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [10usize, 65, 300] {
            for _ in 0..5 {
                let pts: Vec<ExtendedComplex> = (0..n)
                    .map(|_| fin(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
                    .collect();
                for metric in [MetricTag::Euclidean, MetricTag::Spherical] {
                    let got = diameter(&pts, metric).unwrap();
                    assert_abs_diff_eq!(got, brute(&pts, metric), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn enclosing_circle_examples() {
        let mec = min_enclosing_circle(&[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(mec.center.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mec.radius, 1.0, epsilon = 1e-15);
        let single = min_enclosing_circle(&[c(2.0, 3.0)]).unwrap();
        assert_eq!(single.radius, 0.0);
        assert_eq!(single.center, c(2.0, 3.0));
        assert!(min_enclosing_circle(&[]).is_err());
    }

    /// O(n^3) oracle: best circle over all pair-diameter and triple
    /// circumcircles that contains every point.
    fn mec_oracle(pts: &[Complex64]) -> f64 {
        let contains_all = |cc: Complex64, r: f64| pts.iter().all(|p| (p - cc).norm() <= r * (1.0 + 1e-12) + 1e-12);
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let cc = (pts[i] + pts[j]) * 0.5;
                let r = (pts[i] - cc).norm();
                if r < best && contains_all(cc, r) {
                    best = r;
                }
                for k in j + 1..pts.len() {
                    let (a, b, p) = (pts[i], pts[j], pts[k]);
                    let d = 2.0 * (a.re * (b.im - p.im) + b.re * (p.im - a.im) + p.re * (a.im - b.im));
                    if d.abs() < 1e-14 {
                        continue;
                    }
                    let ux = (a.norm_sqr() * (b.im - p.im) + b.norm_sqr() * (p.im - a.im) + p.norm_sqr() * (a.im - b.im)) / d;
                    let uy = (a.norm_sqr() * (p.re - b.re) + b.norm_sqr() * (a.re - p.re) + p.norm_sqr() * (b.re - a.re)) / d;
                    let cc = c(ux, uy);
                    let r = (a - cc).norm();
                    if r < best && contains_all(cc, r) {
                        best = r;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn enclosing_circle_matches_exhaustive_oracle() {
        let three = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
        let mec = min_enclosing_circle(&three).unwrap();
        assert_abs_diff_eq!(mec.radius, mec_oracle(&three), epsilon = 1e-12);
        assert_abs_diff_eq!(mec.radius, std::f64::consts::SQRT_2 / 2.0, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pts: Vec<Complex64> = (0..25)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let mec = min_enclosing_circle(&pts).unwrap();
            let oracle = mec_oracle(&pts);
            assert!((mec.radius - oracle).abs() <= 1e-9 * oracle);
            assert!(pts.iter().all(|p| mec.contains(*p, 1e-9)));
        }
    }

    #[test]
    fn tangency_examples() {
        let unit = Circle::new(c(0.0, 0.0), 1.0);
        assert_abs_diff_eq!(tangency_residual(&unit, &Circle::new(c(2.0, 0.0), 1.0)), 0.0);
        assert_abs_diff_eq!(tangency_residual(&unit, &Circle::new(c(0.5, 0.0), 0.5)), 0.0);
        assert_abs_diff_eq!(tangency_residual(&unit, &Circle::new(c(3.0, 0.0), 1.0)), 1.0);
    }

    fn finite_point() -> impl Strategy<Value = ExtendedComplex> {
        (-50.0f64..50.0, -50.0f64..50.0).prop_map(|(a, b)| fin(a, b))
    }

    fn any_point() -> impl Strategy<Value = ExtendedComplex> {
        prop_oneof![9 => finite_point(), 1 => Just(ExtendedComplex::Infinity)]
    }

    proptest! {
        #[test]
        fn chordal_triangle_inequality(a in any_point(), b in any_point(), p in any_point()) {
            let ab = spherical_distance(a, b);
            let bp = spherical_distance(b, p);
            let ap = spherical_distance(a, p);
            prop_assert!(ap <= ab + bp + 1e-12);
            prop_assert!((ab - spherical_distance(b, a)).abs() < 1e-15);
            prop_assert!(ab <= 2.0);
        }

        #[test]
        fn antipode_attains_two(a in any_point()) {
            let d = spherical_distance(a, a.antipode());
            prop_assert!((d - 2.0).abs() < 1e-12);
        }

        #[test]
        fn diameter_monotone_under_inclusion(pts in prop::collection::vec(finite_point(), 2..90), extra in finite_point()) {
            for metric in [MetricTag::Euclidean, MetricTag::Spherical] {
                let small = diameter(&pts, metric).unwrap();
                let mut bigger = pts.clone();
                bigger.push(extra);
                prop_assert!(diameter(&bigger, metric).unwrap() >= small - 1e-12);
            }
        }

        #[test]
        fn metrics_comparable_near_origin(pts in prop::collection::vec((0.0f64..0.5, 0.0f64..std::f64::consts::TAU), 2..40)) {
            let pts: Vec<ExtendedComplex> = pts.into_iter().map(|(r, t)| ExtendedComplex::Finite(Complex64::from_polar(r, t))).collect();
            let e = diameter(&pts, MetricTag::Euclidean).unwrap();
            let s = diameter(&pts, MetricTag::Spherical).unwrap();
            prop_assert!(s <= 2.0 * e + 1e-12);
            prop_assert!(e <= 2.0 * s + 1e-12);
        }
    }
}
