//! The four homogeneity constants: quasi-ball ratio, scale density,
//! relative separation and fatness.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::index::CurveIndex;
use super::shape::{quasi_ball_stats, Shape};
use crate::error::HomogeneityError;
use crate::packing::{CurveKind, Packing};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSample {
    pub p: [f64; 2],
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiBallResult {
    pub alpha: f64,
    pub witness: u64,
    pub components: usize,
    pub degenerate: usize,
}

/// Worst `R_k / r_k` over the given regions.
pub fn alpha(shapes: &[(u64, Shape)]) -> Result<QuasiBallResult, HomogeneityError> {
    let stats: Vec<(u64, Result<f64, HomogeneityError>)> = shapes
        .par_iter()
        .map(|(id, s)| (*id, quasi_ball_stats(s).map(|q| q.ratio)))
        .collect();
    let degenerate = stats.iter().filter(|s| s.1.is_err()).count();
    let (witness, alpha) = stats
        .iter()
        .filter_map(|(id, r)| r.as_ref().ok().map(|&v| (*id, v)))
        .fold((None, 0.0f64), |acc, (id, v)| if v > acc.1 { (Some(id), v) } else { acc });
    let witness = witness.ok_or(HomogeneityError::DegenerateComponent)?;
    Ok(QuasiBallResult {
        alpha,
        witness,
        components: shapes.len(),
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleDensity {
    /// Smallest β for which every sample passes; infinite when some ball
    /// meets no curve at all.
    pub beta: f64,
    pub witness: BallSample,
    pub trial_beta: f64,
    pub passes: bool,
    pub failure_count: usize,
    /// The first few failing balls, in sample order.
    pub failures: Vec<BallSample>,
    pub samples: usize,
}

const MAX_LISTED_FAILURES: usize = 32;

fn band_bound(octave: i32, r: f64) -> f64 {
    let (lo, hi) = (2f64.powi(octave), 2f64.powi(octave + 1));
    if r < lo {
        lo / r
    } else if r > hi {
        r / hi
    } else {
        1.0
    }
}

/// For each ball `B(p, r)`: the smallest `max(d/r, r/d)` over curves of
/// diameter `d` meeting the ball. The tight β is the largest of these.
pub fn scale_density(p: &Packing, points: &[Complex64], radii: &[f64], trial_beta: f64) -> ScaleDensity {
    let index = CurveIndex::new(p);
    let curves = p.curves();
    let samples: Vec<BallSample> = points
        .iter()
        .flat_map(|z| radii.iter().map(move |&r| BallSample { p: [z.re, z.im], r }))
        .collect();
    let best: Vec<f64> = samples
        .par_iter()
        .map_init(Vec::new, |buf, s| {
            let z = Complex64::new(s.p[0], s.p[1]);
            let mut order: Vec<(f64, usize)> = index
                .bands
                .iter()
                .enumerate()
                .map(|(b, band)| (band_bound(band.octave, s.r), b))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best = f64::INFINITY;
            for (bound, b) in order {
                if bound >= best {
                    break;
                }
                index.query(&index.bands[b], [s.p[0] - s.r, s.p[1] - s.r], [s.p[0] + s.r, s.p[1] + s.r], buf);
                for &k in buf.iter() {
                    let c = &curves[k];
                    let q = (c.diameter / s.r).max(s.r / c.diameter);
                    if q < best && c.kind.distance_to(z) <= s.r {
                        best = q;
                    }
                }
            }
            best
        })
        .collect();
    let (mut beta, mut worst) = (0.0f64, 0usize);
    for (i, &b) in best.iter().enumerate() {
        if b > beta {
            beta = b;
            worst = i;
        }
    }
    let failures: Vec<BallSample> = samples
        .iter()
        .zip(&best)
        .filter(|(_, &b)| b > trial_beta)
        .map(|(s, _)| *s)
        .collect();
    let failure_count = failures.len();
    let mut failures = failures;
    failures.truncate(MAX_LISTED_FAILURES);
    ScaleDensity {
        beta,
        witness: samples.get(worst).copied().unwrap_or(BallSample { p: [0.0, 0.0], r: 0.0 }),
        trial_beta,
        passes: failure_count == 0,
        failure_count,
        failures,
        samples: samples.len(),
    }
}

fn circle_circle(c1: Complex64, r1: f64, c2: Complex64, r2: f64) -> f64 {
    let d = (c1 - c2).norm();
    if d >= r1 + r2 {
        d - r1 - r2
    } else if d <= (r1 - r2).abs() {
        (r1 - r2).abs() - d
    } else {
        0.0
    }
}

fn rect_rect(a0: Complex64, a1: Complex64, b0: Complex64, b1: Complex64) -> f64 {
    let inside = |p0: Complex64, p1: Complex64, q0: Complex64, q1: Complex64| {
        q0.re <= p0.re && q0.im <= p0.im && p1.re <= q1.re && p1.im <= q1.im
    };
    if inside(a0, a1, b0, b1) {
        return (a0.re - b0.re).min(a0.im - b0.im).min(b1.re - a1.re).min(b1.im - a1.im);
    }
    if inside(b0, b1, a0, a1) {
        return rect_rect(b0, b1, a0, a1);
    }
    let dx = (b0.re - a1.re).max(a0.re - b1.re);
    let dy = (b0.im - a1.im).max(a0.im - b1.im);
    if dx <= 0.0 && dy <= 0.0 {
        return 0.0;
    }
    dx.max(0.0).hypot(dy.max(0.0))
}

fn circle_rect(c: Complex64, r: f64, lo: Complex64, hi: Complex64) -> f64 {
    let side_gap = (c.re - lo.re).min(hi.re - c.re).min(c.im - lo.im).min(hi.im - c.im);
    if side_gap >= r {
        return side_gap - r;
    }
    let corners = [lo, hi, Complex64::new(lo.re, hi.im), Complex64::new(hi.re, lo.im)];
    let far = corners.iter().map(|q| (q - c).norm()).fold(0.0, f64::max);
    if far <= r {
        return r - far;
    }
    let dx = (lo.re - c.re).max(0.0).max(c.re - hi.re);
    let dy = (lo.im - c.im).max(0.0).max(c.im - hi.im);
    (dx.hypot(dy) - r).max(0.0)
}

/// Euclidean distance between two curves (not the regions they bound).
pub fn curve_distance(a: &CurveKind, b: &CurveKind) -> f64 {
    use CurveKind::*;
    match (a, b) {
        (RoundCircle(x), RoundCircle(y)) => circle_circle(x.center, x.radius, y.center, y.radius),
        (SquareBoundary { corner: c1, side: s1 }, SquareBoundary { corner: c2, side: s2 }) => rect_rect(
            *c1,
            c1 + Complex64::new(*s1, *s1),
            *c2,
            c2 + Complex64::new(*s2, *s2),
        ),
        (RoundCircle(x), SquareBoundary { corner, side }) | (SquareBoundary { corner, side }, RoundCircle(x)) => {
            circle_rect(x.center, x.radius, *corner, corner + Complex64::new(*side, *side))
        }
        (RasterBoundary { points, .. }, other) | (other, RasterBoundary { points, .. }) => points
            .iter()
            .map(|&q| other.distance_to(q))
            .fold(f64::INFINITY, f64::min),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separation {
    pub delta: f64,
    pub witness: (u64, u64),
    pub pairs_evaluated: usize,
    /// The pair budget ran out before the search finished.
    pub truncated: bool,
}

/// Curves closer than this fraction of the smaller diameter touch.
const TANGENT_TOL: f64 = 1e-9;
/// Neighbourhood searched around each curve, in units of its diameter.
const SEARCH_REACH: f64 = 2.0;

/// `min dist(C_j, C_k) / min(diam C_j, diam C_k)` over pairs.
pub fn relative_separation(p: &Packing, pair_budget: usize) -> Result<Separation, HomogeneityError> {
    let curves = p.curves();
    if curves.len() < 2 {
        return Err(HomogeneityError::TooFewCurves);
    }
    let index = CurveIndex::new(p);
    // curves are sorted by descending diameter, so "larger" means lower index
    let mut best = (f64::INFINITY, (0u64, 0u64));
    let mut evaluated = 0usize;
    let mut buf = Vec::new();
    for k in (0..curves.len()).rev() {
        let ck = &curves[k];
        let reach = SEARCH_REACH.min(best.0) * ck.diameter;
        let b = index.bounds(k);
        let (lo, hi) = ([b.min[0] - reach, b.min[1] - reach], [b.max[0] + reach, b.max[1] + reach]);
        let own = (ck.diameter.log2().floor()) as i32;
        for band in index.bands.iter().filter(|band| band.octave >= own) {
            index.query(band, lo, hi, &mut buf);
            for &j in buf.iter().filter(|&&j| j < k) {
                if evaluated >= pair_budget {
                    return Ok(Separation {
                        delta: best.0,
                        witness: best.1,
                        pairs_evaluated: evaluated,
                        truncated: true,
                    });
                }
                evaluated += 1;
                let cj = &curves[j];
                let m = cj.diameter.min(ck.diameter);
                let d = curve_distance(&cj.kind, &ck.kind);
                if d <= TANGENT_TOL * m {
                    return Err(HomogeneityError::TangentCurves(cj.id, ck.id));
                }
                let delta = d / m;
                if delta < best.0 {
                    best = (delta, (cj.id, ck.id));
                }
            }
        }
    }
    if best.0.is_infinite() {
        // every pair is farther apart than the search reach
        for k in 0..curves.len() {
            for j in 0..k {
                if evaluated >= pair_budget {
                    break;
                }
                evaluated += 1;
                let m = curves[j].diameter.min(curves[k].diameter);
                let delta = curve_distance(&curves[j].kind, &curves[k].kind) / m;
                if delta < best.0 {
                    best = (delta, (curves[j].id, curves[k].id));
                }
            }
        }
    }
    Ok(Separation {
        delta: best.0,
        witness: best.1,
        pairs_evaluated: evaluated,
        truncated: evaluated >= pair_budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fatness {
    pub tau: f64,
    pub witness_component: u64,
    pub witness: BallSample,
    pub samples: usize,
    pub seed: u64,
}

fn sample_point(shape: &Shape, rng: &mut ChaCha8Rng) -> Complex64 {
    match shape {
        Shape::Disk { center, radius } => {
            let rho = radius * rng.gen::<f64>().sqrt();
            let t = rng.gen::<f64>() * std::f64::consts::TAU;
            center + Complex64::from_polar(rho, t)
        }
        Shape::Rect { min, max } => Complex64::new(rng.gen_range(min.re..max.re), rng.gen_range(min.im..max.im)),
        Shape::Raster(reg) => {
            let (i, j) = reg.cells[rng.gen_range(0..reg.cells.len())];
            reg.origin + Complex64::new((i as f64 + rng.gen::<f64>()) * reg.cell, (j as f64 + rng.gen::<f64>()) * reg.cell)
        }
    }
}

/// Minimum of `area(D ∩ B(p, r)) / r^2` over random balls: `D` chosen
/// round-robin, `p` uniform in `D`, `r` uniform below the largest distance
/// from `p` to `D` (so the ball never contains `D`).
pub fn fatness(shapes: &[(u64, Shape)], samples: usize, seed: u64) -> Option<Fatness> {
    if shapes.is_empty() || samples == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(usize, Complex64, f64)> = (0..samples)
        .map(|s| {
            let k = s % shapes.len();
            let p = sample_point(&shapes[k].1, &mut rng);
            let big_r = shapes[k].1.max_distance(p);
            let mut u: f64 = rng.gen();
            while u == 0.0 {
                u = rng.gen();
            }
            (k, p, u * big_r)
        })
        .collect();
    let ratios: Vec<f64> = draws
        .par_iter()
        .map(|&(k, p, r)| shapes[k].1.area_in_disk(p, r) / (r * r))
        .collect();
    let (i, tau) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let (k, p, r) = draws[i];
    Some(Fatness {
        tau,
        witness_component: shapes[k].0,
        witness: BallSample { p: [p.re, p.im], r },
        samples,
        seed,
    })
}
