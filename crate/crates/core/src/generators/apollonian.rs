//! Apollonian packings from Descartes quadruples.
//!
//! Each circle carries its signed curvature `k` and the product `w = k·z`
//! of curvature and center. Replacing member `i` of a quadruple by
//! `k' = 2(k_j + k_k + k_l) - k_i`, `w' = 2(w_j + w_k + w_l) - w_i` yields the
//! other circle tangent to the remaining three. Integral roots are iterated
//! in `i64`, so every curvature and every Descartes check stays exact.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;

use crate::error::GeneratorError;
use crate::geometry::{tangency_residual, Circle, MetricTag};
use crate::packing::{CurveKind, CurveRecord, Packing};

/// Relative tolerance of the Descartes identity for real quadruples.
pub const DESCARTES_TOL: f64 = 1e-9;
const KEY_SCALE: f64 = 1e6;

/// Both curvatures of circles tangent to three mutually tangent circles.
/// The first element takes the `+` sign.
pub fn descartes_fourth(k1: f64, k2: f64, k3: f64) -> Result<(f64, f64), GeneratorError> {
    let sum = k1 + k2 + k3;
    let mut radicand = k1 * k2 + k2 * k3 + k3 * k1;
    let scale = k1 * k1 + k2 * k2 + k3 * k3;
    if radicand < 0.0 {
        if radicand >= -1e-12 * scale {
            radicand = 0.0;
        } else {
            return Err(GeneratorError::ComplexConfiguration(k1, k2, k3));
        }
    }
    let root = 2.0 * radicand.sqrt();
    Ok((sum + root, sum - root))
}

/// Four mutually tangent circles by curvature and curvature·center.
#[derive(Debug, Clone, PartialEq)]
pub struct DescartesQuadruple {
    pub curvatures: [f64; 4],
    pub products: [Complex64; 4],
}

impl DescartesQuadruple {
    /// Places a tangent configuration with the given signed curvatures:
    /// the first circle centered at the origin, the second on the positive
    /// real axis, the third above it.
    pub fn from_curvatures(k: [f64; 4]) -> Result<Self, GeneratorError> {
        let residual = descartes_residual(&k);
        if !(residual <= DESCARTES_TOL) || k.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(GeneratorError::InvalidRoot { residual });
        }
        if k.iter().filter(|&&v| v < 0.0).count() > 1 {
            return Err(GeneratorError::InvalidRoot { residual });
        }
        let rho: Vec<f64> = k.iter().map(|v| v.recip()).collect();
        let d = |a: usize, b: usize| (rho[a] + rho[b]).abs();
        let c1 = Complex64::new(0.0, 0.0);
        let c2 = Complex64::new(d(0, 1), 0.0);
        let (d12, d13, d23) = (d(0, 1), d(0, 2), d(1, 2));
        let x = (d13 * d13 - d23 * d23 + d12 * d12) / (2.0 * d12);
        let y = (d13 * d13 - x * x).max(0.0).sqrt();
        let c3 = Complex64::new(x, y);
        let w = [c1 * k[0], c2 * k[1], c3 * k[2]];
        let s = w[0] + w[1] + w[2];
        let r = (w[0] * w[1] + w[1] * w[2] + w[2] * w[0]).sqrt() * 2.0;
        let circles = [
            Circle::from_curvature(c1, k[0]),
            Circle::from_curvature(c2, k[1]),
            Circle::from_curvature(c3, k[2]),
        ];
        let misfit = |w4: Complex64| {
            let c4 = Circle::from_curvature(w4 / k[3], k[3]);
            circles.iter().map(|c| tangency_residual(c, &c4)).sum::<f64>()
        };
        let w4 = [s + r, s - r]
            .into_iter()
            .min_by(|a, b| misfit(*a).total_cmp(&misfit(*b)))
            .unwrap();
        let snap = |z: Complex64| Complex64::new(snap_int(z.re), snap_int(z.im));
        Ok(Self {
            curvatures: k,
            products: [snap(w[0]), snap(w[1]), snap(w[2]), snap(w4)],
        })
    }

    pub fn is_integral(&self) -> bool {
        self.curvatures
            .iter()
            .all(|k| k.fract() == 0.0 && k.abs() < 2f64.powi(52))
    }

    pub fn circle(&self, i: usize) -> Circle {
        Circle::from_curvature(self.products[i] / self.curvatures[i], self.curvatures[i])
    }
}

/// Rounds values within 1e-12 of an integer, so exact roots such as the
/// Gaussian-integer products of (-1, 2, 2, 3) stay exact under reflection.
fn snap_int(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r
    } else {
        v
    }
}

/// `|(Σk)² - 2Σk²| / Σk²`
pub fn descartes_residual(k: &[f64; 4]) -> f64 {
    let sum: f64 = k.iter().sum();
    let sq: f64 = k.iter().map(|v| v * v).sum();
    if sq == 0.0 {
        return f64::INFINITY;
    }
    (sum * sum - 2.0 * sq).abs() / sq
}

pub fn descartes_exact(k: &[i64; 4]) -> bool {
    let sum: i128 = k.iter().map(|&v| v as i128).sum();
    let sq: i128 = k.iter().map(|&v| (v as i128) * (v as i128)).sum();
    sum * sum == 2 * sq
}

/// Curvature arithmetic used by the reflection search.
trait Curvature: Copy + PartialEq {
    fn reflect(others: [Self; 3], own: Self) -> Self;
    fn as_f64(self) -> f64;
    fn key(self) -> i64;
    /// Returns `true` when the quadruple satisfies the Descartes identity.
    fn check(q: &[Self; 4]) -> bool;
}

impl Curvature for i64 {
    fn reflect(o: [i64; 3], own: i64) -> i64 {
        2 * (o[0] + o[1] + o[2]) - own
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
    fn key(self) -> i64 {
        self
    }
    fn check(q: &[i64; 4]) -> bool {
        descartes_exact(q)
    }
}

impl Curvature for f64 {
    fn reflect(o: [f64; 3], own: f64) -> f64 {
        2.0 * (o[0] + o[1] + o[2]) - own
    }
    fn as_f64(self) -> f64 {
        self
    }
    fn key(self) -> i64 {
        (self * KEY_SCALE).round() as i64
    }
    fn check(q: &[f64; 4]) -> bool {
        descartes_residual(q) <= DESCARTES_TOL
    }
}

/// Outcome of a generation run, with the bookkeeping used to audit it.
#[derive(Debug, Clone)]
pub struct ApollonianRun {
    pub packing: Packing,
    pub integral: bool,
    pub quadruples_formed: usize,
    pub identity_failures: usize,
}

/// Breadth-first reflection search up to `max_curvature`.
pub fn apollonian_generate(
    root: &DescartesQuadruple,
    max_curvature: f64,
) -> Result<ApollonianRun, GeneratorError> {
    let residual = descartes_residual(&root.curvatures);
    if !(residual <= DESCARTES_TOL) {
        return Err(GeneratorError::InvalidRoot { residual });
    }
    let top = root.curvatures.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max_curvature > top) {
        return Err(GeneratorError::BoundTooSmall { max: max_curvature });
    }
    if root.is_integral() {
        let k = root.curvatures.map(|v| v as i64);
        if !descartes_exact(&k) {
            return Err(GeneratorError::InvalidRoot { residual });
        }
        Ok(search(k, root.products, max_curvature, true))
    } else {
        Ok(search(root.curvatures, root.products, max_curvature, false))
    }
}

struct Node<K> {
    k: [K; 4],
    w: [Complex64; 4],
    ids: [u64; 4],
    skip: Option<usize>,
    generation: u32,
}

fn others<T: Copy>(a: &[T; 4], i: usize) -> [T; 3] {
    let mut out = [a[0]; 3];
    let mut n = 0;
    for (j, v) in a.iter().enumerate() {
        if j != i {
            out[n] = *v;
            n += 1;
        }
    }
    out
}

fn record<K: Curvature>(id: u64, k: K, w: Complex64, generation: u32, parents: Vec<u64>) -> CurveRecord {
    let kf = k.as_f64();
    let circle = Circle::from_curvature(w / kf, kf);
    CurveRecord {
        id,
        diameter: 2.0 * circle.radius,
        kind: CurveKind::RoundCircle(circle),
        generation,
        outer: kf < 0.0,
        parents,
    }
}

fn center_key(w: Complex64, k: f64) -> (i64, i64) {
    let c = w / k;
    ((c.re * KEY_SCALE).round() as i64, (c.im * KEY_SCALE).round() as i64)
}

fn search<K: Curvature>(
    k: [K; 4],
    w: [Complex64; 4],
    max_curvature: f64,
    integral: bool,
) -> ApollonianRun {
    let mut curves = Vec::new();
    let mut seen: HashSet<(i64, i64, i64)> = HashSet::new();
    for i in 0..4 {
        let kf = k[i].as_f64();
        let (cx, cy) = center_key(w[i], kf);
        seen.insert((k[i].key(), cx, cy));
        curves.push(record(i as u64, k[i], w[i], 0, Vec::new()));
    }
    let mut next_id = 4u64;
    let mut quadruples = 1usize;
    let mut failures = usize::from(!K::check(&k));

    let mut queue = VecDeque::new();
    queue.push_back(Node {
        k,
        w,
        ids: [0, 1, 2, 3],
        skip: None,
        generation: 0,
    });
    while let Some(node) = queue.pop_front() {
        for i in 0..4 {
            if node.skip == Some(i) {
                continue;
            }
            let k_new = K::reflect(others(&node.k, i), node.k[i]);
            let kf = k_new.as_f64();
            if kf > max_curvature || kf == 0.0 {
                continue;
            }
            let wo = others(&node.w, i);
            let w_new = (wo[0] + wo[1] + wo[2]) * 2.0 - node.w[i];
            let (cx, cy) = center_key(w_new, kf);
            if !seen.insert((k_new.key(), cx, cy)) {
                continue;
            }
            let mut k_child = node.k;
            let mut w_child = node.w;
            let mut ids = node.ids;
            k_child[i] = k_new;
            w_child[i] = w_new;
            quadruples += 1;
            if !K::check(&k_child) {
                failures += 1;
            }
            let id = next_id;
            next_id += 1;
            ids[i] = id;
            curves.push(record(id, k_new, w_new, node.generation + 1, others(&node.ids, i).to_vec()));
            queue.push_back(Node {
                k: k_child,
                w: w_child,
                ids,
                skip: Some(i),
                generation: node.generation + 1,
            });
        }
    }
    let root_text: Vec<String> = k.iter().map(|v| format!("{}", v.as_f64())).collect();
    let packing = Packing::new(
        MetricTag::Euclidean,
        format!(
            "apollonian root=({}) max_curvature={}",
            root_text.join(","),
            max_curvature
        ),
        curves,
    );
    ApollonianRun {
        packing,
        integral,
        quadruples_formed: quadruples,
        identity_failures: failures,
    }
}
