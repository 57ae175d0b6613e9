//! Aberth–Ehrlich simultaneous root iteration.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::Poly;
use crate::error::RootError;

pub const MAX_ITERATIONS: usize = 1000;
/// Relative residual `|p(r)| / sum |a_i||r|^i` a root must reach.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Approximations closer than this (relative) are merged into one root.
const CLUSTER_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    pub residual: f64,
}

pub fn relative_residual(p: &Poly, z: Complex64) -> f64 {
    let scale = p.abs_eval(z);
    if scale == 0.0 {
        0.0
    } else {
        p.eval(z).norm() / scale
    }
}

/// All roots of `p` with multiplicities. Exact zero roots are split off
/// before iterating. A seeded random rotation of the starting circle keeps
/// runs reproducible.
pub fn find_roots(p: &Poly) -> Result<Vec<Root>, RootError> {
    let mut roots = Vec::new();
    if p.degree() == 0 {
        return Ok(roots);
    }
    let k = p.low_order_zeros();
    if k > 0 {
        roots.push(Root {
            value: Complex64::new(0.0, 0.0),
            multiplicity: k,
            residual: 0.0,
        });
    }
    let q = p.shift_down(k);
    if q.degree() == 0 {
        return Ok(roots);
    }
    let approx = aberth(&q)?;
    roots.extend(cluster(&q, approx));
    roots.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(roots)
}

fn aberth(p: &Poly) -> Result<Vec<Complex64>, RootError> {
    let n = p.degree();
    let dp = p.derivative();
    let c = p.coeffs();
    let lead = p.leading().norm();
    // Fujiwara-style bound on root moduli
    let bound = (0..n)
        .map(|i| (c[i].norm() / lead).powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        * 2.0;
    let radius = 0.5 * bound.max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(0xAB37);
    let offset: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, offset + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let pz = p.eval(z[k]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dp.eval(z[k]);
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    let residuals: Vec<f64> = z.iter().map(|&r| relative_residual(p, r)).collect();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL) {
        return Err(RootError::DidNotConverge {
            iterations: MAX_ITERATIONS,
            worst_residual: worst,
            residuals,
        });
    }
    Ok(z)
}

fn cluster(p: &Poly, approx: Vec<Complex64>) -> Vec<Root> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for z in approx {
        match groups
            .iter_mut()
            .find(|g| (g[0] - z).norm() <= CLUSTER_TOL * (1.0 + z.norm()))
        {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().sum::<Complex64>() / g.len() as f64;
            Root {
                value: mean,
                multiplicity: g.len(),
                residual: relative_residual(p, mean),
            }
        })
        .collect()
}
