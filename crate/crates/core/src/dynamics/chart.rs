//! One step of a rational map in the two standard charts of the sphere.
//!
//! A point `z` is represented in the chart `u = z` when `|z| <= 1` and
//! `u = 1/z` otherwise. Writing `f = P/Q` homogeneously of degree `d`,
//! both charts reduce to a pair of polynomials `(A, B)` in `u` with
//! `f = A/B`, so poles and infinity need no special cases.

use num_complex::Complex64;

use crate::expr::{Poly, RationalMap};
use crate::geometry::ExtendedComplex;

#[derive(Debug, Clone)]
pub struct Stepper {
    p: Poly,
    q: Poly,
    dp: Poly,
    dq: Poly,
    pr: Poly,
    qr: Poly,
    dpr: Poly,
    dqr: Poly,
}

/// Result of one step: the image, and the derivative of the map between
/// the chart of the input and the chart of the output.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub image: ExtendedComplex,
    pub chart_derivative: Complex64,
    /// Spherical derivative `|f'| (1+|z|^2) / (1+|f|^2)`.
    pub sigma: f64,
}

fn reversed(p: &Poly, d: usize) -> Poly {
    let mut c = p.coeffs().to_vec();
    c.resize(d + 1, Complex64::new(0.0, 0.0));
    c.reverse();
    Poly::new(c)
}

/// Chart coordinate of a point, and whether it is the inverted chart.
pub fn chart(z: ExtendedComplex) -> (Complex64, bool) {
    match z {
        ExtendedComplex::Infinity => (Complex64::new(0.0, 0.0), true),
        ExtendedComplex::Finite(z) if z.norm() <= 1.0 => (z, false),
        ExtendedComplex::Finite(z) => (z.inv(), true),
    }
}

pub fn from_chart(u: Complex64, inverted: bool) -> ExtendedComplex {
    if inverted {
        ExtendedComplex::new(u).recip()
    } else {
        ExtendedComplex::new(u)
    }
}

impl Stepper {
    pub fn new(f: &RationalMap) -> Self {
        let d = f.degree();
        let p = f.numerator().clone();
        let q = f.denominator().clone();
        let pr = reversed(&p, d);
        let qr = reversed(&q, d);
        Self {
            dp: p.derivative(),
            dq: q.derivative(),
            dpr: pr.derivative(),
            dqr: qr.derivative(),
            p,
            q,
            pr,
            qr,
        }
    }

    pub fn step(&self, z: ExtendedComplex) -> Step {
        let (u, inverted) = chart(z);
        let (a, b, da, db) = if inverted {
            (self.pr.eval(u), self.qr.eval(u), self.dpr.eval(u), self.dqr.eval(u))
        } else {
            (self.p.eval(u), self.q.eval(u), self.dp.eval(u), self.dq.eval(u))
        };
        let (na, nb) = (a.norm(), b.norm());
        let w = da * b - a * db;
        let (image, dv) = if na <= nb {
            (ExtendedComplex::new(a / b), w / (b * b))
        } else {
            (ExtendedComplex::new(b / a).recip(), -w / (a * a))
        };
        let sigma = w.norm() * (1.0 + u.norm_sqr()) / (na * na + nb * nb);
        Step {
            image,
            chart_derivative: dv,
            sigma,
        }
    }

    pub fn image(&self, z: ExtendedComplex) -> ExtendedComplex {
        self.step(z).image
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_dynamical_map;

    fn sigma_oracle(f: &RationalMap, z: Complex64) -> f64 {
        let h = 1e-6;
        let fz = f.eval_complex(z).unwrap();
        let d = (f.eval_complex(z + h).unwrap() - f.eval_complex(z - h).unwrap()) / (2.0 * h);
        d.norm() * (1.0 + z.norm_sqr()) / (1.0 + fz.norm_sqr())
    }

    #[test]
    fn images_and_spherical_derivative() {
        let f = parse_dynamical_map("z^2 - 1/(16 z^2)").unwrap();
        let s = Stepper::new(&f);
        for z in [Complex64::new(0.3, 0.2), Complex64::new(1.7, -0.4), Complex64::new(-0.05, 0.9)] {
            let st = s.step(ExtendedComplex::Finite(z));
            let direct = f.eval_complex(z).unwrap();
            assert!((st.image.finite().unwrap() - direct).norm() < 1e-12 * (1.0 + direct.norm()));
            let o = sigma_oracle(&f, z);
            assert!((st.sigma - o).abs() < 1e-6 * (1.0 + o), "{} vs {}", st.sigma, o);
        }
        assert!(s.image(ExtendedComplex::Infinity).is_infinite());
        assert!(s.image(ExtendedComplex::Finite(Complex64::new(0.0, 0.0))).is_infinite());
    }

    #[test]
    fn chart_derivative_at_infinity() {
        // f(z) = z^2: in the chart at infinity, w -> w^2
        let f = parse_dynamical_map("z^2").unwrap();
        let st = Stepper::new(&f).step(ExtendedComplex::Infinity);
        assert_eq!(st.chart_derivative.norm(), 0.0);
        // 1/f ~ 2w near infinity
        let g = parse_dynamical_map("(z^3 + 1)/(2 z^2 + 1)").unwrap();
        let st = Stepper::new(&g).step(ExtendedComplex::Infinity);
        assert!(st.image.is_infinite());
        assert!((st.chart_derivative.norm() - 2.0).abs() < 1e-12);
    }
}
