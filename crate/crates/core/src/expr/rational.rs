use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::parser::{parse_expr, Expr};
use super::poly::Poly;
use super::roots::{find_roots, relative_residual, Root};
use crate::error::{ParseError, RootError};
use crate::geometry::ExtendedComplex;

/// A root of the denominator cancels against the numerator when the
/// numerator's relative residual there is below this. Looser than the
/// coefficient tolerance because multiple roots are only located to
/// about the square root of machine precision.
pub const COMMON_ROOT_TOL: f64 = 1e-8;

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th
/// derivative, where Newton recovers full precision.
fn polish_multiple_root(p: &Poly, root: &Root) -> Complex64 {
    let z0 = root.value;
    let cluster = 1e-5 * (1.0 + z0.norm());
    let m = root.multiplicity.max(1);
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let dq = q.derivative();
    let mut z = z0;
    for _ in 0..8 {
        let d = dq.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = q.eval(z) / d;
        if !step.re.is_finite() || step.norm() > cluster {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// `f = P/Q` with `P` and `Q` coprime and `Q` monic.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
}

/// A critical point together with its multiplicity (local degree − 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub point: ExtendedComplex,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub numerator: Vec<[f64; 2]>,
    pub denominator: Vec<[f64; 2]>,
}

fn to_rational(e: &Expr) -> (Poly, Poly) {
    let one = || Poly::constant(Complex64::new(1.0, 0.0));
    match e {
        Expr::Var => (Poly::identity(), one()),
        Expr::Const(c) => (Poly::constant(*c), one()),
        Expr::Neg(a) => {
            let (p, q) = to_rational(a);
            (-&p, q)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (p1, q1) = to_rational(a);
            let (mut p2, q2) = to_rational(b);
            if matches!(e, Expr::Sub(..)) {
                p2 = -&p2;
            }
            if q1 == q2 {
                (&p1 + &p2, q1)
            } else {
                (&(&p1 * &q2) + &(&p2 * &q1), &q1 * &q2)
            }
        }
        Expr::Mul(a, b) => {
            let (p1, q1) = to_rational(a);
            let (p2, q2) = to_rational(b);
            (&p1 * &p2, &q1 * &q2)
        }
        Expr::Div(a, b) => {
            let (p1, q1) = to_rational(a);
            let (p2, q2) = to_rational(b);
            (&p1 * &q2, &q1 * &p2)
        }
        Expr::Pow(a, k) => {
            let (p, q) = to_rational(a);
            (p.pow(*k), q.pow(*k))
        }
    }
}

impl RationalMap {
    /// Builds the coprime normal form of `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ParseError> {
        let mut num = num.trimmed();
        let mut den = den.trimmed();
        if den.is_zero() {
            return Err(ParseError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self {
                num,
                den: Poly::constant(Complex64::new(1.0, 0.0)),
            });
        }
        // common powers of z
        let k = num.low_order_zeros().min(den.low_order_zeros());
        num = num.shift_down(k);
        den = den.shift_down(k);

        // remaining common roots, one at a time
        loop {
            let kz = den.low_order_zeros();
            let core = den.shift_down(kz);
            if core.degree() == 0 {
                break;
            }
            let roots = match find_roots(&core) {
                Ok(r) => r,
                Err(_) => break,
            };
            let common = roots
                .iter()
                .filter(|r| r.value.norm() > 0.0)
                .find(|r| relative_residual(&num, r.value) <= COMMON_ROOT_TOL);
            match common {
                Some(r) => {
                    let z = polish_multiple_root(&core, r);
                    num = num.deflate(z).0.trimmed();
                    den = den.deflate(z).0.trimmed();
                }
                None => break,
            }
        }

        let lead = den.leading();
        let inv = Complex64::new(1.0, 0.0) / lead;
        Ok(Self {
            num: num.scale(inv).trimmed(),
            den: den.scale(inv).trimmed(),
        })
    }

    pub fn polynomial(p: Poly) -> Result<Self, ParseError> {
        Self::new(p, Poly::constant(Complex64::new(1.0, 0.0)))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn coefficients(&self) -> Coefficients {
        let f = |p: &Poly| p.coeffs().iter().map(|c| [c.re, c.im]).collect();
        Coefficients {
            numerator: f(&self.num),
            denominator: f(&self.den),
        }
    }

    /// Sum of coefficient moduli of numerator and denominator.
    pub fn coefficient_mass(&self) -> f64 {
        self.num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .map(|c| c.norm())
            .sum()
    }

    /// Re-runs normalization on the stored coefficients.
    pub fn renormalized(&self) -> Self {
        Self::new(self.num.clone(), self.den.clone()).expect("stored denominator is nonzero")
    }

    pub fn evaluate(&self, z: ExtendedComplex) -> ExtendedComplex {
        let (dp, dq) = (self.num.degree() as i32, self.den.degree() as i32);
        match z {
            ExtendedComplex::Infinity => {
                if self.num.is_zero() {
                    ExtendedComplex::Finite(Complex64::new(0.0, 0.0))
                } else if dp > dq {
                    ExtendedComplex::Infinity
                } else if dp < dq {
                    ExtendedComplex::Finite(Complex64::new(0.0, 0.0))
                } else {
                    ExtendedComplex::new(self.num.leading() / self.den.leading())
                }
            }
            ExtendedComplex::Finite(z) => self.eval_finite(z),
        }
    }

    fn eval_finite(&self, z: Complex64) -> ExtendedComplex {
        let zero = Complex64::new(0.0, 0.0);
        if z.norm() <= 1.0 {
            let p = self.num.eval(z);
            let q = self.den.eval(z);
            if q == zero {
                return ExtendedComplex::Infinity;
            }
            return ExtendedComplex::new(p / q);
        }
        // work in w = 1/z to keep intermediate powers bounded
        let w = z.inv();
        let p = self.num.eval_reversed(w);
        let q = self.den.eval_reversed(w);
        if q == zero {
            return ExtendedComplex::Infinity;
        }
        let ratio = p / q;
        if ratio == zero {
            return ExtendedComplex::Finite(zero);
        }
        let shift = self.num.degree() as i32 - self.den.degree() as i32;
        let factor = if shift >= 0 {
            z.powi(shift)
        } else {
            w.powi(-shift)
        };
        ExtendedComplex::new(ratio * factor)
    }

    /// Evaluates at a finite point, returning `None` at poles.
    pub fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        self.eval_finite(z).finite()
    }

    /// `P'Q - PQ'`, the numerator of `f'` over `Q^2`.
    pub fn wronskian(&self) -> Poly {
        (&(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())).trimmed()
    }

    pub fn derivative(&self) -> RationalMap {
        Self::new(self.wronskian(), &self.den * &self.den).expect("Q^2 is nonzero")
    }

    /// Critical points with multiplicity; the count equals `2d - 2`.
    ///
    /// Finite critical points are the roots of `P'Q - PQ'` (this includes
    /// poles of order ≥ 2); infinity is tested from the degree data.
    pub fn critical_points(&self) -> Result<Vec<CriticalPoint>, RootError> {
        let w = self.wronskian();
        let mut out: Vec<CriticalPoint> = if w.is_zero() {
            Vec::new()
        } else {
            find_roots(&w)?
                .into_iter()
                .map(|r| CriticalPoint {
                    point: ExtendedComplex::Finite(r.value),
                    multiplicity: r.multiplicity,
                })
                .collect()
        };
        let m = self.multiplicity_at_infinity();
        if m > 0 {
            out.push(CriticalPoint {
                point: ExtendedComplex::Infinity,
                multiplicity: m,
            });
        }
        Ok(out)
    }

    /// Local degree at infinity minus one.
    pub fn multiplicity_at_infinity(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        let (dp, dq) = (self.num.degree(), self.den.degree());
        if dp != dq {
            return dp.abs_diff(dq) - 1;
        }
        let c = self.num.leading() / self.den.leading();
        let diff = (&self.num - &self.den.scale(c)).trimmed();
        let local = if diff.is_zero() { 0 } else { dp - diff.degree() };
        local.saturating_sub(1)
    }
}

/// Parses and normalizes a map expression.
pub fn parse_map(text: &str) -> Result<(RationalMap, Expr), ParseError> {
    let expr = parse_expr(text)?;
    let (p, q) = to_rational(&expr);
    Ok((RationalMap::new(p, q)?, expr))
}

/// Parses a map intended for iteration; degree must be at least 2.
pub fn parse_dynamical_map(text: &str) -> Result<RationalMap, ParseError> {
    let (f, _) = parse_map(text)?;
    if f.degree() < 2 {
        return Err(ParseError::DegreeTooLow { degree: f.degree() });
    }
    Ok(f)
}
