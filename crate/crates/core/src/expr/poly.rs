use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients whose modulus is below this fraction of the largest
/// coefficient are treated as cancelled.
pub const CANCEL_TOL: f64 = 1e-12;

/// Dense univariate polynomial, coefficients in ascending degree.
/// The zero polynomial is `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(zero());
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![zero(), Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == zero()
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops negligible coefficients (relative to the largest one).
    pub fn trimmed(&self) -> Self {
        let scale = self.max_abs();
        if scale == 0.0 {
            return Self::new(vec![zero()]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| if c.norm() <= CANCEL_TOL * scale { zero() } else { c })
            .collect();
        Self::new(coeffs)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(zero(), |acc, &c| acc * z + c)
    }

    /// `sum |a_i| |z|^i`, the natural scale for a residual at `z`.
    pub fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Evaluates `z^deg * p(1/z)` at `w = 1/z`.
    pub fn eval_reversed(&self, w: Complex64) -> Complex64 {
        self.coeffs.iter().fold(zero(), |acc, &c| acc * w + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![zero()]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Complex64::new(1.0, 0.0));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Number of leading (lowest-degree) zero coefficients.
    pub fn low_order_zeros(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        self.coeffs.iter().take_while(|&&c| c == zero()).count()
    }

    /// Divides by `z^k`, assuming the low coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs[k.min(self.degree())..].to_vec())
    }

    /// Synthetic division by `(z - r)`; returns quotient and remainder.
    pub fn deflate(&self, r: Complex64) -> (Self, Complex64) {
        let n = self.degree();
        if n == 0 {
            return (Self::new(vec![zero()]), self.coeffs[0]);
        }
        let mut q = vec![zero(); n];
        let mut acc = self.coeffs[n];
        for i in (0..n).rev() {
            q[i] = acc;
            acc = acc * r + self.coeffs[i];
        }
        (Self::new(q), acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_else(zero)
                    + rhs.coeffs.get(i).copied().unwrap_or_else(zero)
            })
            .collect();
        Poly::new(c)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut c = vec![zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}
