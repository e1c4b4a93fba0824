//! Exact coefficient rings and univariate polynomials over them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Minimal commutative-ring interface used by [`Poly`].
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn rzero() -> Self;
    fn rone() -> Self;
    fn ris_zero(&self) -> bool;
    fn radd(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn rsub(&self, o: &Self) -> Self {
        self.radd(&o.rneg())
    }
}

impl Ring for Q {
    fn rzero() -> Self {
        Zero::zero()
    }
    fn rone() -> Self {
        One::one()
    }
    fn ris_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self.clone()
    }
}

/// Element `a + b*sqrt(r)` of a real quadratic extension of the rationals.
#[derive(Clone, PartialEq, Debug)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
    pub r: i64,
}

impl Surd {
    pub fn new(a: Q, b: Q, r: i64) -> Self {
        Surd { a, b, r }
    }
    pub fn rational(a: Q, r: i64) -> Self {
        Surd { a, b: Q::zero(), r }
    }
    pub fn root(r: i64) -> Self {
        Surd { a: Q::zero(), b: Q::one(), r }
    }
    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.a) + q_to_f64(&self.b) * (self.r as f64).sqrt()
    }
}

// Radicand 0 marks the ring constants produced by `Ring::zero/one`.
fn merge_r(x: i64, y: i64) -> i64 {
    if x == 0 {
        y
    } else {
        debug_assert!(y == 0 || x == y, "mixed radicands");
        x
    }
}

impl Ring for Surd {
    fn rzero() -> Self {
        Surd { a: Q::zero(), b: Q::zero(), r: 0 }
    }
    fn rone() -> Self {
        Surd { a: Q::one(), b: Q::zero(), r: 0 }
    }
    fn ris_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn radd(&self, o: &Self) -> Self {
        Surd { a: &self.a + &o.a, b: &self.b + &o.b, r: merge_r(self.r, o.r) }
    }
    fn rmul(&self, o: &Self) -> Self {
        let r = merge_r(self.r, o.r);
        Surd {
            a: &self.a * &o.a + &self.b * &o.b * qi(r),
            b: &self.a * &o.b + &self.b * &o.a,
            r,
        }
    }
    fn rneg(&self) -> Self {
        Surd { a: -self.a.clone(), b: -self.b.clone(), r: self.r }
    }
}

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<R: Ring> {
    c: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut c: Vec<R>) -> Self {
        while c.last().is_some_and(|x| x.ris_zero()) {
            c.pop();
        }
        Poly { c }
    }
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }
    pub fn constant(x: R) -> Self {
        Poly::new(vec![x])
    }
    pub fn x() -> Self {
        Poly::new(vec![R::rzero(), R::rone()])
    }
    pub fn monomial(k: usize, x: R) -> Self {
        let mut c = vec![R::rzero(); k + 1];
        c[k] = x;
        Poly::new(c)
    }
    pub fn coeffs(&self) -> &[R] {
        &self.c
    }
    pub fn coeff(&self, k: usize) -> R {
        self.c.get(k).cloned().unwrap_or_else(R::rzero)
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    pub fn scale(&self, s: &R) -> Self {
        Poly::new(self.c.iter().map(|x| x.rmul(s)).collect())
    }
    pub fn eval(&self, x: &R) -> R {
        self.c.iter().rev().fold(R::rzero(), |acc, a| acc.rmul(x).radd(a))
    }
    /// Coefficients of degree `< n` only.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.c.iter().take(n).cloned().collect())
    }
}

impl<R: Ring> Add for &Poly<R> {
    type Output = Poly<R>;
    fn add(self, o: &Poly<R>) -> Poly<R> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k).radd(&o.coeff(k))).collect())
    }
}

impl<R: Ring> Sub for &Poly<R> {
    type Output = Poly<R>;
    fn sub(self, o: &Poly<R>) -> Poly<R> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k).rsub(&o.coeff(k))).collect())
    }
}

impl<R: Ring> Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        Poly::new(self.c.iter().map(|x| x.rneg()).collect())
    }
}

impl<R: Ring> Mul for &Poly<R> {
    type Output = Poly<R>;
    fn mul(self, o: &Poly<R>) -> Poly<R> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![R::rzero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].radd(&a.rmul(b));
            }
        }
        Poly::new(c)
    }
}

impl Poly<Q> {
    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| qi(x)).collect())
    }
    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * qi(k as i64))
                .collect(),
        )
    }
    /// Exact integral over `[0, 1]`.
    pub fn integral01(&self) -> Q {
        self.c
            .iter()
            .enumerate()
            .fold(Q::zero(), |acc, (k, a)| acc + a / qi(k as i64 + 1))
    }
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, a| acc * x + q_to_f64(a))
    }
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.c.iter().map(q_to_f64).collect()
    }
}

impl fmt::Display for Poly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.c.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            let mag = a.abs();
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if mag.is_one() && k > 0 { String::new() } else { mag.to_string() };
            match k {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}X")?,
                _ => write!(f, "{coef}X^{k}")?,
            }
        }
        Ok(())
    }
}

/// Truncated formal Laurent series `sum_{k >= lo} c_k u^k` with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub lo: i64,
    pub c: Vec<Q>,
}

impl Laurent {
    pub fn new(lo: i64, c: Vec<Q>) -> Self {
        Laurent { lo, c }
    }
    pub fn monomial(k: i64, a: Q) -> Self {
        Laurent { lo: k, c: vec![a] }
    }
    /// `exp(u)` through degree `hi` inclusive.
    pub fn exp(hi: i64) -> Self {
        let c = (0..=hi.max(0))
            .map(|k| BigRational::new(BigInt::one(), factorial(k as u32)))
            .collect();
        Laurent { lo: 0, c }
    }
    pub fn coeff(&self, k: i64) -> Q {
        let i = k - self.lo;
        if i < 0 {
            return Q::zero();
        }
        self.c.get(i as usize).cloned().unwrap_or_else(Q::zero)
    }
    pub fn hi(&self) -> i64 {
        self.lo + self.c.len() as i64 - 1
    }
    /// Product keeping exponents up to `keep_hi`.
    pub fn mul(&self, o: &Laurent, keep_hi: i64) -> Laurent {
        let lo = self.lo + o.lo;
        let hi = (self.hi() + o.hi()).min(keep_hi);
        if hi < lo {
            return Laurent { lo, c: vec![] };
        }
        let mut c = vec![Q::zero(); (hi - lo + 1) as usize];
        for (i, a) in self.c.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let k = i as i64 + j as i64;
                if lo + k > hi {
                    break;
                }
                c[k as usize] += a * b;
            }
        }
        Laurent { lo, c }
    }
    pub fn residue(&self) -> Q {
        self.coeff(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arith_and_integral() {
        let p = Poly::from_ints(&[0, 0, 1]);
        let sq = &p.derivative().derivative() * &p.derivative().derivative();
        assert_eq!(sq.integral01(), qi(4));
        assert_eq!(p.eval(&q(1, 2)), q(1, 4));
        assert_eq!(format!("{}", Poly::from_ints(&[0, -1, 0, 3])), "-X + 3X^3");
    }

    #[test]
    fn surd_squares() {
        let s = Surd::root(11);
        let sq = s.rmul(&s);
        assert_eq!(sq, Surd::rational(qi(11), 11));
        assert!((Surd::new(q(1, 2), q(1, 2), 5).to_f64() - 1.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn laurent_exp_residue() {
        // res u^{-3} e^u = 1/2
        let f = Laurent::monomial(-3, qi(1)).mul(&Laurent::exp(4), 4);
        assert_eq!(f.residue(), q(1, 2));
    }
}
