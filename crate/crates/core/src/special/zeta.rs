//! Riemann, Hurwitz and quadratic Dedekind zeta values with their first two
//! derivatives, by Euler-Maclaurin summation.

use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Value and first two derivatives of an analytic function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [Complex64; 3]);

impl Jet {
    pub fn constant(c: Complex64) -> Self {
        Jet([c, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
    }
    /// `e^{-w L}` at `w`.
    pub fn exp_neg(w: Complex64, l: f64) -> Self {
        let e = (-w * l).exp();
        Jet([e, e * (-l), e * (l * l)])
    }
    pub fn value(&self) -> Complex64 {
        self.0[0]
    }
    pub fn scale(&self, c: Complex64) -> Self {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let [f, f1, f2] = self.0;
        let [g, g1, g2] = o.0;
        Jet([f * g, f1 * g + f * g1, f2 * g + f1 * g1 * 2.0 + f * g2])
    }
}

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `zeta(w, a) = sum_{n >= 0} (n + a)^-w` and two w-derivatives, `w != 1`, `0 < a <= 1`.
pub fn hurwitz_jet(w: Complex64, a: f64) -> Jet {
    let zero = Complex64::new(0.0, 0.0);
    let big_n = 20 + w.norm().ceil() as usize;
    let mut acc = Jet([zero; 3]);
    for n in 0..big_n {
        acc = acc + Jet::exp_neg(w, (n as f64 + a).ln());
    }
    let x = big_n as f64 + a;
    let l = x.ln();
    // x^{1-w} / (w - 1)
    let g = Jet::exp_neg(w, l).scale(Complex64::new(x, 0.0));
    let inv = (w - 1.0).inv();
    let h = Jet([inv, -inv * inv, inv * inv * inv * 2.0]);
    acc = acc + g * h;
    acc = acc + Jet::exp_neg(w, l).scale(Complex64::new(0.5, 0.0));
    // Bernoulli corrections B_{2k}/(2k)! (w)_{2k-1} x^{-w-2k+1}
    let mut fact = 1.0;
    for (k0, b) in BERNOULLI_2K.iter().enumerate() {
        let k = k0 + 1;
        fact *= ((2 * k - 1) * (2 * k)) as f64;
        let mut p = Complex64::new(1.0, 0.0);
        let mut s1 = zero;
        let mut s2 = zero;
        for i in 0..(2 * k - 1) {
            let wi = w + i as f64;
            p *= wi;
            s1 += wi.inv();
            s2 += (wi * wi).inv();
        }
        let poly = Jet([p, p * s1, p * (s1 * s1 - s2)]);
        let pw = Jet::exp_neg(w, l).scale(Complex64::new(x.powi(1 - 2 * k as i32), 0.0));
        acc = acc + (poly * pw).scale(Complex64::new(b / fact, 0.0));
    }
    acc
}

pub fn riemann_zeta_jet(w: Complex64) -> Jet {
    hurwitz_jet(w, 1.0)
}

/// Kronecker symbol `(disc / n)` for a fundamental discriminant `disc`.
pub fn kronecker(disc: i64, n: u64) -> i32 {
    let mut n = n;
    let mut out = 1;
    if n == 0 {
        return if disc.abs() == 1 { 1 } else { 0 };
    }
    while n % 2 == 0 {
        n /= 2;
        out *= match disc.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    for (p, e) in crate::arith::factorize(n) {
        let l = crate::arith::legendre(disc, p);
        out *= l.pow(e);
    }
    out
}

/// `zeta_F(w)` for the rationals (`disc = 1`) or a real quadratic field, with
/// an optional Euler factor at a prime of norm `removed_norm` taken out.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaData {
    pub disc: i64,
    pub removed_norm: Option<f64>,
}

impl ZetaData {
    pub fn rationals() -> Self {
        ZetaData { disc: 1, removed_norm: None }
    }

    pub fn jet(&self, w: Complex64) -> Jet {
        let mut z = riemann_zeta_jet(w);
        if self.disc != 1 {
            let d = self.disc as u64;
            let mut l = Jet([Complex64::new(0.0, 0.0); 3]);
            for a in 1..d {
                let chi = kronecker(self.disc, a);
                if chi != 0 {
                    l = l + hurwitz_jet(w, a as f64 / d as f64).scale(Complex64::new(chi as f64, 0.0));
                }
            }
            z = z * l * Jet::exp_neg(w, (d as f64).ln());
        }
        if let Some(nq) = self.removed_norm {
            let e = Jet::exp_neg(w, nq.ln());
            let one = Jet::constant(Complex64::new(1.0, 0.0));
            z = z * (one + e.scale(Complex64::new(-1.0, 0.0)));
        }
        z
    }

    pub fn value(&self, w: Complex64) -> Complex64 {
        self.jet(w).value()
    }
}
