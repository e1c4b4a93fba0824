//! The mollifier polynomial, its coefficients and its Mellin transform.

use super::MomentError;
use crate::exact::{q_to_f64, Poly, Q};
use crate::special::{mellin_line_integral, LineSpec};
use num_complex::Complex64;
use num_traits::Zero;

/// Mollifier data: `P` with `P(0) = P'(0) = 0`, `Delta` and the length
/// `M = N(q)^{Delta/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierSpec {
    pub poly: Poly<Q>,
    pub delta: Q,
    pub level_norm: u64,
    pub length: f64,
}

/// Rejects the zero polynomial and any `P` with `P(0) != 0` or `P'(0) != 0`.
pub fn check_admissible(poly: &Poly<Q>) -> Result<(), MomentError> {
    if poly.is_zero() {
        return Err(MomentError::Precondition("zero mollifier polynomial".into()));
    }
    if !poly.coeff(0).is_zero() || !poly.coeff(1).is_zero() {
        return Err(MomentError::Precondition(format!("P = {poly} needs P(0) = P'(0) = 0")));
    }
    Ok(())
}

impl MollifierSpec {
    pub fn new(poly: Poly<Q>, delta: Q, level_norm: u64) -> Result<Self, MomentError> {
        check_admissible(&poly)?;
        let d = q_to_f64(&delta);
        if !(d > 0.0 && d.is_finite()) {
            return Err(MomentError::Precondition(format!("Delta = {delta} must be positive")));
        }
        if level_norm < 2 {
            return Err(MomentError::Precondition("level norm must be at least 2".into()));
        }
        let length = (level_norm as f64).powf(d / 2.0);
        if (length - length.round()).abs() <= 1e-9 * length {
            return Err(MomentError::Precondition(format!("M = {length} is an integer")));
        }
        Ok(MollifierSpec { poly, delta, level_norm, length })
    }

    pub fn delta_f64(&self) -> f64 {
        q_to_f64(&self.delta)
    }

    pub fn log_length(&self) -> f64 {
        self.length.ln()
    }

    /// `P_m` for an ideal with the given Moebius value, `psi` and norm.
    pub fn coeff(&self, mu: i32, psi: f64, norm: u64) -> f64 {
        mollifier_coeff(&self.poly, self.length, mu, psi, norm as f64).value
    }

    /// The same data with `P` replaced by `c P`.
    pub fn scaled(&self, c: &Q) -> Self {
        MollifierSpec { poly: self.poly.scale(c), ..self.clone() }
    }

    pub fn p_hat(&self, s: Complex64) -> Result<Complex64, MomentError> {
        p_hat(&self.poly, self.log_length(), s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficient {
    pub value: f64,
    /// Set when `N(m) > M`; the value is then 0.
    pub outside_support: bool,
}

/// `mu(m) P(log(M / N(m)) / log M) / (psi(m) N(m)^{1/2})`.
pub fn mollifier_coeff(poly: &Poly<Q>, length: f64, mu: i32, psi: f64, norm: f64) -> Coefficient {
    if norm > length {
        return Coefficient { value: 0.0, outside_support: true };
    }
    if mu == 0 {
        return Coefficient { value: 0.0, outside_support: false };
    }
    let x = (length / norm).ln() / length.ln();
    Coefficient { value: mu as f64 * poly.eval_f64(x) / (psi * norm.sqrt()), outside_support: false }
}

/// `sum_k a_k k! (s log M)^{-k}`.
pub fn p_hat(poly: &Poly<Q>, log_m: f64, s: Complex64) -> Result<Complex64, MomentError> {
    if s.norm() == 0.0 {
        return Err(MomentError::Pole);
    }
    let z = (s * log_m).inv();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for (k, a) in poly.coeffs().iter().enumerate() {
        if k > 0 {
            zk *= z;
            fact *= k as f64;
        }
        acc += zk * (q_to_f64(a) * fact);
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug)]
pub struct PerronCheck {
    pub integral: f64,
    pub direct: f64,
    pub quadrature_error: f64,
}

/// `(1/2 pi i) int_(sigma) (M/n)^s P_hat(s) ds/s` against
/// `P(log(M/n)/log M) 1_{n < M}`.
pub fn perron_check(poly: &Poly<Q>, length: f64, n: f64, sigma: f64) -> Result<PerronCheck, MomentError> {
    let lm = length.ln();
    let r = (length / n).ln();
    let f = |s: Complex64| (s * r).exp() * p_hat(poly, lm, s).unwrap_or_default() / s;
    let mut spec = LineSpec::at(sigma);
    spec.t_max = 400.0;
    spec.oscillation = (r != 0.0).then_some(-r);
    let res = mellin_line_integral(f, &spec)?;
    let direct = if n < length { poly.eval_f64(r / lm) } else { 0.0 };
    Ok(PerronCheck { integral: res.value.re, direct, quadrature_error: res.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn x2() -> Poly<Q> {
        Poly::from_ints(&[0, 0, 1])
    }

    #[test]
    fn coefficient_examples() {
        let p = x2();
        assert_eq!(mollifier_coeff(&p, 100.5, 1, 1.0, 1.0).value, 1.0);
        let v = mollifier_coeff(&p, 100.0, -1, 1.5, 2.0).value;
        let expect = -(50f64.ln() / 100f64.ln()).powi(2) / (1.5 * 2f64.sqrt());
        assert!((v - expect).abs() < 1e-15);
        assert_eq!(mollifier_coeff(&p, 100.0, 0, 1.0, 4.0).value, 0.0);
        let out = mollifier_coeff(&p, 10.5, -1, 1.1, 11.0);
        assert!(out.outside_support && out.value == 0.0);
    }

    #[test]
    fn spec_validation() {
        assert!(MollifierSpec::new(Poly::from_ints(&[0, 1, 1]), q(1, 2), 10009).is_err());
        assert!(MollifierSpec::new(Poly::zero(), q(1, 2), 10009).is_err());
        // 10^4 with Delta = 1/2 gives M = 10 exactly
        assert!(MollifierSpec::new(x2(), q(1, 2), 10_000).is_err());
        let s = MollifierSpec::new(x2(), q(1, 2), 10009).unwrap();
        assert!((s.length - 10009f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(s.scaled(&qi(3)).poly, Poly::from_ints(&[0, 0, 3]));
    }

    #[test]
    fn p_hat_values() {
        let lm = 2.5;
        let v = p_hat(&x2(), lm, Complex64::new(2.0 / lm, 0.0)).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15 && v.im == 0.0);
        assert!(matches!(p_hat(&x2(), lm, Complex64::new(0.0, 0.0)), Err(MomentError::Pole)));
    }

    #[test]
    fn perron_identity() {
        let p = x2();
        let c = perron_check(&p, 10.5, 3.0, 1.0).unwrap();
        assert!((c.integral - c.direct).abs() < 1e-6, "{c:?}");
        let far = perron_check(&p, 10.5, 30.0, 1.0).unwrap();
        assert!(far.direct == 0.0 && far.integral.abs() < 1e-6, "{far:?}");
    }
}
