//! Density functionals `L(P)^2 / (2 (Q(P) + L(P)^2))` over polynomials with
//! `P(0) = P'(0) = 0`, their exact maximization, and the Cauchy-Schwarz
//! assembly of a density bound from two moments.

use crate::exact::{q_to_f64, qi, Poly, Q};
use crate::moments::{diagonal, MomentReport};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("Delta = {0} outside (0, 1]")]
    Delta(String),
    #[error("degree {0} below 2")]
    Degree(usize),
    #[error("singular Gram system at degree {0}")]
    Singular(usize),
    #[error("linear part vanishes")]
    Degenerate,
    #[error("second moment {0} is not positive")]
    NonPositive(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Plain,
    Derivative,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Plain => "plain",
            Kind::Derivative => "derivative",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(Kind::Plain),
            "derivative" | "deriv" => Ok(Kind::Derivative),
            _ => Err(format!("unknown functional kind `{s}` (plain, derivative)")),
        }
    }
}

/// Plain: `L = P'(1)`, `Q = ||P''||^2 / Delta`.
/// Derivative: `L = P(1) + P'(1) / Delta`, `Q = ||P''||^2 / (3 Delta^3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityFunctional {
    pub kind: Kind,
    pub delta: Q,
}

impl DensityFunctional {
    pub fn new(kind: Kind, delta: Q) -> Result<Self, OptimizeError> {
        if !delta.is_positive() || delta > Q::one() {
            return Err(OptimizeError::Delta(delta.to_string()));
        }
        Ok(DensityFunctional { kind, delta })
    }

    fn quad_scale(&self) -> Q {
        let d = &self.delta;
        match self.kind {
            Kind::Plain => Q::one() / d,
            Kind::Derivative => Q::one() / (qi(3) * d * d * d),
        }
    }

    pub fn linear(&self, p: &Poly<Q>) -> Q {
        let d1 = p.derivative().eval(&Q::one());
        match self.kind {
            Kind::Plain => d1,
            Kind::Derivative => p.eval(&Q::one()) + d1 / &self.delta,
        }
    }

    pub fn quadratic(&self, p: &Poly<Q>) -> Q {
        let pp = p.derivative().derivative();
        (&pp * &pp).integral01() * self.quad_scale()
    }

    /// Linear coefficient of `X^i`.
    fn linear_basis(&self, i: usize) -> Q {
        match self.kind {
            Kind::Plain => qi(i as i64),
            Kind::Derivative => Q::one() + qi(i as i64) / &self.delta,
        }
    }

    /// `int_0^1 (X^i)'' (X^j)''`, scaled.
    fn gram_entry(&self, i: usize, j: usize) -> Q {
        let (i, j) = (i as i64, j as i64);
        qi(i * (i - 1) * j * (j - 1)) / qi(i + j - 3) * self.quad_scale()
    }

    pub fn value(&self, p: &Poly<Q>) -> Result<Q, OptimizeError> {
        check_constraint(p)?;
        let l = self.linear(p);
        let l2 = &l * &l;
        let den = qi(2) * (self.quadratic(p) + &l2);
        Ok(l2 / den)
    }

    /// The value as a function of the Rayleigh ratio `r = L^2 / Q`.
    fn value_from_ratio(r: &Q) -> Q {
        r / (qi(2) * (Q::one() + r))
    }
}

pub fn check_constraint(p: &Poly<Q>) -> Result<(), OptimizeError> {
    if p.is_zero() {
        return Err(OptimizeError::Constraint("zero polynomial".into()));
    }
    if !p.coeff(0).is_zero() || !p.coeff(1).is_zero() {
        return Err(OptimizeError::Constraint(format!("P = {p} needs P(0) = P'(0) = 0")));
    }
    Ok(())
}

pub fn functional_value(kind: Kind, delta: &Q, p: &Poly<Q>) -> Result<Q, OptimizeError> {
    DensityFunctional::new(kind, delta.clone())?.value(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Optimum {
    pub kind: Kind,
    pub delta: Q,
    pub degree: usize,
    /// Maximizer scaled so its lowest nonzero coefficient is 1.
    pub poly: Poly<Q>,
    pub value: Q,
}

/// Solves `A x = b` exactly by Gauss-Jordan elimination.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Q::one() / &a[col][col];
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let v = &a[col][c] * &f;
                a[r][c] -= v;
            }
            let v = &b[col] * &f;
            b[r] -= v;
        }
    }
    Some(b)
}

fn normalize(c: Vec<Q>) -> Poly<Q> {
    let lead = c.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Q::one);
    let mut full = vec![Q::zero(), Q::zero()];
    full.extend(c.into_iter().map(|x| x / &lead));
    Poly::new(full)
}

/// Maximizes the functional over `span{X^2, ..., X^max_degree}`. The maximum
/// of `L^2 / Q` is `b^T A^{-1} b`, attained at `A^{-1} b`.
pub fn optimize(kind: Kind, delta: &Q, max_degree: usize) -> Result<Optimum, OptimizeError> {
    if max_degree < 2 {
        return Err(OptimizeError::Degree(max_degree));
    }
    let f = DensityFunctional::new(kind, delta.clone())?;
    let idx: Vec<usize> = (2..=max_degree).collect();
    let a: Vec<Vec<Q>> = idx.iter().map(|&i| idx.iter().map(|&j| f.gram_entry(i, j)).collect()).collect();
    let b: Vec<Q> = idx.iter().map(|&i| f.linear_basis(i)).collect();
    let x = solve(a, b.clone()).ok_or(OptimizeError::Singular(max_degree))?;
    let r: Q = b.iter().zip(&x).fold(Q::zero(), |acc, (u, v)| acc + u * v);
    if r.is_zero() {
        return Err(OptimizeError::Degenerate);
    }
    let poly = normalize(x);
    let value = DensityFunctional::value_from_ratio(&r);
    debug_assert_eq!(f.value(&poly).as_ref(), Ok(&value));
    Ok(Optimum { kind, delta: delta.clone(), degree: max_degree, poly, value })
}

/// Residuals of the stationarity system for the derivative functional at
/// `Delta = 1`: `(f(1)+f'(1)) f''' + ||f''||^2` (a polynomial, zero for a
/// cubic maximizer) and `(f(1)+f'(1)) f''(1) - ||f''||^2`.
pub fn euler_lagrange_residual(p: &Poly<Q>) -> (Poly<Q>, Q) {
    let one = Q::one();
    let s = p.eval(&one) + p.derivative().eval(&one);
    let pp = p.derivative().derivative();
    let norm = (&pp * &pp).integral01();
    let first = &pp.derivative().scale(&s) + &Poly::constant(norm.clone());
    let second = &s * pp.eval(&one) - norm;
    (first, second)
}

/// Stationarity of `L^2 / Q` on the monomial basis:
/// `Q(P) b - L(P) A c`, which vanishes exactly at a maximizer.
pub fn stationarity_residual(kind: Kind, delta: &Q, p: &Poly<Q>) -> Result<Vec<Q>, OptimizeError> {
    let f = DensityFunctional::new(kind, delta.clone())?;
    check_constraint(p)?;
    let deg = p.degree().unwrap_or(2);
    let (l, qv) = (f.linear(p), f.quadratic(p));
    Ok((2..=deg)
        .map(|i| {
            let ac = (2..=deg).fold(Q::zero(), |acc, j| acc + f.gram_entry(i, j) * p.coeff(j));
            &qv * f.linear_basis(i) - &l * ac
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericOptimum {
    pub coeffs: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Floating-point cross-check: conjugate-gradient descent on
/// `c^T A c / 2 - b^T c`, whose minimizer is the maximizer direction.
pub fn numeric_optimize(kind: Kind, delta: f64, max_degree: usize, tol: f64) -> Result<NumericOptimum, OptimizeError> {
    if max_degree < 2 {
        return Err(OptimizeError::Degree(max_degree));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(OptimizeError::Delta(delta.to_string()));
    }
    let n = max_degree - 1;
    let scale = match kind {
        Kind::Plain => 1.0 / delta,
        Kind::Derivative => 1.0 / (3.0 * delta.powi(3)),
    };
    let a: Vec<Vec<f64>> = (2..=max_degree)
        .map(|i| {
            (2..=max_degree)
                .map(|j| {
                    let (i, j) = (i as f64, j as f64);
                    i * (i - 1.0) * j * (j - 1.0) / (i + j - 3.0) * scale
                })
                .collect()
        })
        .collect();
    let b: Vec<f64> = (2..=max_degree)
        .map(|i| match kind {
            Kind::Plain => i as f64,
            Kind::Derivative => 1.0 + i as f64 / delta,
        })
        .collect();
    let matvec = |v: &[f64]| -> Vec<f64> { a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect() };
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(x, y)| x * y).sum() };
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let b2 = rr;
    let mut it = 0;
    while it < 50 * n && rr > tol * tol * b2 {
        let ad = matvec(&d);
        let step = rr / dot(&d, &ad);
        for k in 0..n {
            x[k] += step * d[k];
            r[k] -= step * ad[k];
        }
        let next = dot(&r, &r);
        for k in 0..n {
            d[k] = r[k] + next / rr * d[k];
        }
        rr = next;
        it += 1;
    }
    let ratio = dot(&b, &x).powi(2) / dot(&x, &matvec(&x));
    Ok(NumericOptimum { coeffs: x, value: ratio / (2.0 * (1.0 + ratio)), iterations: it })
}

/// `M1^2 / M2`.
pub fn density_bound(m1: f64, m2: f64) -> Result<f64, OptimizeError> {
    if !(m2 > 0.0) {
        return Err(OptimizeError::NonPositive(m2));
    }
    Ok(m1 * m1 / m2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityBound {
    pub from_computed: f64,
    pub from_predicted: f64,
}

pub fn density_bound_from_moments(m1: &MomentReport, m2: &MomentReport) -> Result<DensityBound, OptimizeError> {
    Ok(DensityBound {
        from_computed: density_bound(m1.computed, m2.computed)?,
        from_predicted: density_bound(m1.predicted, m2.predicted)?,
    })
}

/// `M1^2 / M2` for the predicted main terms with every constant cancelled.
pub fn predicted_density(kind: Kind, delta: &Q, p: &Poly<Q>) -> Q {
    match kind {
        Kind::Plain => {
            let b1 = diagonal::first_bracket(p);
            &b1 * &b1 / (qi(2) * delta * delta * diagonal::second_bracket(p, delta))
        }
        Kind::Derivative => {
            let b1 = diagonal::first_derivative_bracket(p, delta);
            &b1 * &b1 / (qi(2) * diagonal::second_derivative_bracket(p, delta))
        }
    }
}

pub fn value_f64(v: &Q) -> f64 {
    q_to_f64(v)
}
