//! Symmetric-square coefficients `rho`, their Dirichlet inverse, and the
//! exponentially smoothed series `D_alpha`.

use super::MomentError;
use crate::exact::{q, qi, Poly, Q};
use crate::field::NumberField;
use crate::ideals::{enumerate_ideals, prime_ideals_up_to, PrimeIdeal};
use crate::petersson::{local_sym2_at_one, Newform};
use num_traits::Zero;
use std::collections::HashMap;

/// `rho(p^m) = sum_{2j <= m, (p^j, q) = 1} lambda(p^{2(m - 2j)})`.
pub fn symsq_local(form: &Newform, field: &NumberField, p: &PrimeIdeal, m: u32) -> Result<f64, MomentError> {
    let ramified = form.divides_level(p, field);
    let mut s = 0.0;
    for j in 0..=m / 2 {
        if j > 0 && ramified {
            break;
        }
        s += form.lambda_prime_power(p, 2 * (m - 2 * j), field)?;
    }
    Ok(s)
}

/// Local inverse: `1, -lambda(p^2), lambda(p^2), -1` at unramified primes,
/// `mu(p^m) N(p)^{-m}` at the level.
pub fn symsq_inverse_local(form: &Newform, field: &NumberField, p: &PrimeIdeal, m: u32) -> Result<f64, MomentError> {
    if form.divides_level(p, field) {
        return Ok(match m {
            0 => 1.0,
            1 => -1.0 / p.norm as f64,
            _ => 0.0,
        });
    }
    let l2 = form.lambda_prime_power(p, 2, field)?;
    Ok(match m {
        0 => 1.0,
        1 => -l2,
        2 => l2,
        3 => -1.0,
        _ => 0.0,
    })
}

pub fn symsq_coeff(form: &Newform, field: &NumberField, n: &[(PrimeIdeal, u32)]) -> Result<f64, MomentError> {
    n.iter().try_fold(1.0, |acc, (p, e)| Ok(acc * symsq_local(form, field, p, *e)?))
}

pub fn symsq_inverse_coeff(form: &Newform, field: &NumberField, n: &[(PrimeIdeal, u32)]) -> Result<f64, MomentError> {
    n.iter().try_fold(1.0, |acc, (p, e)| Ok(acc * symsq_inverse_local(form, field, p, *e)?))
}

/// `lambda(p^k)` for `k <= n` as polynomials in `lambda(p)` at an unramified prime.
pub fn hecke_polys(n: usize) -> Vec<Poly<Q>> {
    let mut out = vec![Poly::constant(qi(1)), Poly::x()];
    while out.len() <= n {
        let k = out.len();
        let next = &(&Poly::x() * &out[k - 1]) - &out[k - 2];
        out.push(next);
    }
    out.truncate(n + 1);
    out
}

/// Coefficients in degrees `0..=deg` of the product of the local `rho` series
/// and its claimed inverse, exact in the indeterminate `lambda(p)`. At the
/// level, `rho(q^m) = lambda(q)^{2m} = N(q)^{-m}` is rational.
pub fn local_inverse_product(norm: i64, ramified: bool, deg: usize) -> Vec<Poly<Q>> {
    let (rho, inv): (Vec<Poly<Q>>, Vec<Poly<Q>>) = if ramified {
        let rho = (0..=deg).map(|m| Poly::constant(q(1, norm.pow(m as u32)))).collect();
        let mut inv = vec![Poly::constant(qi(1)), Poly::constant(q(-1, norm))];
        inv.resize(deg + 1, Poly::zero());
        (rho, inv)
    } else {
        let h = hecke_polys(2 * deg);
        let rho = (0..=deg)
            .map(|m| (0..=m / 2).fold(Poly::zero(), |acc, j| &acc + &h[2 * (m - 2 * j)]))
            .collect();
        let l2 = h[2].clone();
        let mut inv = vec![Poly::constant(qi(1)), -&l2, l2, Poly::constant(qi(-1))];
        inv.resize(deg + 1, Poly::zero());
        (rho, inv)
    };
    (0..=deg)
        .map(|n| (0..=n).fold(Poly::zero(), |acc, i| &acc + &(&rho[i] * &inv[n - i])))
        .collect()
}

/// Whether the local product is `1 + O(X^{deg+1})` exactly.
pub fn local_inverse_holds(norm: i64, ramified: bool, deg: usize) -> bool {
    let c = local_inverse_product(norm, ramified, deg);
    c[0] == Poly::constant(qi(1)) && c[1..].iter().all(|p| p.is_zero())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DAlpha {
    pub value: f64,
    /// Effective length `N(q)^alpha`.
    pub length: f64,
    pub cutoff_norm: f64,
    pub terms: usize,
    pub tail_estimate: f64,
}

/// `sum rho(n) N(n)^{-1} exp(-N(n) / N(q)^alpha)`, truncated where the
/// exponential falls below `1e-17`.
pub fn d_alpha_series(form: &Newform, field: &NumberField, alpha: f64) -> Result<DAlpha, MomentError> {
    if !(alpha > 0.0) {
        return Err(MomentError::Precondition(format!("alpha = {alpha} must be positive")));
    }
    let length = (form.level_norm() as f64).powf(alpha);
    let cutoff = length * 17.0 * 10f64.ln();
    let table = enumerate_ideals(field, cutoff);
    let mut cache: HashMap<(usize, u32), f64> = HashMap::new();
    let (mut value, mut shell) = (0.0, 0.0);
    for r in &table.ideals {
        let mut rho = 1.0;
        for &(i, e) in &r.factors {
            let v = match cache.get(&(i, e)) {
                Some(&v) => v,
                None => {
                    let v = symsq_local(form, field, &table.primes[i], e)?;
                    cache.insert((i, e), v);
                    v
                }
            };
            rho *= v;
        }
        let n = r.norm as f64;
        let t = rho / n * (-n / length).exp();
        if n > 0.9 * cutoff {
            shell += t.abs();
        }
        value += t;
    }
    Ok(DAlpha { value, length, cutoff_norm: cutoff, terms: table.ideals.len(), tail_estimate: shell })
}

/// `L(1, sym^2)` as an Euler product over the primes of norm at most `x`.
pub fn l1_sym2_euler(form: &Newform, field: &NumberField, x: u64) -> Result<f64, MomentError> {
    let mut prod = 1.0;
    for p in prime_ideals_up_to(field, x) {
        let n = p.norm as f64;
        let l = form.lambda_prime(&p, field)?;
        prod *= if form.divides_level(&p, field) { 1.0 / (1.0 - l * l / n) } else { local_sym2_at_one(l, n) };
    }
    Ok(prod)
}

/// Whether every coefficient of a local product beyond degree 0 vanishes.
pub fn all_zero(c: &[Poly<Q>]) -> bool {
    c.iter().skip(1).all(|p| p.coeffs().iter().all(|x| x.is_zero()))
}
