//! Euler-product Dirichlet series of the moment computations. Each series is
//! evaluated twice: as a truncated multi-sum over ideals in a norm box, and as
//! a zeta quotient times a truncated Euler product of its local factor.

use super::diagonal::merge;
use crate::field::NumberField;
use crate::ideals::{enumerate_ideals, prime_ideals_up_to, IdealRecord, IdealTable, PrimeIdeal};
use crate::special::ZetaData;
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBudget {
    /// Every summation variable runs over ideals of norm at most this.
    pub box_norm: u64,
    /// Euler products run over prime ideals of norm at most this.
    pub prime_norm: u64,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        SeriesBudget { box_norm: 200, prime_norm: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEval {
    /// Box multi-sum; absent outside the region of absolute convergence.
    pub series: Option<Complex64>,
    /// Bound on the omitted terms, from a multiplicative majorant.
    pub series_tail: f64,
    /// Zeta quotient times the truncated Euler product; absent at a zeta pole.
    pub factored: Option<Complex64>,
    pub factored_tail: f64,
    /// The regular part `eta` as a truncated Euler product.
    pub eta: Complex64,
    pub eta_tail: f64,
}

impl SeriesEval {
    pub fn difference(&self) -> Option<f64> {
        Some((self.series? - self.factored?).norm())
    }

    /// Whether both routes agree within the sum of their tails.
    pub fn consistent(&self) -> Option<bool> {
        Some(self.difference()? <= self.series_tail + self.factored_tail)
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `N^{-a}`.
fn pw(norm: f64, a: Complex64) -> Complex64 {
    (-a * norm.ln()).exp()
}

fn psi(norm: f64) -> f64 {
    1.0 + 1.0 / norm
}

fn one() -> Complex64 {
    c(1.0)
}

// ---------------------------------------------------------------- local factors

/// `1 - N^{-(1+s+t)} / psi(p)`, or without the `psi`.
pub fn d1_local(norm: f64, s: Complex64, t: Complex64, with_psi: bool) -> Complex64 {
    let x = pw(norm, one() + s + t);
    one() - if with_psi { x / psi(norm) } else { x }
}

pub fn d2_local(norm: f64, s: Complex64, t1: Complex64, t2: Complex64) -> Complex64 {
    let ps = psi(norm);
    let x12 = pw(norm, one() + (t1 + t2));
    let x1 = pw(norm, one() + s + t1);
    let x2 = pw(norm, one() + s + t2);
    let x3 = pw(norm, c(2.0) + s * 2.0 + (t1 + t2));
    one() + x12 / (ps * ps) - (x1 + x2) * 2.0 / ps + x3 * 3.0 / (ps * ps)
}

fn level_factor(norm: f64, u: Complex64, at_level: bool) -> Complex64 {
    if at_level {
        one()
    } else {
        (one() - pw(norm, c(2.0) + u * 2.0)).inv()
    }
}

/// Displayed local factor of the three-variable series.
pub fn f3_local(norm: f64, s: Complex64, t: Complex64, u: Complex64, at_level: bool) -> Complex64 {
    let ps = psi(norm);
    let ym = pw(norm, one() + s + t) / ps;
    let yd = pw(norm, one() + t + u / 2.0) / ps;
    let xf = pw(norm, one() + s + u / 2.0);
    let z = (one() - pw(norm, c(2.0) + s * 2.0 + u)).inv();
    level_factor(norm, u, at_level) * z * (one() - ym - yd * xf)
}

fn mu_local(e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => -1.0,
        _ => 0.0,
    }
}

fn psi_local(norm: f64, e: u32) -> f64 {
    if e == 0 {
        1.0
    } else {
        psi(norm)
    }
}

const LOCAL_CAP: u32 = 120;

/// Three-variable local factor by enumerating exponents of `e, m, d, f`
/// with `f + d` even.
pub fn f3_local_brute(norm: f64, s: Complex64, t: Complex64, u: Complex64, at_level: bool) -> Complex64 {
    let mut e_sum = Complex64::new(0.0, 0.0);
    for e in 0..if at_level { 1 } else { LOCAL_CAP } {
        e_sum += pw(norm, (c(2.0) + u * 2.0) * e as f64);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for m in 0..3u32 {
        for d in 0..3u32 {
            let coef = mu_local(m + d) / psi_local(norm, m + d);
            if coef == 0.0 {
                continue;
            }
            let base = pw(norm, (one() + s + t) * m as f64 + (one() + t + u / 2.0) * d as f64);
            for f in (0..LOCAL_CAP).filter(|f| (f + d) % 2 == 0) {
                total += base * coef * pw(norm, (one() + s + u / 2.0) * f as f64);
            }
        }
    }
    e_sum * total
}

/// Displayed local factor of the four-variable series.
pub fn f4_local(norm: f64, s: Complex64, t1: Complex64, t2: Complex64, u: Complex64, at_level: bool) -> Complex64 {
    let ps = psi(norm);
    let big = pw(norm, (one() + s + u / 2.0) * 2.0);
    let x = pw(norm, one() + s + u / 2.0);
    let a = |p: Complex64, q: Complex64| p / (one() - big) + q / ((one() - big) * (one() - big));
    let two = c(2.0);
    let mut r = a(one(), big * 2.0);
    r += pw(norm, one() + t1 + t2) / (ps * ps) * a(one(), big * 2.0);
    r -= (pw(norm, one() + s + t1) + pw(norm, one() + s + t2)) / ps * a(two, big * 2.0);
    r -= (pw(norm, one() + u / 2.0 + t1) + pw(norm, one() + u / 2.0 + t2)) / ps * a(x, x * (one() + big));
    r += pw(norm, two + s + u / 2.0 + t1 + t2) / (ps * ps) * a(x * 2.0, x * (one() + big));
    r += pw(norm, two + s * 2.0 + t1 + t2) / (ps * ps) * a(c(3.0), big * 2.0);
    r += pw(norm, two + u + t1 + t2) / (ps * ps) * a(one(), big * 2.0);
    level_factor(norm, u, at_level) * r
}

/// Four-variable local factor by enumerating exponents of `e, m, d, D, f`
/// with `f + D` even and the splittings `m1 + m2 = m + D`.
pub fn f4_local_brute(
    norm: f64,
    s: Complex64,
    t1: Complex64,
    t2: Complex64,
    u: Complex64,
    at_level: bool,
) -> Complex64 {
    let mut e_sum = Complex64::new(0.0, 0.0);
    for e in 0..if at_level { 1 } else { LOCAL_CAP } {
        e_sum += pw(norm, (c(2.0) + u * 2.0) * e as f64);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for m in 0..4u32 {
        for d in 0..2u32 {
            for big_d in 0..4u32 {
                let mut inner = Complex64::new(0.0, 0.0);
                for m1 in 0..=m + big_d {
                    let m2 = m + big_d - m1;
                    let a = mu_local(m1 + d) * mu_local(m2 + d);
                    if a == 0.0 {
                        continue;
                    }
                    let w = a / (psi_local(norm, m1 + d) * psi_local(norm, m2 + d));
                    inner += pw(norm, t1 * m1 as f64 + t2 * m2 as f64) * w;
                }
                if inner.norm() == 0.0 {
                    continue;
                }
                let base = pw(
                    norm,
                    (one() + s) * m as f64 + (one() + t1 + t2) * d as f64 + (one() + u / 2.0) * big_d as f64,
                );
                for f in (0..LOCAL_CAP).filter(|f| (f + big_d) % 2 == 0) {
                    let tau = (m + f + 1) as f64;
                    total += inner * base * tau * pw(norm, (one() + s + u / 2.0) * f as f64);
                }
            }
        }
    }
    e_sum * total
}

// ---------------------------------------------------------------- products

/// `prod_{N(p) <= P} eta_p` with a tail estimate from the top quarter of
/// the prime range.
fn euler_product<E>(field: &NumberField, prime_norm: u64, level: Option<&PrimeIdeal>, eta_local: E) -> (Complex64, f64)
where
    E: Fn(f64, bool) -> Complex64,
{
    let mut prod = one();
    let mut window = 0.0;
    for pr in prime_ideals_up_to(field, prime_norm) {
        let at_level = level == Some(&pr);
        let v = eta_local(pr.norm as f64, at_level);
        prod *= v;
        if 4 * pr.norm > prime_norm {
            window += v.ln().norm();
        }
    }
    // for local deviations decaying at least like N^{-3/2} the omitted
    // primes contribute no more than the top quarter
    (prod, prod.norm() * window.exp_m1())
}

fn zeta(field: &NumberField, w: Complex64, removed: Option<f64>) -> Option<Complex64> {
    if (w - one()).norm() < 1e-12 {
        return None;
    }
    Some(ZetaData { disc: field.disc, removed_norm: removed }.value(w))
}

// ---------------------------------------------------------------- box sums

#[derive(Clone, Copy)]
enum Weight {
    One,
    Tau,
    TauSquared,
}

/// `(full sum, omitted part)` of a majorant `sum w(n) N(n)^{-sigma}` over a box.
fn majorant(field: &NumberField, table: &IdealTable, sigma: f64, w: Weight) -> (f64, f64) {
    let z = |x: f64| ZetaData { disc: field.disc, removed_norm: None }.value(c(x)).re;
    let full = match w {
        Weight::One => z(sigma),
        Weight::Tau => z(sigma).powi(2),
        Weight::TauSquared => z(sigma).powi(4) / z(2.0 * sigma),
    };
    let partial: f64 = table
        .ideals
        .iter()
        .map(|r| {
            let tau = table.tau(r) as f64;
            let wt = match w {
                Weight::One => 1.0,
                Weight::Tau => tau,
                Weight::TauSquared => tau * tau,
            };
            wt * (r.norm as f64).powf(-sigma)
        })
        .sum();
    (full, (full - partial).max(0.0))
}

fn box_tail(parts: &[(f64, f64)]) -> f64 {
    let all: f64 = parts.iter().map(|p| p.0).product();
    let kept: f64 = parts.iter().map(|p| p.0 - p.1).product();
    (all - kept).max(0.0)
}

fn squarefree(r: &IdealRecord) -> bool {
    r.factors.iter().all(|&(_, e)| e == 1)
}

fn coprime(a: &[(usize, u32)], b: &[(usize, u32)]) -> bool {
    a.iter().all(|(i, _)| b.iter().all(|(j, _)| i != j))
}

fn is_square(f: &[(usize, u32)]) -> bool {
    f.iter().all(|&(_, e)| e % 2 == 0)
}

fn tau_of(f: &[(usize, u32)]) -> f64 {
    f.iter().map(|&(_, e)| e as f64 + 1.0).product()
}

fn norm_pow(r: &IdealRecord, w: Complex64) -> Complex64 {
    pw(r.norm as f64, w)
}

/// `sum_{(e, q) = 1} N(e)^{-w}` over the box.
fn coprime_zeta_sum(table: &IdealTable, w: Complex64, level_index: Option<usize>) -> Complex64 {
    table
        .ideals
        .iter()
        .filter(|r| level_index.is_none_or(|li| r.factors.iter().all(|&(i, _)| i != li)))
        .map(|r| norm_pow(r, w))
        .sum()
}

fn level_index(table: &IdealTable, level: Option<&PrimeIdeal>) -> Option<usize> {
    level.and_then(|l| table.prime_index(l))
}

// ---------------------------------------------------------------- the series

/// `sum mu(m) / (psi(m) N(m)^{1+s+t}) = zeta_F(1+s+t)^{-1} eta_1(s, t)`;
/// with `with_psi = false` the series is `1/zeta_F(1+s+t)` and `eta_1 = 1`.
pub fn dirichlet_d1(
    field: &NumberField,
    s: Complex64,
    t: Complex64,
    with_psi: bool,
    budget: &SeriesBudget,
) -> SeriesEval {
    let w = one() + s + t;
    let (eta, eta_tail) = euler_product(field, budget.prime_norm, None, |n, _| {
        d1_local(n, s, t, with_psi) / (one() - pw(n, w))
    });
    let factored = zeta(field, w, None).map(|z| eta / z);
    let factored_tail = factored.map_or(0.0, |f| eta_tail * f.norm() / eta.norm().max(f64::MIN_POSITIVE));
    let (series, series_tail) = if w.re > 1.0 && budget.box_norm > 0 {
        let table = enumerate_ideals(field, budget.box_norm as f64);
        let sum: Complex64 = table
            .ideals
            .iter()
            .filter(|r| squarefree(r))
            .map(|r| {
                let p = if with_psi { table.psi(r) } else { 1.0 };
                norm_pow(r, w) * (table.moebius(r) as f64 / p)
            })
            .sum();
        (Some(sum), box_tail(&[majorant(field, &table, w.re, Weight::One)]))
    } else {
        (None, 0.0)
    };
    SeriesEval { series, series_tail, factored, factored_tail, eta, eta_tail }
}

/// `D_2(s, t1, t2) = zeta_F(1+t1+t2) / (zeta_F(1+s+t1)^2 zeta_F(1+s+t2)^2) eta_2`.
pub fn dirichlet_d2(
    field: &NumberField,
    s: Complex64,
    t1: Complex64,
    t2: Complex64,
    budget: &SeriesBudget,
) -> SeriesEval {
    let (w12, w1, w2) = (one() + (t1 + t2), one() + s + t1, one() + s + t2);
    let (eta, eta_tail) = euler_product(field, budget.prime_norm, None, |n, _| {
        let l1 = one() - pw(n, w1);
        let l2 = one() - pw(n, w2);
        d2_local(n, s, t1, t2) * (one() - pw(n, w12)) / ((l1 * l2) * (l1 * l2))
    });
    let factored = match (zeta(field, w12, None), zeta(field, w1, None), zeta(field, w2, None)) {
        (Some(a), Some(b), Some(c2)) => Some(eta * a / ((b * c2) * (b * c2))),
        _ => None,
    };
    let factored_tail = factored.map_or(0.0, |f| eta_tail * f.norm() / eta.norm().max(f64::MIN_POSITIVE));
    let converge = w12.re > 1.0 && w1.re > 1.0 && w2.re > 1.0 && budget.box_norm > 0;
    let (series, series_tail) = if converge {
        let table = enumerate_ideals(field, budget.box_norm as f64);
        let sq: Vec<&IdealRecord> = table.ideals.iter().filter(|r| squarefree(r)).collect();
        let psi_of: Vec<f64> = sq.iter().map(|r| table.psi(r)).collect();
        let mu_of: Vec<f64> = sq.iter().map(|r| table.moebius(r) as f64).collect();
        let p12: Vec<Complex64> = sq.iter().map(|r| norm_pow(r, w12)).collect();
        let p1: Vec<Complex64> = sq.iter().map(|r| norm_pow(r, w1)).collect();
        let p2: Vec<Complex64> = sq.iter().map(|r| norm_pow(r, w2)).collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for (id, d) in sq.iter().enumerate() {
            let dd = psi_of[id] * psi_of[id];
            for (i1, m1) in sq.iter().enumerate() {
                if !coprime(&m1.factors, &d.factors) {
                    continue;
                }
                for (i2, m2) in sq.iter().enumerate() {
                    if !coprime(&m2.factors, &d.factors) {
                        continue;
                    }
                    let tau = tau_of(&merge(&m1.factors, &m2.factors));
                    let coef = mu_of[i1] * mu_of[i2] * tau / (psi_of[i1] * psi_of[i2] * dd);
                    sum += p12[id] * p1[i1] * p2[i2] * coef;
                }
            }
        }
        let tail = box_tail(&[
            majorant(field, &table, w12.re, Weight::One),
            majorant(field, &table, w1.re, Weight::Tau),
            majorant(field, &table, w2.re, Weight::Tau),
        ]);
        (Some(sum), tail)
    } else {
        (None, 0.0)
    };
    SeriesEval { series, series_tail, factored, factored_tail, eta, eta_tail }
}

/// Three-variable series over `e` prime to `q` and `m, d, f` with `f d` a
/// square: `zeta^{(q)}(2+2u) zeta(2+2s+u) zeta(1+s+t)^{-1} eta_3`.
pub fn dirichlet_f3(
    field: &NumberField,
    level: &PrimeIdeal,
    s: Complex64,
    t: Complex64,
    u: Complex64,
    budget: &SeriesBudget,
) -> SeriesEval {
    let (we, wm, wd, wf) = (c(2.0) + u * 2.0, one() + s + t, one() + t + u / 2.0, one() + s + u / 2.0);
    let wz = c(2.0) + s * 2.0 + u;
    let (eta, eta_tail) = euler_product(field, budget.prime_norm, Some(level), |n, at| {
        let e = level_factor(n, u, at);
        f3_local(n, s, t, u, at) * (one() - pw(n, wz)) * (one() - pw(n, wm)).inv() / e
    });
    let factored = match (zeta(field, we, Some(level.norm as f64)), zeta(field, wz, None), zeta(field, wm, None)) {
        (Some(a), Some(b), Some(z)) => Some(eta * a * b / z),
        _ => None,
    };
    let factored_tail = factored.map_or(0.0, |f| eta_tail * f.norm() / eta.norm().max(f64::MIN_POSITIVE));
    let converge = [we, wm, wd, wf].iter().all(|w| w.re > 1.0) && budget.box_norm > 0;
    let (series, series_tail) = if converge {
        let table = enumerate_ideals(field, budget.box_norm as f64);
        let e_sum = coprime_zeta_sum(&table, we, level_index(&table, Some(level)));
        let mut rest = Complex64::new(0.0, 0.0);
        for m in table.ideals.iter().filter(|r| squarefree(r)) {
            for d in table.ideals.iter().filter(|r| squarefree(r)) {
                if !coprime(&m.factors, &d.factors) {
                    continue;
                }
                let md = merge(&m.factors, &d.factors);
                let coef = crate::ideals::moebius_of(&md) as f64 / (table.psi(m) * table.psi(d));
                let head = norm_pow(m, wm) * norm_pow(d, wd) * coef;
                for f in &table.ideals {
                    if is_square(&merge(&f.factors, &d.factors)) {
                        rest += head * norm_pow(f, wf);
                    }
                }
            }
        }
        let tail = box_tail(&[
            majorant(field, &table, we.re, Weight::One),
            majorant(field, &table, wm.re, Weight::One),
            majorant(field, &table, wd.re, Weight::One),
            majorant(field, &table, wf.re, Weight::One),
        ]);
        (Some(e_sum * rest), tail)
    } else {
        (None, 0.0)
    };
    SeriesEval { series, series_tail, factored, factored_tail, eta, eta_tail }
}

/// Splittings `m1 m2 = n` with `m1 d`, `m2 d` squarefree:
/// `sum mu(m1 d) mu(m2 d) / (psi(m1 d) psi(m2 d)) N(m1)^{-t1} N(m2)^{-t2}`.
fn split_sum(
    table: &IdealTable,
    n: &[(usize, u32)],
    d: &[(usize, u32)],
    t1: Complex64,
    t2: Complex64,
) -> Complex64 {
    let psi_d: f64 = d.iter().map(|&(i, _)| psi(table.primes[i].norm as f64)).product();
    let mut total = Complex64::new(0.0, 0.0);
    let mut j = vec![0u32; n.len()];
    loop {
        let m1: Vec<(usize, u32)> = n.iter().zip(&j).filter(|(_, &x)| x > 0).map(|(&(i, _), &x)| (i, x)).collect();
        let m2: Vec<(usize, u32)> =
            n.iter().zip(&j).filter(|(&(_, e), &x)| e > x).map(|(&(i, e), &x)| (i, e - x)).collect();
        let a = merge(&m1, d);
        let b = merge(&m2, d);
        let (mu_a, mu_b) = (crate::ideals::moebius_of(&a), crate::ideals::moebius_of(&b));
        if mu_a != 0 && mu_b != 0 {
            let nrm = |f: &[(usize, u32)]| f.iter().map(|&(i, e)| (table.primes[i].norm as f64).powi(e as i32)).product::<f64>();
            let pa: f64 = m1.iter().map(|&(i, _)| psi(table.primes[i].norm as f64)).product();
            let pb: f64 = m2.iter().map(|&(i, _)| psi(table.primes[i].norm as f64)).product();
            total += pw(nrm(&m1), t1) * pw(nrm(&m2), t2) * ((mu_a * mu_b) as f64 / (pa * pb * psi_d * psi_d));
        }
        // next exponent vector
        let mut k = 0;
        loop {
            if k == n.len() {
                return total;
            }
            if j[k] < n[k].1 {
                j[k] += 1;
                break;
            }
            j[k] = 0;
            k += 1;
        }
    }
}

/// Four-variable series over `e` prime to `q` and `m, d, D, f` with `f D` a
/// square: `zeta^{(q)}(2+2u) zeta(2+2s+u) zeta(1+t1+t2) /
/// (zeta(1+s+t1)^2 zeta(1+s+t2)^2) eta_4`. The box sum needs `Re t_i >= 0`
/// for its majorant.
pub fn dirichlet_f4(
    field: &NumberField,
    level: &PrimeIdeal,
    s: Complex64,
    t1: Complex64,
    t2: Complex64,
    u: Complex64,
    budget: &SeriesBudget,
) -> SeriesEval {
    let we = c(2.0) + u * 2.0;
    let wz = c(2.0) + s * 2.0 + u;
    let (w12, w1, w2) = (one() + t1 + t2, one() + s + t1, one() + s + t2);
    let (wm, wf, wbig) = (one() + s, one() + s + u / 2.0, one() + u / 2.0);
    let (eta, eta_tail) = euler_product(field, budget.prime_norm, Some(level), |n, at| {
        let e = level_factor(n, u, at);
        let l1 = one() - pw(n, w1);
        let l2 = one() - pw(n, w2);
        f4_local(n, s, t1, t2, u, at) * (one() - pw(n, wz)) * (one() - pw(n, w12)) / (e * l1 * l1 * l2 * l2)
    });
    let zs = (
        zeta(field, we, Some(level.norm as f64)),
        zeta(field, wz, None),
        zeta(field, w12, None),
        zeta(field, w1, None),
        zeta(field, w2, None),
    );
    let factored = match zs {
        (Some(a), Some(b), Some(z12), Some(z1), Some(z2)) => Some(eta * a * b * z12 / (z1 * z1 * z2 * z2)),
        _ => None,
    };
    let factored_tail = factored.map_or(0.0, |f| eta_tail * f.norm() / eta.norm().max(f64::MIN_POSITIVE));
    let converge = [we, w12, wm, wf, wbig].iter().all(|w| w.re > 1.0)
        && t1.re >= 0.0
        && t2.re >= 0.0
        && budget.box_norm > 0;
    let (series, series_tail) = if converge {
        let table = enumerate_ideals(field, budget.box_norm as f64);
        let e_sum = coprime_zeta_sum(&table, we, level_index(&table, Some(level)));
        let mut rest = Complex64::new(0.0, 0.0);
        for d in table.ideals.iter().filter(|r| squarefree(r)) {
            let dpart = norm_pow(d, w12);
            for m in &table.ideals {
                for big_d in &table.ideals {
                    let n = merge(&m.factors, &big_d.factors);
                    if n.iter().any(|&(_, e)| e > 2) || !coprime(&n, &d.factors) {
                        continue;
                    }
                    let inner = split_sum(&table, &n, &d.factors, t1, t2);
                    if inner.norm() == 0.0 {
                        continue;
                    }
                    let head = dpart * inner * norm_pow(m, wm) * norm_pow(big_d, wbig);
                    for f in &table.ideals {
                        if is_square(&merge(&f.factors, &big_d.factors)) {
                            let tau = tau_of(&merge(&m.factors, &f.factors));
                            rest += head * norm_pow(f, wf) * tau;
                        }
                    }
                }
            }
        }
        let tail = box_tail(&[
            majorant(field, &table, we.re, Weight::One),
            majorant(field, &table, w12.re, Weight::One),
            majorant(field, &table, wm.re, Weight::TauSquared),
            majorant(field, &table, wbig.re, Weight::Tau),
            majorant(field, &table, wf.re, Weight::Tau),
        ]);
        (Some(e_sum * rest), tail)
    } else {
        (None, 0.0)
    };
    SeriesEval { series, series_tail, factored, factored_tail, eta, eta_tail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDescriptor};
    use crate::ideals::prime_splitting;
    use std::f64::consts::PI;

    fn rationals() -> NumberField {
        make_field(&FieldDescriptor::Rationals).unwrap()
    }

    fn z(x: f64) -> Complex64 {
        c(x)
    }

    #[test]
    fn d1_series_against_product() {
        let f = rationals();
        let b = SeriesBudget { box_norm: 1_000_000, prime_norm: 100_000 };
        let r = dirichlet_d1(&f, z(0.0), z(1.0), true, &b);
        assert!(r.difference().unwrap() < 1e-8, "{r:?}");
        assert!(r.consistent().unwrap());
    }

    #[test]
    fn d1_without_psi_is_inverse_zeta() {
        let f = rationals();
        let b = SeriesBudget { box_norm: 20_000, prime_norm: 1000 };
        let r = dirichlet_d1(&f, z(1.0), z(1.0), false, &b);
        assert!((r.eta - one()).norm() < 1e-15);
        assert!((r.factored.unwrap().re - 1.0 / 1.202_056_903_159_594_3).abs() < 1e-14);
        assert!(r.consistent().unwrap());
    }

    #[test]
    fn d1_limit_constant() {
        // D1(0,t)/t = zeta(2) (1 + c t + O(t^2)) with c near -1.33
        let f = rationals();
        let b = SeriesBudget { box_norm: 0, prime_norm: 100_000 };
        let slope = |t: f64| {
            let lim = dirichlet_d1(&f, z(0.0), z(t), true, &b).factored.unwrap().re / t;
            (lim / (PI * PI / 6.0) - 1.0) / t
        };
        let (a, c1) = (slope(1e-3), slope(1e-4));
        assert!((a - c1).abs() < 0.01 * c1.abs(), "{a} {c1}");
        assert!((c1 * 1e-4).abs() < 1e-3);
    }

    #[test]
    fn d2_eta_at_origin_and_brute_force() {
        let f = rationals();
        let r = dirichlet_d2(&f, z(0.0), z(0.0), z(0.0), &SeriesBudget { box_norm: 0, prime_norm: 10_000 });
        assert!((r.eta.re - (PI.powi(4) / 36.0)).abs() < 1e-4);
        assert!(r.factored.is_none());
        let r = dirichlet_d2(&f, z(1.0), z(1.0), z(1.0), &SeriesBudget { box_norm: 200, prime_norm: 10_000 });
        assert!(r.consistent().unwrap(), "{r:?}");
        assert!(r.difference().unwrap() < 1e-3);
    }

    #[test]
    fn d2_symmetric() {
        let f = rationals();
        let b = SeriesBudget { box_norm: 60, prime_norm: 2000 };
        let x = dirichlet_d2(&f, z(0.7), z(0.4), z(1.3), &b);
        let y = dirichlet_d2(&f, z(0.7), z(1.3), z(0.4), &b);
        assert_eq!(x.factored, y.factored);
        assert_eq!(x.eta, y.eta);
        assert!((x.series.unwrap() - y.series.unwrap()).norm() < 1e-12);
    }

    #[test]
    fn local_displays_match_enumeration() {
        let pts = [
            (z(0.0), z(0.0), z(0.0), z(0.0)),
            (z(0.3), z(0.2), z(0.5), z(0.4)),
            (Complex64::new(1.1, 0.5), z(0.7), Complex64::new(0.2, -1.0), z(0.9)),
        ];
        for n in [2.0, 3.0, 7.0, 25.0] {
            for &(s, t1, t2, u) in &pts {
                for at in [false, true] {
                    let a = f4_local(n, s, t1, t2, u, at);
                    let b = f4_local_brute(n, s, t1, t2, u, at);
                    assert!((a - b).norm() < 1e-12, "F4 at N = {n}: {a} vs {b}");
                    let a = f3_local(n, s, t1, u, at);
                    let b = f3_local_brute(n, s, t1, u, at);
                    assert!((a - b).norm() < 1e-12, "F3 at N = {n}: {a} vs {b}");
                }
            }
        }
        // 2^{-3} weighting at the origin: 8/27 for the prime 2
        assert!((f4_local(2.0, z(0.0), z(0.0), z(0.0), z(0.0), false).re - 8.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn three_and_four_variable_identities() {
        let f = rationals();
        let q = prime_splitting(&f, 11).remove(0);
        let b = SeriesBudget { box_norm: 0, prime_norm: 10_000 };
        let r3 = dirichlet_f3(&f, &q, z(0.0), z(0.0), z(0.0), &b);
        assert!((r3.eta - one()).norm() < 1e-12);
        let r4 = dirichlet_f4(&f, &q, z(0.0), z(0.0), z(0.0), z(0.0), &b);
        assert!((r4.eta.re - PI * PI / 6.0).abs() < 1e-4, "{}", r4.eta);
    }

    #[test]
    fn three_and_four_variable_box_sums() {
        let f = rationals();
        let q = prime_splitting(&f, 3).remove(0);
        let b = SeriesBudget { box_norm: 40, prime_norm: 5000 };
        let r3 = dirichlet_f3(&f, &q, z(1.5), z(1.0), z(1.2), &b);
        assert!(r3.consistent().unwrap(), "{r3:?}");
        let r4 = dirichlet_f4(&f, &q, z(1.5), z(0.5), z(0.8), z(1.2), &b);
        assert!(r4.consistent().unwrap(), "{r4:?}");
        assert!(r4.difference().unwrap() < 0.05 * r4.factored.unwrap().norm());
    }
}
