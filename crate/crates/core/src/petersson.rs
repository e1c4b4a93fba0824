//! Newform records, Hecke multiplicativity, functional-equation signs,
//! central values, both sides of the Petersson formula and the old-form
//! basis at a prime level.

use crate::arith::{factorize, gcd};
use crate::exact::{q, qi, Poly, Surd, Q};
use crate::field::{FieldElement, FieldError, NumberField};
use crate::ideals::{
    class_square_roots, enumerate_ideals, prime_splitting, principal_generator, IdealTable, Ideal,
    PrimeIdeal,
};
use crate::kloosterman::{
    default_weil_constant, kl_normalized_with, twist_generator, weil_bound, ClassicalKloosterman,
    KlError, NormalizedArgs,
};
use crate::special::gamma::gamma_real;
use crate::special::kernels::{kernel_f_core, kernel_f_log_core, kernel_g_core};
use crate::special::{bessel_j, kernel_f_closed_form, KernelBank, QuadBudget, SpecialError, ZetaData};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

/// Default allowance above the Ramanujan bound `|lambda(p)| <= 2`.
pub const RAMANUJAN_SLACK: f64 = 0.12;

#[derive(Debug, Error)]
pub enum PeterssonError {
    #[error("missing eigenvalue for prime {0}")]
    MissingPrime(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Kloosterman(#[from] KlError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One line of a newform fixture file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NewformRecord {
    pub field: String,
    pub level: u64,
    /// Prime-ideal key of the level when the norm alone is ambiguous.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_ideal: Option<String>,
    pub weight: Vec<u32>,
    pub label: String,
    pub ap: BTreeMap<String, i64>,
    pub sign: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_value: Option<f64>,
}

/// A record with analytically normalized eigenvalues.
#[derive(Clone, Debug)]
pub struct Newform {
    pub record: NewformRecord,
    /// Parallel weight.
    pub weight: u32,
    pub degree: usize,
    pub level_key: Option<String>,
    lambda: BTreeMap<String, f64>,
    /// Primes whose eigenvalue exceeds the Ramanujan bound plus slack.
    pub ramanujan_violations: Vec<String>,
}

fn parse_key_norm(field: &NumberField, key: &str) -> Result<u64, PeterssonError> {
    let (p, idx) = match key.split_once('.') {
        Some((p, i)) => (p, i.parse::<usize>().map_err(|_| PeterssonError::Invalid(key.into()))?),
        None => (key, 0),
    };
    let p: u64 = p.parse().map_err(|_| PeterssonError::Invalid(format!("prime key {key}")))?;
    let split = prime_splitting(field, p);
    split
        .get(idx)
        .map(|pr| pr.norm)
        .ok_or_else(|| PeterssonError::Invalid(format!("no prime ideal {key}")))
}

impl Newform {
    pub fn new(field: &NumberField, record: NewformRecord, slack: f64) -> Result<Self, PeterssonError> {
        let weight = *record
            .weight
            .first()
            .ok_or_else(|| PeterssonError::Invalid("empty weight".into()))?;
        if record.weight.len() != field.degree || record.weight.iter().any(|&k| k != weight) {
            return Err(PeterssonError::Invalid(format!(
                "weight {:?} is not parallel of length {}",
                record.weight, field.degree
            )));
        }
        if weight == 0 || weight % 2 == 1 {
            return Err(PeterssonError::Invalid(format!("weight {weight} is not even")));
        }
        if record.sign != 1 && record.sign != -1 {
            return Err(PeterssonError::Invalid(format!("sign {}", record.sign)));
        }
        let level_key = if record.level == 1 {
            None
        } else if let Some(k) = &record.level_ideal {
            Some(k.clone())
        } else {
            let fac = factorize(record.level);
            let p = match fac.as_slice() {
                [(p, 1)] => *p,
                [(p, 2)] if field.degree == 2 => *p,
                _ => return Err(PeterssonError::Invalid(format!("level {} is not prime", record.level))),
            };
            let cands: Vec<PrimeIdeal> =
                prime_splitting(field, p).into_iter().filter(|pr| pr.norm == record.level).collect();
            if cands.len() != 1 {
                return Err(PeterssonError::Invalid(format!("ambiguous level {}", record.level)));
            }
            Some(cands[0].key(field))
        };
        let mut lambda = BTreeMap::new();
        let mut violations = Vec::new();
        let half = (weight as f64 - 1.0) / 2.0;
        for (key, &a) in &record.ap {
            let norm = parse_key_norm(field, key)?;
            let l = a as f64 / (norm as f64).powf(half);
            let at_level = level_key.as_deref() == Some(key.as_str());
            if !at_level && l.abs() > 2.0 + slack {
                violations.push(key.clone());
            }
            lambda.insert(key.clone(), l);
        }
        Ok(Newform { record, weight, degree: field.degree, level_key, lambda, ramanujan_violations: violations })
    }

    pub fn label(&self) -> &str {
        &self.record.label
    }

    pub fn level_norm(&self) -> u64 {
        self.record.level
    }

    pub fn weights(&self) -> Vec<u32> {
        vec![self.weight; self.degree]
    }

    pub fn divides_level(&self, pr: &PrimeIdeal, field: &NumberField) -> bool {
        self.level_key.as_deref() == Some(pr.key(field).as_str())
    }

    pub fn lambda_prime(&self, pr: &PrimeIdeal, field: &NumberField) -> Result<f64, PeterssonError> {
        let key = pr.key(field);
        self.lambda.get(&key).copied().ok_or(PeterssonError::MissingPrime(key))
    }

    /// `lambda(p^e)` from `lambda(p^{j+1}) = lambda(p) lambda(p^j) - chi(p) lambda(p^{j-1})`.
    pub fn lambda_prime_power(&self, pr: &PrimeIdeal, e: u32, field: &NumberField) -> Result<f64, PeterssonError> {
        if e == 0 {
            return Ok(1.0);
        }
        let lp = self.lambda_prime(pr, field)?;
        let chi = if self.divides_level(pr, field) { 0.0 } else { 1.0 };
        let (mut prev, mut cur) = (1.0, lp);
        for _ in 1..e {
            (prev, cur) = (cur, lp * cur - chi * prev);
        }
        Ok(cur)
    }

    /// `lambda(n)` for `n` given by its prime factorization.
    pub fn hecke_extend(&self, factors: &[(PrimeIdeal, u32)], field: &NumberField) -> Result<f64, PeterssonError> {
        factors.iter().try_fold(1.0, |acc, (p, e)| Ok(acc * self.lambda_prime_power(p, *e, field)?))
    }

    /// `lambda(n)` for a rational integer `n` over the rationals.
    pub fn lambda_int(&self, n: u64, field: &NumberField) -> Result<f64, PeterssonError> {
        let fac: Vec<(PrimeIdeal, u32)> = factorize(n)
            .into_iter()
            .map(|(p, e)| (prime_splitting(field, p).remove(0), e))
            .collect();
        self.hecke_extend(&fac, field)
    }

    /// Eigenvalues on every ideal of an enumerated table.
    pub fn lambda_table(&self, table: &IdealTable, field: &NumberField) -> Result<Vec<f64>, PeterssonError> {
        let mut cache: BTreeMap<(usize, u32), f64> = BTreeMap::new();
        let mut out = Vec::with_capacity(table.ideals.len());
        for r in &table.ideals {
            let mut v = 1.0;
            for &(i, e) in &r.factors {
                let x = match cache.get(&(i, e)) {
                    Some(&x) => x,
                    None => {
                        let x = self.lambda_prime_power(&table.primes[i], e, field)?;
                        cache.insert((i, e), x);
                        x
                    }
                };
                v *= x;
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Sign of the functional equation: `-i^k lambda(q) N(q)^{1/2}` at a prime
    /// level, `i^k` at level one.
    pub fn sign_epsilon(&self, field: &NumberField) -> Result<i32, PeterssonError> {
        let ik = if (self.weight as usize * self.degree / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let eps = match &self.level_key {
            None => ik,
            Some(key) => {
                let l = *self.lambda.get(key).ok_or_else(|| PeterssonError::MissingPrime(key.clone()))?;
                -ik * l * (self.record.level as f64).sqrt()
            }
        };
        if (eps.abs() - 1.0).abs() > 1e-9 {
            return Err(PeterssonError::Inconsistent(format!("{}: |epsilon| = {}", self.label(), eps.abs())));
        }
        let _ = field;
        Ok(if eps > 0.0 { 1 } else { -1 })
    }

    /// Harmonic weight divided by the archimedean test-function mass, given
    /// `L(1, sym^2)`.
    pub fn harmonic_weight_shape(&self, field: &NumberField, l1_sym2: f64) -> f64 {
        let d = self.degree as i32;
        let k1 = self.weight as f64 - 1.0;
        let num = gamma_real(k1).powi(d) * (self.record.level as f64 + 1.0);
        num / (2.0 * (4.0 * PI).powf(k1 * d as f64) * (field.disc.abs() as f64) * l1_sym2)
    }
}

/// `lambda(m1) lambda(m2) = sum_{d | (m1, m2)} chi(d) lambda(m1 m2 d^{-2})`:
/// the factorizations `m1 m2 d^{-2}` of the right-hand side.
pub fn hecke_product_terms(
    m1: &[(PrimeIdeal, u32)],
    m2: &[(PrimeIdeal, u32)],
    level: Option<&PrimeIdeal>,
) -> Vec<Vec<(PrimeIdeal, u32)>> {
    let mut exps: BTreeMap<(u64, usize), (PrimeIdeal, u32, u32)> = BTreeMap::new();
    for (p, e) in m1 {
        exps.entry((p.p, p.index)).or_insert((p.clone(), 0, 0)).1 += e;
    }
    for (p, e) in m2 {
        exps.entry((p.p, p.index)).or_insert((p.clone(), 0, 0)).2 += e;
    }
    let mut out = vec![Vec::new()];
    for (p, a, b) in exps.into_values() {
        let top = if level == Some(&p) { 0 } else { a.min(b) };
        let mut next = Vec::new();
        for partial in &out {
            for j in 0..=top {
                let mut v: Vec<(PrimeIdeal, u32)> = partial.clone();
                let e = a + b - 2 * j;
                if e > 0 {
                    v.push((p.clone(), e));
                }
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Truncation controls for the geometric side.
#[derive(Clone, Debug)]
pub struct TruncationBudget {
    /// Cap on `N((c) cc)`.
    pub modulus_cap: u64,
    /// Largest power of the fundamental unit in the unit window.
    pub unit_window: u32,
    pub quotient_cap: u64,
    pub tol: f64,
    pub weil_constant: Option<f64>,
}

impl Default for TruncationBudget {
    fn default() -> Self {
        TruncationBudget {
            modulus_cap: 100_000,
            unit_window: 40,
            quotient_cap: crate::kloosterman::DEFAULT_QUOTIENT_CAP,
            tol: 1e-2,
            weil_constant: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricSide {
    pub value: f64,
    pub diagonal: f64,
    pub kloosterman_term: f64,
    /// Weil-times-Bessel majorant of the omitted moduli and units.
    pub tail_bound: f64,
    /// Change of the Kloosterman term between half and full modulus cap.
    pub tail_estimate: f64,
    pub moduli: usize,
    pub tolerance_met: bool,
}

/// Unit-window terms with Bessel majorant below this are dropped.
const UNIT_STOP: f64 = 1e-15;

/// `|J_nu(x)| <= min((x/2)^nu / nu!, 0.7858 x^{-1/3}, 1)`.
fn bessel_bound(nu: u32, x: f64) -> f64 {
    let small = (x / 2.0).powi(nu as i32) / gamma_real(nu as f64 + 1.0);
    small.min(0.7858 * x.powf(-1.0 / 3.0)).min(1.0)
}

/// `int_J^inf w(x) x^{-sigma} dx` with `w` a polynomial in `log x`, by
/// substitution `x = J e^u`.
fn log_weighted_tail(j: f64, sigma: f64, w: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 64.0;
    let mut s = 0.0;
    let mut u = 0.0;
    loop {
        let x = j * f64::exp(u);
        let f = w(x.ln()) * x.powf(1.0 - sigma);
        s += if u == 0.0 { f / 2.0 } else { f };
        if u > 10.0 && f < 1e-18 * s {
            break;
        }
        u += h;
        if u > 400.0 {
            break;
        }
    }
    s * h
}

/// Geometric side over the rationals through classical Kloosterman sums.
pub fn geometric_side_rational(m: u64, n: u64, q: u64, k: u32, budget: &TruncationBudget) -> GeometricSide {
    let nu = k - 1;
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let arg = 4.0 * PI * ((m * n) as f64).sqrt();
    let count = (budget.modulus_cap / q) as usize;
    let chunk = 256usize;
    let starts: Vec<usize> = (0..count.div_ceil(chunk)).collect();
    let partials: Vec<(f64, f64)> = starts
        .par_iter()
        .map_init(ClassicalKloosterman::new, |kl, &b| {
            let mut lo_half = 0.0;
            let mut all = 0.0;
            for j in (b * chunk + 1)..=((b + 1) * chunk).min(count) {
                let c = q * j as u64;
                let s = kl.value(m as i64, n as i64, c);
                let t = s / c as f64 * bessel_j(nu, arg / c as f64);
                all += t;
                if c <= budget.modulus_cap / 2 {
                    lo_half += t;
                }
            }
            (lo_half, all)
        })
        .collect();
    let half: f64 = partials.iter().map(|p| p.0).sum();
    let sum: f64 = partials.iter().map(|p| p.1).sum();
    let kl_term = sign * 2.0 * PI * sum;
    let diagonal = if m == n { 1.0 } else { 0.0 };
    let g = gcd(m as i128, n as i128) as f64;
    let jj = (count as f64).max(1.0);
    let sigma = nu as f64 + 0.5;
    let pref = 2.0 * PI * g.sqrt() * 2.0 * (arg / 2.0).powi(nu as i32) / gamma_real(nu as f64 + 1.0)
        * (q as f64).powf(-sigma);
    let tail_bound = pref * log_weighted_tail(jj, sigma + 1.0, |l| l + 2.0) * jj;
    let tail_estimate = (2.0 * PI * (sum - half)).abs();
    GeometricSide {
        value: diagonal + kl_term,
        diagonal,
        kloosterman_term: kl_term,
        tail_bound,
        tail_estimate,
        moduli: count,
        tolerance_met: tail_bound <= budget.tol,
    }
}

/// Re-choices that leave the geometric side invariant.
#[derive(Clone, Debug, Default)]
pub struct SideChoices {
    /// Totally positive element rescaling every class-square representative.
    pub rep_multiplier: Option<FieldElement>,
    /// Exponent `e` replacing the twist generator `nu` by `nu eps0^{2e}`.
    pub nu_unit_exponent: i64,
    /// Use the ideal-theoretic path even over the rationals.
    pub force_generic: bool,
}

/// Geometric side for integral `m`, `n` at prime level, parallel weight `k`.
pub fn geometric_side(
    field: &NumberField,
    m: &Ideal,
    n: &Ideal,
    level: &Ideal,
    k: u32,
    budget: &TruncationBudget,
    choices: &SideChoices,
) -> Result<GeometricSide, PeterssonError> {
    if field.degree == 1 && !choices.force_generic {
        let to_u = |i: &Ideal| i.scale.to_integer() as u64;
        return Ok(geometric_side_rational(to_u(m), to_u(n), to_u(level), k, budget));
    }
    if !m.is_integral() || !n.is_integral() {
        return Err(PeterssonError::Invalid("m and n must be integral".into()));
    }
    let d = field.degree;
    let nu_order = k - 1;
    let sign = if ((k as usize / 2) * d) % 2 == 0 { 1.0 } else { -1.0 };
    let cconst = sign * (2.0 * PI).powi(d as i32) / 2.0 / (field.disc.abs() as f64).sqrt();
    let weil_k = budget.weil_constant.unwrap_or_else(|| default_weil_constant(field));
    let nq = level.norm(field).to_integer() as u64;
    let mn = m.mul(n, field);
    let unit = if d == 1 { FieldElement::int(-1) } else { field.eps0.clone().expect("quadratic unit") };
    let eps_list = field.totally_positive_units_mod_squares();
    let reps: Vec<Ideal> = class_square_roots(field, &mn)
        .into_iter()
        .map(|c| match &choices.rep_multiplier {
            Some(x) => Ideal::principal(field, x).expect("nonzero").mul(&c, field),
            None => c,
        })
        .collect();
    let table = enumerate_ideals(field, (budget.modulus_cap / nq) as f64);
    let log_unit = if d == 1 { 1.0 } else { field.embed(&unit)[0].abs().ln() };
    let edge_ratio = (-(nu_order as f64 + 1.0 / 3.0) * log_unit).exp();

    let mut total = 0.0;
    let mut half = 0.0;
    let mut unit_tail = 0.0;
    let mut moduli = 0;
    let mut nu_norm = 1.0;
    for cc in &reps {
        let mut nu = twist_generator(field, m, n, cc)?;
        if choices.nu_unit_exponent != 0 {
            nu = field.mul(&nu, &field.pow(&unit, 2 * choices.nu_unit_exponent));
        }
        nu_norm = field.norm(&nu).to_f64().unwrap().abs();
        let cc_inv = cc.inv(field);
        let per_modulus = |rec: &crate::ideals::IdealRecord| -> Result<Option<(f64, f64, f64)>, PeterssonError> {
            let b = table.lattice(rec, field).mul(level, field);
            let Some(c0) = principal_generator(field, &b.mul(&cc_inv, field)) else { return Ok(None) };
            let c0 = field.balanced_representative(&c0)?.element;
            let nb = b.norm(field).to_f64().unwrap();
            let (mut contrib, mut tail) = (0.0, 0.0);
            for eps in &eps_list {
                let en: Vec<f64> = field.embed(&field.mul(eps, &nu));
                let term = |e: i64| -> Result<(f64, f64), PeterssonError> {
                    let c = if d == 1 { c0.clone() } else { field.mul(&c0, &field.pow(&unit, e)) };
                    let ce = field.embed(&c);
                    let xs: Vec<f64> = en.iter().zip(&ce).map(|(v, cj)| 4.0 * PI * v.sqrt() / cj.abs()).collect();
                    let bound: f64 = xs.iter().map(|&x| bessel_bound(nu_order, x)).product();
                    if bound < UNIT_STOP {
                        return Ok((0.0, bound));
                    }
                    let args = NormalizedArgs { alpha: eps, n, beta: &FieldElement::one(), m, c: &c, cc, level };
                    let ks = kl_normalized_with(field, &args, &nu, budget.quotient_cap)?;
                    let bes: f64 = xs.iter().map(|&x| bessel_j(nu_order, x)).product();
                    // c and -c contribute complex conjugates
                    Ok((2.0 * ks.re / nb * bes, bound))
                };
                if d == 1 {
                    contrib += term(0)?.0;
                    continue;
                }
                // centre of the window: both Bessel arguments of equal size
                let c0e = field.embed(&c0);
                let centre = ((en[0] / en[1]).sqrt().ln() + (c0e[1] / c0e[0]).abs().ln()) / (2.0 * log_unit);
                let e0 = centre.round() as i64;
                contrib += term(e0)?.0;
                for dir in [1i64, -1] {
                    let mut j = 1;
                    loop {
                        let (v, bound) = term(e0 + dir * j)?;
                        contrib += v;
                        if bound < UNIT_STOP {
                            break;
                        }
                        if j >= budget.unit_window as i64 {
                            // geometric continuation past the window edge
                            let args = NormalizedArgs { alpha: eps, n, beta: &FieldElement::one(), m, c: &c0, cc, level };
                            let w = weil_bound(field, &args, weil_k)?.min(nb);
                            tail += 2.0 * w / nb * bound * edge_ratio / (1.0 - edge_ratio);
                            break;
                        }
                        j += 1;
                    }
                }
            }
            Ok(Some((contrib, tail, nb)))
        };
        let rows: Vec<Result<Option<(f64, f64, f64)>, PeterssonError>> =
            table.ideals.par_iter().map(per_modulus).collect();
        for row in rows {
            let Some((contrib, tail, nb)) = row? else { continue };
            moduli += 1;
            total += contrib;
            unit_tail += tail;
            if nb as u64 <= budget.modulus_cap / 2 {
                half += contrib;
            }
        }
    }
    let kl_term = cconst * total;
    let diagonal = if m == n { 1.0 } else { 0.0 };

    // moduli beyond the cap: Weil bound times the unit-summed Bessel majorant
    let g = m.add(n, field).add(level, field).norm(field).to_f64().unwrap();
    let nuf = nu_order as f64;
    let lam_e = if d == 1 { f64::INFINITY } else { log_unit };
    let unit_sum = |big_n: f64| -> f64 {
        let p0 = ((2.0 * PI).powi(d as i32) * nu_norm.sqrt() / big_n).powf(nuf)
            / gamma_real(nuf + 1.0).powi(d as i32);
        if d == 1 {
            return 2.0 * p0;
        }
        let mid = if p0 < 1.0 { (1.0 / p0).ln() / (nuf * lam_e) + 1.0 } else { 1.0 };
        2.0 * p0.min(1.0) * (mid + 2.0 / (1.0 - (-nuf * lam_e).exp()))
    };
    let jj = (budget.modulus_cap / nq).max(1) as f64;
    // average density of tau over ideals of norm about e^l
    let weight = |l: f64| field.residue.powi(d as i32) * (l + 2.0);
    let h = 1.0 / 64.0;
    let mut modulus_tail = 0.0;
    let mut u = 0.0;
    while u < 400.0 {
        let x = jj * f64::exp(u);
        let big_n = x * nq as f64;
        let f = weil_k * g.sqrt() * big_n.powf(-0.5) * unit_sum(big_n) * weight(x.ln()) * x;
        modulus_tail += if u == 0.0 { f / 2.0 } else { f };
        if u > 10.0 && f < 1e-18 * modulus_tail {
            break;
        }
        u += h;
    }
    modulus_tail *= h * (eps_list.len() * reps.len()) as f64;
    let tail_bound = cconst.abs() * (modulus_tail + unit_tail);
    Ok(GeometricSide {
        value: diagonal + kl_term,
        diagonal,
        kloosterman_term: kl_term,
        tail_bound,
        tail_estimate: (cconst * (total - half)).abs(),
        moduli,
        tolerance_met: tail_bound <= budget.tol,
    })
}

/// Harmonic family at a fixed prime level and weight.
#[derive(Clone, Debug)]
pub struct SpectralFamily<'a> {
    pub level: PrimeIdeal,
    pub newforms: Vec<(&'a Newform, f64)>,
    /// Level-one forms with the common weight of `phi` and `psi` at the level.
    pub oldforms: Vec<(&'a Newform, f64)>,
}

impl SpectralFamily<'_> {
    pub fn validate(&self) -> Result<(), PeterssonError> {
        let mut weights = self.newforms.iter().chain(&self.oldforms).map(|(f, _)| f.weight);
        if let Some(w) = weights.next() {
            if weights.any(|x| x != w) {
                return Err(PeterssonError::Invalid("mixed weights".into()));
            }
        }
        if self.newforms.iter().any(|(f, _)| f.level_norm() != self.level.norm) {
            return Err(PeterssonError::Invalid("mixed levels".into()));
        }
        if self.oldforms.iter().any(|(f, _)| f.level_norm() != 1) {
            return Err(PeterssonError::Invalid("old forms must have level one".into()));
        }
        Ok(())
    }
}

/// `sum^h lambda(m) lambda(n)` including the old-form pairs.
pub fn spectral_side(
    field: &NumberField,
    family: &SpectralFamily,
    m: &[(PrimeIdeal, u32)],
    n: &[(PrimeIdeal, u32)],
) -> Result<f64, PeterssonError> {
    family.validate()?;
    let mut s = 0.0;
    for (f, w) in &family.newforms {
        s += w * f.hecke_extend(m, field)? * f.hecke_extend(n, field)?;
    }
    for (f, w) in &family.oldforms {
        let a = f.hecke_extend(m, field)? * f.hecke_extend(n, field)?;
        let b = oldform_basis_coeff(field, f, &family.level, m)? * oldform_basis_coeff(field, f, &family.level, n)?;
        s += w * (a + b);
    }
    Ok(s)
}

/// Local factor `L(1, sym^2)` at an unramified prime from `lambda(p)`.
pub fn local_sym2_at_one(lambda_p: f64, norm: f64) -> f64 {
    let x = 1.0 / norm;
    1.0 / ((1.0 - x) * (1.0 - (lambda_p * lambda_p - 2.0) * x + x * x))
}

/// `rho(q) = 1 - N(q) (lambda(q) / (N(q) + 1))^2`.
pub fn oldform_rho(lambda_q: f64, norm: f64) -> f64 {
    1.0 - norm * (lambda_q / (norm + 1.0)).powi(2)
}

/// Fourier coefficient at `n` of the second old-form basis vector attached
/// to a level-one form at the prime level `q`.
pub fn oldform_basis_coeff(
    field: &NumberField,
    form: &Newform,
    q: &PrimeIdeal,
    n: &[(PrimeIdeal, u32)],
) -> Result<f64, PeterssonError> {
    let nq = q.norm as f64;
    let lq = form.lambda_prime(q, field)?;
    let pref = (nq * (1.0 - nq.powi(-2)) * (1.0 + 1.0 / nq) * local_sym2_at_one(lq, nq)).sqrt();
    let ln = form.hecke_extend(n, field)?;
    let mut shifted = 0.0;
    if let Some(pos) = n.iter().position(|(p, _)| p == q) {
        let mut rest = n.to_vec();
        rest[pos].1 -= 1;
        shifted = form.hecke_extend(&rest, field)?;
    }
    Ok(pref * (-lq * ln / (nq + 1.0) + shifted))
}

/// Symbolic Gram data of the old-form pair, as polynomials in an
/// indeterminate `lambda(q)` over `Q(sqrt N(q))`.
#[derive(Clone, Debug)]
pub struct OldformGram {
    /// `<psi, phi>` up to the positive normalization.
    pub cross: Poly<Surd>,
    /// `N <psi~, psi~> - rho` with `psi~` the unnormalized combination.
    pub norm_residual: Poly<Surd>,
}

pub fn oldform_gram(norm: i64) -> OldformGram {
    let r = norm;
    let sq = |a: Q| Surd::rational(a, r);
    let lam = Poly::<Surd>::x();
    let nq = qi(norm);
    let inv_n1 = q(1, norm + 1);
    // <u,u> = <v,v> = 1, <u,v> = sqrt(N) lambda / (N+1)
    let g_uv = lam.scale(&Surd::new(Q::zero(), inv_n1.clone(), r));
    let a = lam.scale(&sq(-inv_n1.clone()));
    let b = Poly::constant(Surd::new(Q::zero(), q(1, norm), r));
    let cross = &a + &(&b * &g_uv);
    let two = Poly::constant(sq(qi(2)));
    let psi_norm = &(&(&a * &a) + &(&(&two * &(&a * &b)) * &g_uv)) + &(&b * &b);
    let rho = &Poly::constant(sq(Q::one())) - &(&lam * &lam).scale(&sq(&nq * &inv_n1 * &inv_n1));
    let norm_residual = &psi_norm.scale(&sq(nq)) - &rho;
    OldformGram { cross, norm_residual }
}

/// Result of a smoothed central-value sum.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralValue {
    pub value: f64,
    /// Size of the terms beyond the kernel cutoff, bounded by the last
    /// included shell.
    pub tail_estimate: f64,
    pub terms: usize,
}

enum Kernel {
    ClosedF(u32),
    Bank(Box<KernelBank>),
}

impl Kernel {
    fn f(field: &NumberField, k: &[u32], budget: &QuadBudget) -> Self {
        if field.degree == 1 {
            Kernel::ClosedF(k[0])
        } else {
            Kernel::Bank(Box::new(KernelBank::new(kernel_f_core(k), budget.clone())))
        }
    }
    fn eval(&mut self, y: f64) -> Result<f64, PeterssonError> {
        match self {
            Kernel::ClosedF(k) => Ok(kernel_f_closed_form(y, *k)),
            Kernel::Bank(b) => Ok(b.eval(y)?.value),
        }
    }
}

/// Smallest `y` (doubling from `y0`) past which the kernel is below `rel`
/// times its value at `y0`.
fn kernel_cutoff(kernel: &mut Kernel, y0: f64, rel: f64) -> Result<f64, PeterssonError> {
    let v0 = kernel.eval(y0)?.abs();
    let mut y = y0;
    for _ in 0..60 {
        y *= 1.5;
        if kernel.eval(y)?.abs() < rel * v0 {
            return Ok(y);
        }
    }
    Ok(y)
}

fn level_and_sign(field: &NumberField, form: &Newform) -> Result<(f64, f64), PeterssonError> {
    Ok((form.level_norm() as f64, form.sign_epsilon(field)? as f64))
}

fn ideal_table_for(field: &NumberField, form: &Newform, x: f64) -> Result<(IdealTable, Vec<f64>), PeterssonError> {
    let table = enumerate_ideals(field, x);
    let lam = form.lambda_table(&table, field)?;
    Ok((table, lam))
}

/// `Lambda(1/2)` from the smoothed series with cutoff parameter `x_cut`:
/// `N^{1/4} sum lambda(n) n^{-1/2} [F(n / (X sqrt N)) + eps F(n X / sqrt N)]`.
pub fn central_value(
    field: &NumberField,
    form: &Newform,
    x_cut: f64,
    budget: &QuadBudget,
) -> Result<CentralValue, PeterssonError> {
    let (nq, eps) = level_and_sign(field, form)?;
    let k = form.weights();
    if eps < 0.0 {
        return Ok(CentralValue { value: 0.0, tail_estimate: 0.0, terms: 0 });
    }
    let mut kern = Kernel::f(field, &k, budget);
    let y_max = kernel_cutoff(&mut kern, 0.5, 1e-17)?;
    let scale = nq.sqrt();
    let n_max = y_max * scale * x_cut.max(1.0 / x_cut);
    let (table, lam) = ideal_table_for(field, form, n_max)?;
    let mut sum = 0.0;
    let mut shell = 0.0;
    for (r, l) in table.ideals.iter().zip(&lam) {
        let nn = r.norm as f64;
        let t = l / nn.sqrt() * (kern.eval(nn / (x_cut * scale))? + eps * kern.eval(nn * x_cut / scale)?);
        if nn > 0.9 * n_max {
            shell += t.abs();
        }
        sum += t;
    }
    Ok(CentralValue { value: nq.powf(0.25) * sum, tail_estimate: nq.powf(0.25) * shell, terms: table.ideals.len() })
}

/// `Lambda(1/2)^2 = 2 N^{1/2} sum lambda(n) tau(n) n^{-1/2} G(n / N)`.
pub fn central_value_squared(
    field: &NumberField,
    form: &Newform,
    budget: &QuadBudget,
) -> Result<CentralValue, PeterssonError> {
    let nq = form.level_norm() as f64;
    let k = form.weights();
    let zeta = ZetaData { disc: field.disc, removed_norm: (nq > 1.0).then_some(nq) };
    let mut kern = Kernel::Bank(Box::new(KernelBank::new(kernel_g_core(&k, &zeta), budget.clone())));
    let y_max = kernel_cutoff(&mut kern, 0.05, 1e-14)?;
    let n_max = y_max * nq;
    let (table, lam) = ideal_table_for(field, form, n_max)?;
    let mut sum = 0.0;
    let mut shell = 0.0;
    for (r, l) in table.ideals.iter().zip(&lam) {
        let nn = r.norm as f64;
        let t = l * table.tau(r) as f64 / nn.sqrt() * kern.eval(nn / nq)?;
        if nn > 0.9 * n_max {
            shell += t.abs();
        }
        sum += t;
    }
    let pref = 2.0 * nq.sqrt();
    Ok(CentralValue { value: pref * sum, tail_estimate: pref * shell, terms: table.ideals.len() })
}

/// `Lambda'(1/2) = (1 - eps) N^{1/4} sum lambda(n) n^{-1/2} Fd(n / sqrt N)`
/// with `Fd` the s-derivative kernel.
pub fn central_derivative(
    field: &NumberField,
    form: &Newform,
    budget: &QuadBudget,
) -> Result<CentralValue, PeterssonError> {
    let (nq, eps) = level_and_sign(field, form)?;
    if eps > 0.0 {
        return Ok(CentralValue { value: 0.0, tail_estimate: 0.0, terms: 0 });
    }
    let k = form.weights();
    let mut kf = Kernel::f(field, &k, budget);
    let y_max = kernel_cutoff(&mut kf, 0.5, 1e-17)?;
    let mut bank_f = KernelBank::new(kernel_f_core(&k), budget.clone());
    let mut bank_l = KernelBank::new(kernel_f_log_core(&k), budget.clone());
    let scale = nq.sqrt();
    let n_max = y_max * scale;
    let (table, lam) = ideal_table_for(field, form, n_max)?;
    let mut sum = 0.0;
    let mut shell = 0.0;
    for (r, l) in table.ideals.iter().zip(&lam) {
        let nn = r.norm as f64;
        let y = nn / scale;
        let fd = bank_l.eval(y)?.value - y.ln() * bank_f.eval(y)?.value;
        let t = l / nn.sqrt() * fd;
        if nn > 0.9 * n_max {
            shell += t.abs();
        }
        sum += t;
    }
    let pref = (1.0 - eps) * nq.powf(0.25);
    Ok(CentralValue { value: pref * sum, tail_estimate: pref * shell, terms: table.ideals.len() })
}

/// Harmonic weights of a two-form family solved from the geometric side at
/// `(1,1)` and `(1,p)`.
pub fn calibrate_two_weights(
    field: &NumberField,
    forms: [&Newform; 2],
    p: u64,
    g11: f64,
    g1p: f64,
) -> Result<[f64; 2], PeterssonError> {
    let a = forms[0].lambda_int(p, field)?;
    let b = forms[1].lambda_int(p, field)?;
    if (a - b).abs() < 1e-12 {
        return Err(PeterssonError::Invalid("eigenvalues coincide at the calibration prime".into()));
    }
    // w_a + w_b = g11, a w_a + b w_b = g1p
    let wa = (g1p - b * g11) / (a - b);
    Ok([wa, g11 - wa])
}
