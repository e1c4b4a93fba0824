//! Fractional ideals, prime splitting, multiplicative functions, truncated
//! Dedekind zeta values and narrow-class bookkeeping.

use crate::arith::{ext_gcd, legendre, primes_up_to, sqrt_mod};
use crate::field::{rat, rat_gcd, FieldElement, FieldError, NumberField, Rat};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IdealError {
    #[error("ideal {0} is not integral")]
    NotIntegral(String),
    #[error("continuation not supported: Re(s) = {0} <= 1")]
    Continuation(f64),
    #[error("zero ideal")]
    Zero,
}

/// `scale * (a Z + (b + omega) Z)`; for the rationals `a = 1`, `b = 0`.
///
/// The representation is canonical: `scale > 0`, `a >= 1`, `0 <= b < a`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Ideal {
    pub scale: Rat,
    pub a: i128,
    pub b: i128,
}

/// Hermite form `<(A, 0), (B, C)>` of a full-rank integer lattice in Z^2.
fn hnf2(vecs: &[(i128, i128)]) -> (i128, i128, i128) {
    let mut c = 0i128;
    let mut bez = (0i128, 0i128);
    for &(u, v) in vecs {
        if v == 0 {
            continue;
        }
        if c == 0 {
            c = v;
            bez = (u, v);
            continue;
        }
        let (g, x, y) = ext_gcd(bez.1, v);
        bez = (x * bez.0 + y * u, g);
        c = g;
    }
    if bez.1 < 0 {
        bez = (-bez.0, -bez.1);
        c = -c;
    }
    assert!(c > 0, "lattice is not full rank");
    let mut a = 0i128;
    for &(u, v) in vecs {
        let k = v / c;
        a = a.gcd(&(u - k * bez.0));
    }
    // the Bezout vector itself may carry a first coordinate not in the span yet
    assert!(a > 0, "lattice is not full rank");
    (a, bez.0.rem_euclid(a), c)
}

impl Ideal {
    pub fn unit() -> Self {
        Ideal { scale: Rat::one(), a: 1, b: 0 }
    }

    /// The rational ideal `(r)`, valid in every field.
    pub fn rational(r: Rat) -> Self {
        Ideal { scale: r.abs(), a: 1, b: 0 }
    }

    /// O-ideal whose Z-span is generated by `gens` (must be an O-module).
    pub fn from_z_span(field: &NumberField, gens: &[FieldElement]) -> Result<Self, IdealError> {
        if gens.iter().all(|g| g.is_zero()) {
            return Err(IdealError::Zero);
        }
        if field.degree == 1 {
            let g = gens.iter().fold(Rat::zero(), |acc, x| rat_gcd(&acc, &x.a));
            return Ok(Ideal::rational(g));
        }
        let l = gens
            .iter()
            .fold(1i128, |acc, x| acc.lcm(x.a.denom()).lcm(x.b.denom()));
        let ints: Vec<(i128, i128)> = gens
            .iter()
            .map(|x| ((x.a * rat(l)).to_integer(), (x.b * rat(l)).to_integer()))
            .collect();
        let (aa, bb, cc) = hnf2(&ints);
        debug_assert!(aa % cc == 0 && bb % cc == 0, "not an O-module");
        let a = aa / cc;
        Ok(Ideal { scale: Rat::new(cc, l), a, b: (bb / cc).rem_euclid(a) })
    }

    /// Ideal generated as an O-module by `gens`.
    pub fn generated_by(field: &NumberField, gens: &[FieldElement]) -> Result<Self, IdealError> {
        let w = FieldElement::ints(0, 1);
        let mut all = Vec::with_capacity(2 * gens.len());
        for g in gens {
            all.push(g.clone());
            if field.degree == 2 {
                all.push(field.mul(g, &w));
            }
        }
        Ideal::from_z_span(field, &all)
    }

    pub fn principal(field: &NumberField, x: &FieldElement) -> Result<Self, IdealError> {
        Ideal::generated_by(field, std::slice::from_ref(x))
    }

    /// Z-basis of the ideal.
    pub fn basis(&self, field: &NumberField) -> Vec<FieldElement> {
        if field.degree == 1 {
            return vec![FieldElement::new(self.scale, Rat::zero())];
        }
        vec![
            FieldElement::new(self.scale * rat(self.a), Rat::zero()),
            FieldElement::new(self.scale * rat(self.b), self.scale),
        ]
    }

    pub fn norm(&self, field: &NumberField) -> Rat {
        if field.degree == 1 {
            self.scale
        } else {
            self.scale * self.scale * rat(self.a)
        }
    }

    pub fn is_integral(&self) -> bool {
        self.scale.is_integer()
    }

    pub fn mul(&self, o: &Ideal, field: &NumberField) -> Ideal {
        if field.degree == 1 {
            return Ideal::rational(self.scale * o.scale);
        }
        let x = self.basis(field);
        let y = o.basis(field);
        let prods: Vec<FieldElement> =
            x.iter().flat_map(|p| y.iter().map(move |q| (p, q))).map(|(p, q)| field.mul(p, q)).collect();
        Ideal::from_z_span(field, &prods).expect("nonzero product")
    }

    pub fn pow(&self, e: u32, field: &NumberField) -> Ideal {
        (0..e).fold(Ideal::unit(), |acc, _| acc.mul(self, field))
    }

    pub fn add(&self, o: &Ideal, field: &NumberField) -> Ideal {
        let mut g = self.basis(field);
        g.extend(o.basis(field));
        Ideal::from_z_span(field, &g).expect("nonzero sum")
    }

    pub fn conj(&self, field: &NumberField) -> Ideal {
        if field.degree == 1 {
            return self.clone();
        }
        Ideal { scale: self.scale, a: self.a, b: (-self.b - field.t as i128).rem_euclid(self.a) }
    }

    pub fn inv(&self, field: &NumberField) -> Ideal {
        if field.degree == 1 {
            return Ideal::rational(self.scale.recip());
        }
        let n = self.norm(field);
        let c = self.conj(field);
        Ideal { scale: c.scale / n, ..c }
    }

    pub fn scaled(&self, r: &Rat) -> Ideal {
        Ideal { scale: self.scale * r.abs(), ..self.clone() }
    }

    pub fn contains(&self, x: &FieldElement, field: &NumberField) -> bool {
        if x.is_zero() {
            return true;
        }
        let u = x.a / self.scale;
        if field.degree == 1 {
            return x.b.is_zero() && u.is_integer();
        }
        let v = x.b / self.scale;
        if !u.is_integer() || !v.is_integer() {
            return false;
        }
        let (u, v) = (u.to_integer(), v.to_integer());
        (u - self.b * v).rem_euclid(self.a) == 0
    }

    /// `other ⊂ self`.
    pub fn divides(&self, other: &Ideal, field: &NumberField) -> bool {
        other.basis(field).iter().all(|g| self.contains(g, field))
    }

    pub fn coprime_to(&self, other: &Ideal, field: &NumberField) -> bool {
        self.add(other, field) == Ideal::unit()
    }

    /// Canonical string used for ordering and CSV output.
    pub fn encode(&self) -> String {
        format!("{}|{}|{}", self.scale, self.a, self.b)
    }

    /// Coordinates of `x` in the Z-basis of this ideal.
    pub fn coords_of(&self, x: &FieldElement, field: &NumberField) -> (Rat, Rat) {
        if field.degree == 1 {
            return (x.a / self.scale, Rat::zero());
        }
        let v = x.b / self.scale;
        let u = (x.a / self.scale - v * rat(self.b)) / rat(self.a);
        (u, v)
    }

    /// Representatives of `self / sub` for an ideal `sub ⊂ self`.
    pub fn quotient_reps(&self, sub: &Ideal, field: &NumberField) -> Vec<FieldElement> {
        let basis = self.basis(field);
        if field.degree == 1 {
            let k = (sub.scale / self.scale).to_integer();
            return (0..k).map(|i| basis[0].scale(&rat(i))).collect();
        }
        let sub_vecs: Vec<(i128, i128)> = sub
            .basis(field)
            .iter()
            .map(|g| {
                let (u, v) = self.coords_of(g, field);
                (u.to_integer(), v.to_integer())
            })
            .collect();
        let (aa, _bb, cc) = hnf2(&sub_vecs);
        let mut out = Vec::with_capacity((aa * cc) as usize);
        for j in 0..cc {
            for i in 0..aa {
                out.push(basis[0].scale(&rat(i)).add(&basis[1].scale(&rat(j))));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Position among the primes above `p`.
    pub index: usize,
    pub e: u32,
    pub f: u32,
    pub norm: u64,
    pub ideal: Ideal,
}

impl PrimeIdeal {
    /// Fixture key: `p` over the rationals, `p.i` otherwise.
    pub fn key(&self, field: &NumberField) -> String {
        if field.degree == 1 {
            self.p.to_string()
        } else {
            format!("{}.{}", self.p, self.index)
        }
    }
}

pub fn split_type(field: &NumberField, p: u64) -> SplitType {
    if field.degree == 1 {
        return SplitType::Split;
    }
    let disc = field.disc;
    if disc % p as i64 == 0 {
        return SplitType::Ramified;
    }
    if p == 2 {
        return if disc.rem_euclid(8) == 1 { SplitType::Split } else { SplitType::Inert };
    }
    if legendre(disc, p) == 1 {
        SplitType::Split
    } else {
        SplitType::Inert
    }
}

/// Roots of the minimal polynomial of omega modulo p, ascending.
fn omega_roots_mod(field: &NumberField, p: u64) -> Vec<i64> {
    // x^2 - t x + n
    let (t, n) = (field.t, field.n);
    let pi = p as i64;
    if p == 2 {
        return (0..2).filter(|&x| (x * x - t * x + n).rem_euclid(2) == 0).collect();
    }
    let inv2 = (pi + 1) / 2;
    let disc = (t * t - 4 * n).rem_euclid(pi);
    match sqrt_mod(disc, p) {
        None => vec![],
        Some(s) => {
            let s = s as i64;
            let mut r: Vec<i64> = [(t + s), (t - s)]
                .iter()
                .map(|v| (v.rem_euclid(pi) * inv2).rem_euclid(pi))
                .collect();
            r.sort();
            r.dedup();
            r
        }
    }
}

pub fn prime_splitting(field: &NumberField, p: u64) -> Vec<PrimeIdeal> {
    if field.degree == 1 {
        return vec![PrimeIdeal {
            p,
            index: 0,
            e: 1,
            f: 1,
            norm: p,
            ideal: Ideal::rational(rat(p as i128)),
        }];
    }
    let st = split_type(field, p);
    if st == SplitType::Inert {
        return vec![PrimeIdeal {
            p,
            index: 0,
            e: 1,
            f: 2,
            norm: p * p,
            ideal: Ideal::rational(rat(p as i128)),
        }];
    }
    let roots = omega_roots_mod(field, p);
    let e = if st == SplitType::Ramified { 2 } else { 1 };
    roots
        .iter()
        .enumerate()
        .map(|(i, &r)| PrimeIdeal {
            p,
            index: i,
            e,
            f: 1,
            norm: p,
            ideal: Ideal { scale: Rat::one(), a: p as i128, b: (-(r as i128)).rem_euclid(p as i128) },
        })
        .collect()
}

/// Prime ideals with norm at most `x`, ordered by (norm, p, index).
pub fn prime_ideals_up_to(field: &NumberField, x: u64) -> Vec<PrimeIdeal> {
    let mut out: Vec<PrimeIdeal> = primes_up_to(x)
        .into_iter()
        .flat_map(|p| prime_splitting(field, p))
        .filter(|pr| pr.norm <= x)
        .collect();
    out.sort_by_key(|pr| (pr.norm, pr.p, pr.index));
    out
}

/// Integral ideal described by its factorization over a shared prime table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealRecord {
    pub norm: u64,
    /// `(index into the prime table, exponent)`, ascending index.
    pub factors: Vec<(usize, u32)>,
}

#[derive(Clone, Debug)]
pub struct IdealTable {
    pub primes: Vec<PrimeIdeal>,
    pub ideals: Vec<IdealRecord>,
}

impl IdealTable {
    pub fn moebius(&self, r: &IdealRecord) -> i32 {
        moebius_of(&r.factors)
    }
    pub fn tau(&self, r: &IdealRecord) -> u64 {
        r.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }
    pub fn psi(&self, r: &IdealRecord) -> f64 {
        r.factors
            .iter()
            .map(|&(i, _)| 1.0 + 1.0 / self.primes[i].norm as f64)
            .product()
    }
    pub fn psi_exact(&self, r: &IdealRecord) -> Rat {
        r.factors
            .iter()
            .map(|&(i, _)| Rat::one() + Rat::new(1, self.primes[i].norm as i128))
            .fold(Rat::one(), |a, b| a * b)
    }
    pub fn lattice(&self, r: &IdealRecord, field: &NumberField) -> Ideal {
        r.factors.iter().fold(Ideal::unit(), |acc, &(i, e)| {
            acc.mul(&self.primes[i].ideal.pow(e, field), field)
        })
    }
    /// Factorization of a product of two records.
    pub fn product(&self, x: &IdealRecord, y: &IdealRecord) -> IdealRecord {
        let mut m: BTreeMap<usize, u32> = BTreeMap::new();
        for &(i, e) in x.factors.iter().chain(y.factors.iter()) {
            *m.entry(i).or_default() += e;
        }
        IdealRecord { norm: x.norm * y.norm, factors: m.into_iter().collect() }
    }
    pub fn prime_index(&self, p: &PrimeIdeal) -> Option<usize> {
        self.primes.iter().position(|x| x == p)
    }
}

pub fn moebius_of(factors: &[(usize, u32)]) -> i32 {
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All integral ideals of norm at most `x`, sorted by norm then lattice encoding.
pub fn enumerate_ideals(field: &NumberField, x: f64) -> IdealTable {
    if x < 1.0 {
        return IdealTable { primes: Vec::new(), ideals: Vec::new() };
    }
    let xm = x.floor() as u64;
    let primes = prime_ideals_up_to(field, xm);
    let mut ideals = Vec::new();
    fn rec(
        primes: &[PrimeIdeal],
        start: usize,
        norm: u64,
        xm: u64,
        cur: &mut Vec<(usize, u32)>,
        out: &mut Vec<IdealRecord>,
    ) {
        out.push(IdealRecord { norm, factors: cur.clone() });
        for i in start..primes.len() {
            let pn = primes[i].norm;
            if norm.saturating_mul(pn) > xm {
                break;
            }
            let mut n = norm * pn;
            let mut e = 1;
            loop {
                cur.push((i, e));
                rec(primes, i + 1, n, xm, cur, out);
                cur.pop();
                if n.saturating_mul(pn) > xm {
                    break;
                }
                n *= pn;
                e += 1;
            }
        }
    }
    rec(&primes, 0, 1, xm, &mut Vec::new(), &mut ideals);
    let table = IdealTable { primes, ideals };
    let mut keyed: Vec<((u64, Ideal), IdealRecord)> = table
        .ideals
        .iter()
        .map(|r| {
            let lat = if field.degree == 1 { Ideal::unit() } else { table.lattice(r, field) };
            ((r.norm, lat), r.clone())
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    IdealTable { primes: table.primes, ideals: keyed.into_iter().map(|(_, r)| r).collect() }
}

/// Factorization of an integral ideal into prime ideals.
pub fn factor_ideal(field: &NumberField, id: &Ideal) -> Result<Vec<(PrimeIdeal, u32)>, IdealError> {
    if !id.is_integral() {
        return Err(IdealError::NotIntegral(id.encode()));
    }
    let n = id.norm(field).to_integer() as u64;
    let mut out = Vec::new();
    for (p, _) in crate::arith::factorize(n) {
        for pr in prime_splitting(field, p) {
            let mut cur = id.clone();
            let mut e = 0;
            let pinv = pr.ideal.inv(field);
            while pr.ideal.divides(&cur, field) {
                cur = cur.mul(&pinv, field);
                e += 1;
            }
            if e > 0 {
                out.push((pr, e));
            }
        }
    }
    Ok(out)
}

pub fn moebius(field: &NumberField, id: &Ideal) -> Result<i32, IdealError> {
    let f = factor_ideal(field, id)?;
    Ok(if f.iter().any(|(_, e)| *e > 1) { 0 } else if f.len() % 2 == 0 { 1 } else { -1 })
}

pub fn tau(field: &NumberField, id: &Ideal) -> Result<u64, IdealError> {
    Ok(factor_ideal(field, id)?.iter().map(|(_, e)| *e as u64 + 1).product())
}

pub fn psi(field: &NumberField, id: &Ideal) -> Result<Rat, IdealError> {
    Ok(factor_ideal(field, id)?
        .iter()
        .map(|(p, _)| Rat::one() + Rat::new(1, p.norm as i128))
        .fold(Rat::one(), |a, b| a * b))
}

/// 0 when `level` divides `d`, else 1.
pub fn principal_character(field: &NumberField, d: &Ideal, level: &Ideal) -> u8 {
    if level.divides(d, field) {
        0
    } else {
        1
    }
}

#[derive(Clone, Debug)]
pub struct ZetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub prime_cap: u64,
}

/// Truncated Euler product for the Dedekind zeta function; optionally drops
/// the factor at `removed` (a prime ideal norm, removed once).
pub fn dedekind_zeta(
    field: &NumberField,
    s: Complex64,
    prime_cap: u64,
    removed: Option<u64>,
) -> Result<ZetaValue, IdealError> {
    if s.re <= 1.0 {
        return Err(IdealError::Continuation(s.re));
    }
    let mut log_sum = Complex64::new(0.0, 0.0);
    for p in primes_up_to(prime_cap) {
        for pr in prime_splitting(field, p) {
            let x = (-(s * (pr.norm as f64).ln())).exp();
            log_sum -= (Complex64::new(1.0, 0.0) - x).ln();
        }
    }
    let mut value = log_sum.exp();
    if let Some(nq) = removed {
        value *= Complex64::new(1.0, 0.0) - (-(s * (nq as f64).ln())).exp();
    }
    // sum over prime ideals of norm > cap of N^-sigma, each rational prime
    // contributing at most d ideals
    let sigma = s.re;
    let x = prime_cap as f64;
    let tail = field.degree as f64 * x.powf(1.0 - sigma) / (sigma - 1.0);
    let bound = value.norm() * ((tail / (1.0 - x.powf(-sigma))).exp() - 1.0);
    Ok(ZetaValue { value, tail_bound: bound, prime_cap })
}

/// Generator of a principal ideal, searched in a balanced box; `None` if the
/// ideal is not principal.
pub fn principal_generator(field: &NumberField, id: &Ideal) -> Option<FieldElement> {
    if field.degree == 1 {
        return Some(FieldElement::new(id.scale, Rat::zero()));
    }
    let nrm = id.norm(field);
    let u = field.embed(&field.tp_unit)[0];
    let bound = (nrm.to_f64().unwrap() * u).sqrt() * (1.0 + 1e-9) + 1e-9;
    let w = field.omega_embeddings();
    let sd = field.sqrt_disc();
    let s = id.scale.to_f64().unwrap();
    // x = s*(i*a + j*(b + omega)); |x1 - x2| = |s*j|*sqrt(disc)
    let jmax = (2.0 * bound / (s * sd)).floor() as i128;
    let mut js: Vec<i128> = (0..=jmax).flat_map(|j| if j == 0 { vec![0] } else { vec![j, -j] }).collect();
    js.dedup();
    for j in js {
        // x1 = s*(i*a + j*b) + s*j*w1 in [-bound, bound]
        let c = s * (j as f64) * (id.b as f64 + w[0]);
        let lo = ((-bound - c) / (s * id.a as f64)).floor() as i128 - 1;
        let hi = ((bound - c) / (s * id.a as f64)).ceil() as i128 + 1;
        for i in lo..=hi {
            let x = FieldElement::new(id.scale * rat(i * id.a + j * id.b), id.scale * rat(j));
            if x.is_zero() {
                continue;
            }
            if field.norm(&x).abs() == nrm {
                return Some(x);
            }
        }
    }
    None
}

/// Totally positive generator, if the ideal is trivial in the narrow class group.
pub fn narrow_generator(field: &NumberField, id: &Ideal) -> Option<FieldElement> {
    let mut x = principal_generator(field, id)?;
    if field.degree == 2 && field.norm(&x).is_negative() {
        if field.eps0_norm == -1 {
            x = field.mul(&x, field.eps0.as_ref().unwrap());
        } else {
            return None;
        }
    }
    if !field.is_totally_positive(&x).unwrap() {
        x = x.neg();
    }
    debug_assert!(field.is_totally_positive(&x).unwrap());
    Some(x)
}

pub fn narrowly_equivalent(field: &NumberField, x: &Ideal, y: &Ideal) -> bool {
    narrow_generator(field, &x.mul(&y.inv(field), field)).is_some()
}

/// Minimal-norm integral ideals coprime to the configured level, one per
/// narrow class, the first being the unit ideal.
pub(crate) fn narrow_class_representatives(field: &NumberField) -> Result<Vec<Ideal>, FieldError> {
    let target = field.narrow_class_number;
    let mut reps = vec![Ideal::unit()];
    let mut cap = 64.0;
    let mut done_norm = 1u64;
    while reps.len() < target {
        if cap > 1e6 {
            return Err(FieldError::ClassSearch(cap as i128));
        }
        let table = enumerate_ideals(field, cap);
        for r in &table.ideals {
            if r.norm <= done_norm {
                continue;
            }
            if r.factors.iter().any(|&(i, _)| field.level_primes.contains(&table.primes[i].p)) {
                continue;
            }
            let lat = table.lattice(r, field);
            if reps.iter().all(|x| !narrowly_equivalent(field, &lat, x)) {
                reps.push(lat);
                if reps.len() == target {
                    break;
                }
            }
        }
        done_norm = cap as u64;
        cap *= 4.0;
    }
    Ok(reps)
}

/// Index of the narrow class of `id` among the field's representatives.
pub fn class_index(field: &NumberField, id: &Ideal) -> usize {
    field
        .class_reps
        .iter()
        .position(|r| narrowly_equivalent(field, id, r))
        .expect("representatives cover every narrow class")
}

/// `id = xi * rep` with `rep` the fixed class representative and `xi >> 0` balanced.
pub fn decompose_to_class_rep(field: &NumberField, id: &Ideal) -> (Ideal, FieldElement) {
    for rep in &field.class_reps {
        if let Some(xi) = narrow_generator(field, &id.mul(&rep.inv(field), field)) {
            let bal = field.balanced_representative(&xi).expect("nonzero generator");
            return (rep.clone(), bal.element);
        }
    }
    unreachable!("representatives cover every narrow class")
}

/// Representatives whose square lies in the narrow class of `target`.
pub fn class_square_roots(field: &NumberField, target: &Ideal) -> Vec<Ideal> {
    field
        .class_reps
        .iter()
        .filter(|c| narrowly_equivalent(field, &c.mul(c, field), target))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDescriptor};

    fn quad(d: i64) -> NumberField {
        make_field(&FieldDescriptor::RealQuadratic { d }).unwrap()
    }
    fn rationals() -> NumberField {
        make_field(&FieldDescriptor::Rationals).unwrap()
    }

    #[test]
    fn splitting_in_sqrt5() {
        let f = quad(5);
        let p5 = prime_splitting(&f, 5);
        assert_eq!(p5.len(), 1);
        assert_eq!((p5[0].e, p5[0].f, p5[0].norm), (2, 1, 5));
        let p11 = prime_splitting(&f, 11);
        assert_eq!(p11.len(), 2);
        assert!(p11.iter().all(|p| p.norm == 11 && p.e == 1));
        let p2 = prime_splitting(&f, 2);
        assert_eq!((p2.len(), p2[0].norm, p2[0].f), (1, 4, 2));
        // e f g = d
        for p in primes_up_to(200) {
            let s = prime_splitting(&f, p);
            assert_eq!(s.iter().map(|x| x.e * x.f).sum::<u32>(), 2, "p={p}");
        }
    }

    #[test]
    fn prime_ideal_products() {
        let f = quad(5);
        let p11 = prime_splitting(&f, 11);
        let prod = p11[0].ideal.mul(&p11[1].ideal, &f);
        assert_eq!(prod, Ideal::rational(rat(11)));
        let p5 = &prime_splitting(&f, 5)[0].ideal;
        assert_eq!(p5.mul(p5, &f), Ideal::rational(rat(5)));
        assert_eq!(p5.mul(&p5.inv(&f), &f), Ideal::unit());
        let d = Ideal::principal(&f, &f.sqrt_disc_element()).unwrap();
        assert_eq!(d.norm(&f), rat(5));
    }

    #[test]
    fn enumerate_small() {
        let f = quad(5);
        let t = enumerate_ideals(&f, 10.0);
        let norms: Vec<u64> = t.ideals.iter().map(|r| r.norm).collect();
        assert_eq!(norms, vec![1, 4, 5, 9]);
        let q = rationals();
        assert_eq!(enumerate_ideals(&q, 10.0).ideals.len(), 10);
        assert!(enumerate_ideals(&q, 0.5).ideals.is_empty());
        assert_eq!(Ideal::rational(rat(6)).inv(&q), Ideal::rational(Rat::new(1, 6)));
        assert_eq!(q.inv(&FieldElement::int(4)).unwrap(), FieldElement::new(Rat::new(1, 4), Rat::zero()));
    }

    #[test]
    fn ideal_count_matches_splitting_oracle() {
        // r(n) = sum_{d | n} (disc/d), computed independently of the enumeration
        let f = quad(5);
        let x = 3000u64;
        let chi = |n: u64| -> i64 {
            let m = n % 5;
            match m {
                0 => 0,
                1 | 4 => 1,
                _ => -1,
            }
        };
        let mut total = 0i64;
        for n in 1..=x {
            total += (1..=n).filter(|d| n % d == 0).map(chi).sum::<i64>();
        }
        assert_eq!(enumerate_ideals(&f, x as f64).ideals.len() as i64, total);
    }

    #[test]
    fn multiplicative_functions() {
        let f = quad(5);
        let p = prime_splitting(&f, 11)[0].ideal.clone();
        let q = prime_splitting(&f, 19)[1].ideal.clone();
        assert_eq!(moebius(&f, &p).unwrap(), -1);
        assert_eq!(moebius(&f, &p.mul(&p, &f)).unwrap(), 0);
        assert_eq!(tau(&f, &p.mul(&p, &f)).unwrap(), 3);
        assert_eq!(
            psi(&f, &p.mul(&q, &f)).unwrap(),
            (Rat::one() + Rat::new(1, 11)) * (Rat::one() + Rat::new(1, 19))
        );
        let half = Ideal::rational(Rat::new(1, 2));
        assert!(moebius(&f, &half).is_err());
        let lvl = p.clone();
        assert_eq!(principal_character(&f, &Ideal::unit(), &lvl), 1);
        assert_eq!(principal_character(&f, &lvl, &lvl), 0);
        assert_eq!(principal_character(&f, &q, &lvl), 1);
    }

    #[test]
    fn zeta_two_values() {
        let q = rationals();
        let z = dedekind_zeta(&q, Complex64::new(2.0, 0.0), 200_000, None).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((z.value.re - exact).abs() <= z.tail_bound);
        assert!((z.value.re - exact).abs() < 1e-5);
        let zq = dedekind_zeta(&q, Complex64::new(2.0, 0.0), 200_000, Some(1009)).unwrap();
        assert!((zq.value.re - z.value.re * (1.0 - 1009f64.powi(-2))).abs() < 1e-14);
        assert!(dedekind_zeta(&q, Complex64::new(1.0, 0.0), 100, None).is_err());
    }

    #[test]
    fn quadratic_zeta_matches_character_sum() {
        let f = quad(5);
        let z = dedekind_zeta(&f, Complex64::new(2.0, 0.0), 20_000_000, None).unwrap();
        // zeta(2) * L(2, chi_5), summing whole periods so the tail is O(N^-3)
        let mut l = 0.0;
        let n = 200_000u64;
        for k in (1..=n).rev() {
            let c = match k % 5 {
                1 | 4 => 1.0,
                2 | 3 => -1.0,
                _ => 0.0,
            };
            l += c / (k as f64 * k as f64);
        }
        let oracle = std::f64::consts::PI.powi(2) / 6.0 * l;
        assert!((z.value.re - oracle).abs() < 1e-8, "{} vs {}", z.value.re, oracle);
    }

    #[test]
    fn narrow_classes_of_sqrt3() {
        let f = quad(3);
        assert_eq!(f.class_reps.len(), 2);
        // a prime above a split p: 11 splits since 12 is a square mod 11
        let p11 = prime_splitting(&f, 11);
        assert_eq!(p11.len(), 2);
        let mut saw_nontrivial = false;
        for pr in &p11 {
            let (rep, xi) = decompose_to_class_rep(&f, &pr.ideal);
            assert!(f.is_totally_positive(&xi).unwrap());
            let back = Ideal::principal(&f, &xi).unwrap().mul(&rep, &f);
            assert_eq!(back, pr.ideal);
            saw_nontrivial |= rep != Ideal::unit();
        }
        assert!(saw_nontrivial);
        let rep = f.class_reps[1].clone();
        let (r2, xi) = decompose_to_class_rep(&f, &rep);
        assert_eq!((r2, xi), (rep.clone(), FieldElement::one()));
        assert_eq!(class_square_roots(&f, &Ideal::unit()).len(), 2);
        assert!(class_square_roots(&f, &rep).is_empty());
    }

    #[test]
    fn quotient_representatives() {
        let f = quad(5);
        let p = prime_splitting(&f, 11)[0].ideal.clone();
        let reps = Ideal::unit().quotient_reps(&p.mul(&p, &f), &f);
        assert_eq!(reps.len(), 121);
        for (i, x) in reps.iter().enumerate() {
            for y in &reps[..i] {
                assert!(!p.mul(&p, &f).contains(&x.sub(y), &f));
            }
        }
    }
}
