//! Generalized Kloosterman sums over the base field, the different-normalized
//! variant, the classical sums over the rationals and the Weil bound.

use crate::arith::{factorize, gcd, mod_inverse};
use crate::field::{rat, FieldElement, FieldError, NumberField, Rat};
use crate::ideals::{
    factor_ideal, narrow_generator, narrowly_equivalent, tau, Ideal, IdealError, PrimeIdeal,
};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

pub const DEFAULT_QUOTIENT_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum KlError {
    #[error("quotient of size {size} exceeds the cap {cap}")]
    QuotientTooLarge { size: u64, cap: u64 },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Parameters of `KS(alpha1, a1; alpha2, a2; c, cc)` at level `level`.
#[derive(Clone, Debug)]
pub struct KloostermanInstance {
    pub alpha1: FieldElement,
    pub a1: Ideal,
    pub alpha2: FieldElement,
    pub a2: Ideal,
    pub c: FieldElement,
    pub cc: Ideal,
    pub level: Ideal,
}

/// The different ideal.
pub fn different(field: &NumberField) -> Ideal {
    Ideal::principal(field, &field.sqrt_disc_element()).expect("nonzero")
}

impl KloostermanInstance {
    pub fn validate(&self, field: &NumberField) -> Result<(), KlError> {
        if self.c.is_zero() {
            return Err(KlError::Invalid("modulus element is zero".into()));
        }
        let dinv = different(field).inv(field);
        let m1 = self.a1.inv(field).mul(&dinv, field);
        if !m1.contains(&self.alpha1, field) {
            return Err(KlError::Invalid("alpha1 outside a1^-1 D^-1".into()));
        }
        let m2 = self.a2.inv(field).mul(&dinv, field);
        if !m2.contains(&self.alpha2, field) {
            return Err(KlError::Invalid("alpha2 outside a2^-1 D^-1".into()));
        }
        let cl = self.cc.inv(field).mul(&self.level, field);
        if !cl.contains(&self.c, field) {
            return Err(KlError::Invalid("c outside cc^-1 q".into()));
        }
        let sq = self.cc.mul(&self.cc, field);
        if !narrowly_equivalent(field, &sq, &self.a1.mul(&self.a2, field)) {
            return Err(KlError::Invalid("cc^2 not in the class of a1 a2".into()));
        }
        Ok(())
    }

    /// Integral modulus ideal `(c) cc`.
    pub fn modulus(&self, field: &NumberField) -> Ideal {
        Ideal::principal(field, &self.c).expect("nonzero").mul(&self.cc, field)
    }
}

/// `O / m` for an integral ideal `m = s (a Z + (b + omega) Z)`, with elements
/// stored as reduced integer coordinates `u + v omega`.
struct ResidueRing {
    quad: bool,
    s: i128,
    a: i128,
    b: i128,
    t: i128,
    n: i128,
    primes: Vec<(i128, i128, i128)>,
}

impl ResidueRing {
    fn new(field: &NumberField, m: &Ideal, primes: &[(PrimeIdeal, u32)]) -> Self {
        let s = m.scale.to_integer();
        let primes = primes
            .iter()
            .map(|(p, _)| (p.ideal.scale.to_integer(), p.ideal.a, p.ideal.b))
            .collect();
        ResidueRing {
            quad: field.degree == 2,
            s,
            a: m.a,
            b: m.b,
            t: field.t as i128,
            n: field.n as i128,
            primes,
        }
    }

    fn rows(&self) -> i128 {
        if self.quad {
            self.s
        } else {
            1
        }
    }

    fn cols(&self) -> i128 {
        self.s * self.a
    }

    fn size(&self) -> i128 {
        self.rows() * self.cols()
    }

    fn reduce(&self, (u, v): (i128, i128)) -> (i128, i128) {
        if !self.quad {
            return (u.rem_euclid(self.s), 0);
        }
        let k = v.div_euclid(self.s);
        let u = u - k * self.s * self.b;
        (u.rem_euclid(self.s * self.a), v - k * self.s)
    }

    fn mul(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        if !self.quad {
            return ((x.0 * y.0).rem_euclid(self.s), 0);
        }
        self.reduce((
            x.0 * y.0 - self.n * x.1 * y.1,
            x.0 * y.1 + x.1 * y.0 + self.t * x.1 * y.1,
        ))
    }

    fn pow(&self, x: (i128, i128), mut e: u64) -> (i128, i128) {
        let mut r = self.reduce((1, 0));
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    fn is_unit(&self, (u, v): (i128, i128)) -> bool {
        self.primes.iter().all(|&(sp, ap, bp)| {
            !(u % sp == 0 && v % sp == 0 && (u / sp - bp * (v / sp)).rem_euclid(ap) == 0)
        })
    }

    fn element(&self, k: i128) -> (i128, i128) {
        (k % self.cols(), k / self.cols())
    }

    fn units(&self) -> Vec<(i128, i128)> {
        (0..self.size()).map(|k| self.element(k)).filter(|&x| self.is_unit(x)).collect()
    }
}

/// Small element `x` of `lat` with `x lat^{-1}` prime to every listed prime.
fn coprime_element(
    field: &NumberField,
    lat: &Ideal,
    primes: &[(PrimeIdeal, u32)],
) -> Result<FieldElement, KlError> {
    let excluded: Vec<Ideal> = primes.iter().map(|(p, _)| p.ideal.mul(lat, field)).collect();
    let basis = lat.basis(field);
    let range = if field.degree == 1 { 0 } else { 40 };
    let mut cands: Vec<(i128, i128)> = Vec::new();
    for i in -40i128..=40 {
        for j in -range..=range {
            cands.push((i, j));
        }
    }
    cands.sort_by_key(|&(i, j)| (i.abs() + j.abs(), i.abs(), j.abs(), i < 0, j < 0));
    for (i, j) in cands {
        let mut x = basis[0].scale(&rat(i));
        if field.degree == 2 {
            x = x.add(&basis[1].scale(&rat(j)));
        }
        if x.is_zero() {
            continue;
        }
        if excluded.iter().all(|e| !e.contains(&x, field)) {
            return Ok(x);
        }
    }
    Err(KlError::Invalid("no coprime lattice element in the search box".into()))
}

/// Integer vector of `(Tr(w), Tr(w omega))` scaled by a common denominator.
fn trace_form(field: &NumberField, w: &FieldElement) -> (Rat, Rat) {
    let tr1 = field.trace(w);
    if field.degree == 1 {
        return (tr1, Rat::zero());
    }
    (tr1, field.trace(&field.mul(w, &FieldElement::ints(0, 1))))
}

fn to_int_coords(x: &FieldElement) -> (i128, i128) {
    (x.a.to_integer(), x.b.to_integer())
}

/// `KS(alpha1, a1; alpha2, ·; c, cc)` without membership checks.
///
/// Every generator of `a / a (c) cc` with `a = a1 cc^{-1}` is written `x0 r`
/// with `r` a unit modulo `(c) cc`, and then `xbar = xbar0 r^{-1}`.
pub fn ks_core(
    field: &NumberField,
    alpha1: &FieldElement,
    a1: &Ideal,
    alpha2: &FieldElement,
    c: &FieldElement,
    cc: &Ideal,
    cap: u64,
) -> Result<Complex64, KlError> {
    let modulus = Ideal::principal(field, c)?.mul(cc, field);
    let size = modulus.norm(field).to_integer() as u64;
    if size > cap {
        return Err(KlError::QuotientTooLarge { size, cap });
    }
    let primes = factor_ideal(field, &modulus)?;
    let ring = ResidueRing::new(field, &modulus, &primes);
    let lat = a1.mul(&cc.inv(field), field);
    let x0 = coprime_element(field, &lat, &primes)?;
    let y0 = coprime_element(field, &lat.inv(field), &primes)?;
    let units = ring.units();
    let phi = units.len() as u64;
    let u = ring.reduce(to_int_coords(&field.mul(&x0, &y0)));
    let uinv = ring.pow(u, phi - 1);
    let xbar0 = field.mul(&y0, &FieldElement::ints(uinv.0, uinv.1));

    let w1 = field.div(&field.mul(alpha1, &x0), c)?;
    let w2 = field.div(&field.mul(alpha2, &xbar0), c)?;
    let (p1, q1) = trace_form(field, &w1);
    let (p2, q2) = trace_form(field, &w2);
    let den = [p1, q1, p2, q2].iter().fold(1i128, |acc, r| acc.lcm(r.denom()));
    let lift = |r: Rat| (r * rat(den)).to_integer().rem_euclid(den);
    let (p1, q1, p2, q2) = (lift(p1), lift(q1), lift(p2), lift(q2));

    let mut total = Complex64::zero();
    for &r in &units {
        let ri = if ring.quad {
            ring.pow(r, phi - 1)
        } else {
            (mod_inverse(r.0 as i64, ring.s as i64).expect("unit") as i128, 0)
        };
        let ph = (r.0 * p1 + r.1 * q1 + ri.0 * p2 + ri.1 * q2).rem_euclid(den);
        let theta = 2.0 * PI * (ph as f64 / den as f64);
        total += Complex64::new(theta.cos(), theta.sin());
    }
    Ok(total)
}

/// Brute-force `KS` of a validated instance.
pub fn ks_sum(field: &NumberField, inst: &KloostermanInstance, cap: u64) -> Result<Complex64, KlError> {
    inst.validate(field)?;
    ks_core(field, &inst.alpha1, &inst.a1, &inst.alpha2, &inst.c, &inst.cc, cap)
}

/// Reference evaluation straight from the definition: enumerates the quotient,
/// tests each class for being a generator, and searches the inverse class.
pub fn ks_sum_by_definition(
    field: &NumberField,
    alpha1: &FieldElement,
    a1: &Ideal,
    alpha2: &FieldElement,
    c: &FieldElement,
    cc: &Ideal,
) -> Result<Complex64, KlError> {
    let modulus = Ideal::principal(field, c)?.mul(cc, field);
    let lat = a1.mul(&cc.inv(field), field);
    let lat_inv = lat.inv(field);
    let big = lat.mul(&modulus, field);
    let small = big.mul(&lat_inv, field).mul(&lat_inv, field);
    let xs = lat.quotient_reps(&big, field);
    let ys = lat_inv.quotient_reps(&small, field);
    let one = FieldElement::one();
    let mut total = Complex64::zero();
    for x in &xs {
        if x.is_zero() && modulus != Ideal::unit() {
            continue;
        }
        if !x.is_zero() {
            let gen = Ideal::principal(field, x)?.mul(&lat_inv, field);
            if !gen.coprime_to(&modulus, field) {
                continue;
            }
        }
        let y = ys
            .iter()
            .find(|y| modulus.contains(&field.mul(x, y).sub(&one), field))
            .ok_or_else(|| KlError::Invalid("missing inverse class".into()))?;
        let arg = field.div(&field.mul(alpha1, x).add(&field.mul(alpha2, y)), c)?;
        let tr = field.trace(&arg);
        let frac = tr - tr.floor();
        let theta = 2.0 * PI * frac.to_f64().unwrap();
        total += Complex64::new(theta.cos(), theta.sin());
    }
    Ok(total)
}

/// Deterministic totally positive generator of `m n cc^{-2}`: the balanced
/// narrow generator.
pub fn twist_generator(
    field: &NumberField,
    m: &Ideal,
    n: &Ideal,
    cc: &Ideal,
) -> Result<FieldElement, KlError> {
    let target = m.mul(n, field).mul(&cc.inv(field).pow(2, field), field);
    let g = narrow_generator(field, &target)
        .ok_or_else(|| KlError::Invalid("m n cc^-2 is not narrowly principal".into()))?;
    Ok(field.balanced_representative(&g)?.element)
}

/// Arguments of the normalized sum.
#[derive(Clone, Debug)]
pub struct NormalizedArgs<'a> {
    pub alpha: &'a FieldElement,
    pub n: &'a Ideal,
    pub beta: &'a FieldElement,
    pub m: &'a Ideal,
    pub c: &'a FieldElement,
    pub cc: &'a Ideal,
    pub level: &'a Ideal,
}

impl NormalizedArgs<'_> {
    pub fn validate(&self, field: &NumberField) -> Result<(), KlError> {
        if self.c.is_zero() {
            return Err(KlError::Invalid("modulus element is zero".into()));
        }
        if !self.n.inv(field).contains(self.alpha, field) {
            return Err(KlError::Invalid("alpha outside n^-1".into()));
        }
        if !self.m.inv(field).contains(self.beta, field) {
            return Err(KlError::Invalid("beta outside m^-1".into()));
        }
        if !self.cc.inv(field).mul(self.level, field).contains(self.c, field) {
            return Err(KlError::Invalid("c outside cc^-1 q".into()));
        }
        let sq = self.cc.mul(self.cc, field);
        if !narrowly_equivalent(field, &sq, &self.m.mul(self.n, field)) {
            return Err(KlError::Invalid("cc^2 not in the class of m n".into()));
        }
        Ok(())
    }
}

/// Normalized sum with an explicit twist generator `nu` of `m n cc^{-2}`.
pub fn kl_normalized_with(
    field: &NumberField,
    args: &NormalizedArgs,
    nu: &FieldElement,
    cap: u64,
) -> Result<Complex64, KlError> {
    let dinv = different(field).inv(field);
    let a1 = args.n.mul(&dinv, field);
    let alpha2 = field.mul(args.beta, nu);
    ks_core(field, args.alpha, &a1, &alpha2, args.c, args.cc, cap)
}

/// Normalized sum with the deterministic twist generator.
pub fn kl_normalized(field: &NumberField, args: &NormalizedArgs, cap: u64) -> Result<Complex64, KlError> {
    args.validate(field)?;
    let nu = twist_generator(field, args.m, args.n, args.cc)?;
    kl_normalized_with(field, args, &nu, cap)
}

/// Implied constant used by [`weil_bound`] by default.
pub fn default_weil_constant(field: &NumberField) -> f64 {
    if field.degree == 1 {
        1.0
    } else {
        4.0
    }
}

/// `K N(gcd((alpha) n, (beta) m, (c) cc))^{1/2} tau((c) cc) N((c) cc)^{1/2}`.
pub fn weil_bound(field: &NumberField, args: &NormalizedArgs, constant: f64) -> Result<f64, KlError> {
    let modulus = Ideal::principal(field, args.c)?.mul(args.cc, field);
    let mut g = modulus.clone();
    for (x, id) in [(args.alpha, args.n), (args.beta, args.m)] {
        if !x.is_zero() {
            g = g.add(&Ideal::principal(field, x)?.mul(id, field), field);
        }
    }
    let ng = g.norm(field).to_f64().unwrap();
    let nm = modulus.norm(field).to_f64().unwrap();
    Ok(constant * ng.sqrt() * tau(field, &modulus)? as f64 * nm.sqrt())
}

/// Classical `S(m, n; c)` by direct summation.
pub fn classical_kloosterman(m: i64, n: i64, c: u64) -> f64 {
    let ci = c as i64;
    let mut s = 0.0;
    for x in 0..ci {
        if gcd(x as i128, ci as i128) != 1 {
            continue;
        }
        let xi = mod_inverse(x, ci).unwrap();
        let ph = ((m as i128 * x as i128 + n as i128 * xi as i128).rem_euclid(ci as i128)) as f64;
        s += (2.0 * PI * ph / c as f64).cos();
    }
    s
}

/// Classical sums assembled from prime-power moduli by twisted
/// multiplicativity, with a per-instance cache of the prime-power values.
#[derive(Default)]
pub struct ClassicalKloosterman {
    cache: HashMap<(u64, u64, u64), f64>,
}

impl ClassicalKloosterman {
    pub fn new() -> Self {
        Self::default()
    }

    fn prime_power(&mut self, m: u64, n: u64, q: u64) -> f64 {
        let key = (m % q, n % q, q);
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = classical_kloosterman(key.0 as i64, key.1 as i64, q);
        self.cache.insert(key, v);
        v
    }

    pub fn value(&mut self, m: i64, n: i64, c: u64) -> f64 {
        let parts: Vec<u64> = factorize(c).into_iter().map(|(p, e)| p.pow(e)).collect();
        let mut m = m.rem_euclid(c.max(1) as i64) as u64;
        let n = n.rem_euclid(c.max(1) as i64) as u64;
        let mut rest = c;
        let mut prod = 1.0;
        for q in parts {
            rest /= q;
            // S(m, n; q r) = S(m rbar^2, n; q) S(m qbar^2, n; r)
            let rbar = mod_inverse((rest % q) as i64, q as i64).unwrap() as u128;
            let mq = (m as u128 * rbar % q as u128 * rbar % q as u128) as u64;
            prod *= self.prime_power(mq, n, q);
            if rest > 1 {
                let qbar = mod_inverse((q % rest) as i64, rest as i64).unwrap() as u128;
                m = (m as u128 * qbar % rest as u128 * qbar % rest as u128) as u64;
            }
        }
        prod
    }
}

/// `S(m, n; c)` for every residue pair, row-major in `m`, via one FFT per row.
pub fn classical_table(c: u64) -> Vec<f64> {
    let cu = c as usize;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(cu);
    let inv: Vec<Option<u64>> = (0..c)
        .map(|x| mod_inverse(x as i64, c as i64).map(|v| v as u64))
        .map(|v| if c == 1 { Some(0) } else { v })
        .collect();
    let mut out = Vec::with_capacity(cu * cu);
    let mut buf = vec![Complex64::zero(); cu];
    for m in 0..c {
        for (b, slot) in buf.iter_mut().enumerate() {
            *slot = match inv[b] {
                Some(bi) => {
                    let ph = (m as u128 * bi as u128 % c as u128) as f64 / c as f64;
                    Complex64::from_polar(1.0, 2.0 * PI * ph)
                }
                None => Complex64::zero(),
            };
        }
        // inverse transform: sum_b buf[b] e(n b / c)
        fft.process(&mut buf);
        out.extend(buf.iter().map(|z| z.re));
    }
    out
}

/// Largest `|S(m,n;c)| / bound` over all residue pairs, with the bound
/// `gcd(m,n,c)^{1/2} tau(c) c^{1/2}`; returns `(ratio, m, n)`.
pub fn classical_weil_ratio(c: u64) -> (f64, u64, u64) {
    let table = classical_table(c);
    let tau_c = crate::arith::divisor_count(c) as f64;
    let mut worst = (0.0, 0, 0);
    for m in 0..c {
        for n in 0..c {
            let g = gcd(gcd(m as i128, n as i128), c as i128) as f64;
            let r = table[(m * c + n) as usize].abs() / (g.sqrt() * tau_c * (c as f64).sqrt());
            if r > worst.0 {
                worst = (r, m, n);
            }
        }
    }
    worst
}

/// Outcome of a randomized Weil-bound survey.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilSurvey {
    pub instances: usize,
    pub violations: usize,
    /// Largest `|Kl| / bound`.
    pub worst_ratio: f64,
    pub worst_modulus_norm: u64,
}

/// Random instances with `n`, `m` among the integral ideals of norm at most
/// 30, `alpha in n^-1`, `beta in m^-1`, trivial level and `cc = O`, and
/// `1 <= N((c)) <= max_norm`. Requires narrow class number one.
pub fn weil_survey(
    field: &NumberField,
    count: usize,
    max_norm: u64,
    constant: f64,
    seed: u64,
) -> Result<WeilSurvey, KlError> {
    use rand::{Rng, SeedableRng};
    if field.narrow_class_number != 1 {
        return Err(KlError::Invalid("survey needs narrow class number one".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let table = crate::ideals::enumerate_ideals(field, 30.0);
    let lattices: Vec<Ideal> = table.ideals.iter().map(|r| table.lattice(r, field)).collect();
    let o = Ideal::unit();
    let span = (max_norm as f64).sqrt() as i128 + 1;
    let mut out = WeilSurvey { instances: 0, violations: 0, worst_ratio: 0.0, worst_modulus_norm: 0 };
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> (Ideal, FieldElement) {
        let id = lattices[rng.gen_range(0..lattices.len())].clone();
        let b = id.inv(field).basis(field);
        let x = b[0].scale(&rat(rng.gen_range(-6..=6))).add(&b.get(1).map_or(FieldElement::zero(), |y| y.scale(&rat(rng.gen_range(-6..=6)))));
        (id, x)
    };
    while out.instances < count {
        let c = if field.degree == 1 {
            FieldElement::int(rng.gen_range(1..=max_norm as i128))
        } else {
            FieldElement::ints(rng.gen_range(-span..=span), rng.gen_range(-span..=span))
        };
        let nc = field.norm(&c).abs();
        if nc.is_zero() || nc > rat(max_norm as i128) {
            continue;
        }
        let (n, alpha) = pick(&mut rng);
        let (m, beta) = pick(&mut rng);
        let args = NormalizedArgs { alpha: &alpha, n: &n, beta: &beta, m: &m, c: &c, cc: &o, level: &o };
        let v = kl_normalized(field, &args, DEFAULT_QUOTIENT_CAP)?;
        let b = weil_bound(field, &args, constant)?;
        let r = v.norm() / b;
        out.instances += 1;
        if r > 1.0 {
            out.violations += 1;
        }
        if r > out.worst_ratio {
            out.worst_ratio = r;
            out.worst_modulus_norm = nc.to_integer() as u64;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDescriptor};
    use crate::ideals::prime_splitting;

    fn rationals() -> NumberField {
        make_field(&FieldDescriptor::Rationals).unwrap()
    }
    fn quad(d: i64) -> NumberField {
        make_field(&FieldDescriptor::RealQuadratic { d }).unwrap()
    }
    fn qe(x: i128) -> FieldElement {
        FieldElement::int(x)
    }

    /// Independent oracle: sum over residues with inverses found by search.
    fn s_oracle(m: i64, n: i64, c: i64) -> f64 {
        let mut s = 0.0;
        for x in 0..c {
            if let Some(y) = (0..c).find(|y| (x * y) % c == 1 % c) {
                let ph = (m * x + n * y).rem_euclid(c) as f64 / c as f64;
                s += (2.0 * PI * ph).cos();
            }
        }
        s
    }

    #[test]
    fn classical_small_values() {
        assert!((classical_kloosterman(1, 1, 5) - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((classical_kloosterman(1, 1, 1) - 1.0).abs() < 1e-15);
        for (m, n, c) in [(1, 2, 3), (3, 7, 12), (5, 5, 9), (2, 0, 8)] {
            assert!((classical_kloosterman(m, n, c as u64) - s_oracle(m, n, c)).abs() < 1e-10);
        }
    }

    #[test]
    fn rational_instance_matches_classical() {
        let f = rationals();
        let o = Ideal::unit();
        for (m, n, c) in [(1i128, 1i128, 5i128), (2, 3, 7), (1, 2, 3), (4, 6, 12), (1, 1, 1)] {
            let nn = Ideal::rational(rat(n));
            let mm = Ideal::rational(rat(m));
            let args = NormalizedArgs {
                alpha: &qe(1),
                n: &nn,
                beta: &qe(1),
                m: &mm,
                c: &qe(c),
                cc: &o,
                level: &o,
            };
            let v = kl_normalized(&f, &args, DEFAULT_QUOTIENT_CAP).unwrap();
            let want = classical_kloosterman(n as i64, m as i64, c as u64);
            assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-10, "{m} {n} {c}: {v} vs {want}");
        }
    }

    #[test]
    fn crt_route_matches_direct() {
        let mut k = ClassicalKloosterman::new();
        for c in 1..=120u64 {
            for (m, n) in [(1, 1), (2, 3), (6, 10), (0, 5), (7, 7)] {
                let a = k.value(m, n, c);
                let b = classical_kloosterman(m, n, c);
                assert!((a - b).abs() < 1e-9, "m={m} n={n} c={c}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fft_table_matches_direct() {
        for c in [1u64, 2, 5, 12, 27] {
            let t = classical_table(c);
            for m in 0..c {
                for n in 0..c {
                    let d = classical_kloosterman(m as i64, n as i64, c);
                    assert!((t[(m * c + n) as usize] - d).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn sqrt5_trivial_ideals_match_definition() {
        let f = quad(5);
        let o = Ideal::unit();
        let sd = f.sqrt_disc_element();
        let dinv = different(&f).inv(&f);
        for k in 1..=4i128 {
            let c = sd.scale(&rat(k));
            for (a, b) in [(1i128, 1i128), (2, 3), (0, 1)] {
                let alpha = FieldElement::ints(a, b);
                let args = NormalizedArgs {
                    alpha: &alpha,
                    n: &o,
                    beta: &qe(1),
                    m: &o,
                    c: &c,
                    cc: &o,
                    level: &o,
                };
                let v = kl_normalized(&f, &args, DEFAULT_QUOTIENT_CAP).unwrap();
                let nu = twist_generator(&f, &o, &o, &o).unwrap();
                let r = ks_sum_by_definition(&f, &alpha, &dinv, &nu, &c, &o).unwrap();
                assert!((v - r).norm() < 1e-9, "k={k}: {v} vs {r}");
                assert!(v.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn nontrivial_ideals_match_definition() {
        let f = quad(5);
        let p11 = prime_splitting(&f, 11);
        let p19 = prime_splitting(&f, 19);
        let n = p11[0].ideal.clone();
        let m = p11[1].ideal.clone();
        let o = Ideal::unit();
        let level = p19[0].ideal.clone();
        // c in q, alpha in n^-1, beta in m^-1
        let c = narrow_generator(&f, &level.mul(&p11[0].ideal, &f)).unwrap();
        let alpha = n.inv(&f).basis(&f)[1].clone();
        let beta = m.inv(&f).basis(&f)[0].clone();
        let args = NormalizedArgs { alpha: &alpha, n: &n, beta: &beta, m: &m, c: &c, cc: &o, level: &level };
        let v = kl_normalized(&f, &args, DEFAULT_QUOTIENT_CAP).unwrap();
        let nu = twist_generator(&f, &m, &n, &o).unwrap();
        let a1 = n.mul(&different(&f).inv(&f), &f);
        let r = ks_sum_by_definition(&f, &alpha, &a1, &f.mul(&beta, &nu), &c, &o).unwrap();
        assert!((v - r).norm() < 1e-8, "{v} vs {r}");
        assert!(v.im.abs() < 1e-9);
        let b = weil_bound(&f, &args, default_weil_constant(&f)).unwrap();
        assert!(v.norm() <= b);
    }

    #[test]
    fn quotient_cap_enforced() {
        let f = rationals();
        let o = Ideal::unit();
        let r = ks_core(&f, &qe(1), &o, &qe(1), &qe(1001), &o, 1000);
        assert!(matches!(r, Err(KlError::QuotientTooLarge { size: 1001, cap: 1000 })));
    }

    #[test]
    fn invalid_instance_rejected() {
        let f = rationals();
        let o = Ideal::unit();
        let q = Ideal::rational(rat(11));
        let args = NormalizedArgs { alpha: &qe(1), n: &o, beta: &qe(1), m: &o, c: &qe(5), cc: &o, level: &q };
        assert!(kl_normalized(&f, &args, 100).is_err());
        let inst = KloostermanInstance {
            alpha1: qe(1),
            a1: o.clone(),
            alpha2: qe(1),
            a2: o.clone(),
            c: qe(0),
            cc: o.clone(),
            level: o.clone(),
        };
        assert!(ks_sum(&f, &inst, 100).is_err());
    }

    #[test]
    fn weil_bound_examples() {
        let f = rationals();
        let o = Ideal::unit();
        let args = NormalizedArgs { alpha: &qe(1), n: &o, beta: &qe(1), m: &o, c: &qe(5), cc: &o, level: &o };
        let b = weil_bound(&f, &args, 1.0).unwrap();
        assert!((b - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        let args7 = NormalizedArgs { alpha: &qe(7), n: &o, beta: &qe(14), m: &o, c: &qe(7), cc: &o, level: &o };
        let b7 = weil_bound(&f, &args7, 1.0).unwrap();
        assert!((b7 - 7f64.sqrt() * 2.0 * 7f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn random_survey_is_deterministic() {
        let f = quad(5);
        let a = weil_survey(&f, 12, 400, 4.0, 3).unwrap();
        assert_eq!(a, weil_survey(&f, 12, 400, 4.0, 3).unwrap());
        assert_eq!(a.violations, 0);
        assert!(a.worst_ratio > 0.0);
    }
}
