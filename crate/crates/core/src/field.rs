//! Totally real fields of degree 1 and 2: elements, embeddings, units and
//! narrow class data.

use crate::arith::{is_squarefree, isqrt};
use crate::ideals::{self, Ideal};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub type Rat = Ratio<i128>;

pub fn rat(n: i128) -> Rat {
    Rat::from_integer(n)
}

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("defining integer {0} is not a squarefree integer >= 2")]
    BadDiscriminant(i64),
    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),
    #[error("zero element has no {0}")]
    ZeroElement(&'static str),
    #[error("narrow class search exhausted below norm {0}")]
    ClassSearch(i128),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldDescriptor {
    Rationals,
    RealQuadratic {
        #[serde(rename = "D")]
        d: i64,
    },
    /// Accepted so that degree errors surface from [`make_field`].
    Degree { degree: usize },
}

impl FieldDescriptor {
    /// Parses `Q`, `rationals`, `Q(sqrt5)`, `sqrt5` or a bare integer `5`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" || t == "rationals" || t == "qq" {
            return Ok(FieldDescriptor::Rationals);
        }
        let digits: String = t
            .trim_start_matches("q(")
            .trim_end_matches(')')
            .trim_start_matches("sqrt")
            .trim_start_matches('(')
            .trim_end_matches(')')
            .to_string();
        digits
            .parse::<i64>()
            .map(|d| FieldDescriptor::RealQuadratic { d })
            .map_err(|_| format!("cannot parse field descriptor '{s}'"))
    }

    pub fn label(&self) -> String {
        match self {
            FieldDescriptor::Rationals => "Q".into(),
            FieldDescriptor::RealQuadratic { d } => format!("Q(sqrt{d})"),
            FieldDescriptor::Degree { degree } => format!("degree-{degree}"),
        }
    }
}

/// `a + b*omega` in coordinates over the integral basis `(1, omega)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    pub a: Rat,
    pub b: Rat,
}

impl FieldElement {
    pub fn new(a: Rat, b: Rat) -> Self {
        FieldElement { a, b }
    }
    pub fn int(a: i128) -> Self {
        FieldElement { a: rat(a), b: Rat::zero() }
    }
    pub fn ints(a: i128, b: i128) -> Self {
        FieldElement { a: rat(a), b: rat(b) }
    }
    pub fn zero() -> Self {
        Self::int(0)
    }
    pub fn one() -> Self {
        Self::int(1)
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }
    pub fn scale(&self, s: &Rat) -> Self {
        FieldElement { a: self.a * s, b: self.b * s }
    }
    pub fn add(&self, o: &Self) -> Self {
        FieldElement { a: self.a + o.a, b: self.b + o.b }
    }
    pub fn sub(&self, o: &Self) -> Self {
        FieldElement { a: self.a - o.a, b: self.b - o.b }
    }
    pub fn neg(&self) -> Self {
        FieldElement { a: -self.a, b: -self.b }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}w", self.a, self.b)
        }
    }
}

/// Result of a balancing search.
#[derive(Clone, Debug)]
pub struct Balanced {
    pub element: FieldElement,
    pub exponent: i64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct NumberField {
    pub descriptor: FieldDescriptor,
    pub degree: usize,
    /// Squarefree defining integer; 1 for the rationals.
    pub d: i64,
    pub disc: i64,
    /// `omega^2 = t*omega - n`.
    pub t: i64,
    pub n: i64,
    pub eps0: Option<FieldElement>,
    pub eps0_norm: i64,
    /// Generator of the totally positive units.
    pub tp_unit: FieldElement,
    pub class_number: usize,
    pub narrow_class_number: usize,
    pub class_reps: Vec<Ideal>,
    pub residue: f64,
    pub regulator: f64,
    /// Rational primes the class representatives avoid.
    pub level_primes: Vec<u64>,
}

pub fn make_field(desc: &FieldDescriptor) -> Result<NumberField, FieldError> {
    make_field_for_level(desc, None)
}

/// Builds the field; class representatives are kept coprime to `level`.
pub fn make_field_for_level(
    desc: &FieldDescriptor,
    level: Option<u64>,
) -> Result<NumberField, FieldError> {
    let level_primes: Vec<u64> = level
        .map(|l| crate::arith::factorize(l).into_iter().map(|(p, _)| p).collect())
        .unwrap_or_default();
    match *desc {
        FieldDescriptor::Rationals => Ok(NumberField {
            descriptor: desc.clone(),
            degree: 1,
            d: 1,
            disc: 1,
            t: 0,
            n: 0,
            eps0: None,
            eps0_norm: -1,
            tp_unit: FieldElement::one(),
            class_number: 1,
            narrow_class_number: 1,
            class_reps: vec![Ideal::unit()],
            residue: 1.0,
            regulator: 1.0,
            level_primes,
        }),
        FieldDescriptor::Degree { degree } => Err(FieldError::UnsupportedDegree(degree)),
        FieldDescriptor::RealQuadratic { d } => {
            if d < 2 || !is_squarefree(d as u64) {
                return Err(FieldError::BadDiscriminant(d));
            }
            let (disc, t, n) = if d % 4 == 1 { (d, 1, (1 - d) / 4) } else { (4 * d, 0, -d) };
            let mut f = NumberField {
                descriptor: desc.clone(),
                degree: 2,
                d,
                disc,
                t,
                n,
                eps0: None,
                eps0_norm: 0,
                tp_unit: FieldElement::one(),
                class_number: 0,
                narrow_class_number: 0,
                class_reps: Vec::new(),
                residue: 0.0,
                regulator: 0.0,
                level_primes,
            };
            let eps0 = fundamental_unit(disc, t, n);
            let eps0_norm = f.norm(&eps0).to_integer() as i64;
            f.tp_unit = if eps0_norm == 1 { eps0.clone() } else { f.mul(&eps0, &eps0) };
            f.regulator = f.embed(&eps0)[0].ln();
            f.eps0 = Some(eps0);
            f.eps0_norm = eps0_norm;
            f.narrow_class_number = narrow_class_number_by_forms(disc);
            f.class_number = if eps0_norm == 1 {
                f.narrow_class_number / 2
            } else {
                f.narrow_class_number
            };
            f.residue = 2.0 * f.class_number as f64 * f.regulator / (disc as f64).sqrt();
            f.class_reps = ideals::narrow_class_representatives(&f)?;
            Ok(f)
        }
    }
}

/// Continued-fraction expansion of omega until a convergent yields a unit.
fn fundamental_unit(disc: i64, t: i64, n: i64) -> FieldElement {
    let delta = disc as i128;
    let (t, n) = (t as i128, n as i128);
    // x = (pp + sqrt(delta)) / qq
    let (mut pp, mut qq) = (t, 2i128);
    let (mut p_prev, mut p_cur) = (0i128, 1i128);
    let (mut q_prev, mut q_cur) = (1i128, 0i128);
    loop {
        let a = floor_quadratic(pp, qq, delta);
        let p_next = a * p_cur + p_prev;
        let q_next = a * q_cur + q_prev;
        (p_prev, p_cur) = (p_cur, p_next);
        (q_prev, q_cur) = (q_cur, q_next);
        let (x, y) = (p_cur, -q_cur);
        let nrm = x * x + t * x * y + n * y * y;
        if q_cur > 0 && (nrm == 1 || nrm == -1) {
            // conjugate of the small convergent unit is the large one
            return FieldElement::ints(p_cur - q_cur * t, q_cur);
        }
        let pn = a * qq - pp;
        let qn = (delta - pn * pn) / qq;
        pp = pn;
        qq = qn;
    }
}

/// `floor((p + sqrt(delta)) / q)` for non-square `delta`, exact.
fn floor_quadratic(p: i128, q: i128, delta: i128) -> i128 {
    let approx = ((p as f64 + (delta as f64).sqrt()) / q as f64).floor() as i128;
    let le = |a: i128| -> bool {
        // a <= (p + sqrt(delta))/q
        let lhs = a * q - p;
        if q > 0 {
            lhs <= 0 || lhs * lhs < delta
        } else {
            lhs >= 0 && lhs * lhs > delta
        }
    };
    let mut a = approx;
    while !le(a) {
        a -= 1;
    }
    while le(a + 1) {
        a += 1;
    }
    a
}

/// Counts cycles of reduced indefinite binary quadratic forms of discriminant `disc`.
pub fn narrow_class_number_by_forms(disc: i64) -> usize {
    let dl = disc as i128;
    let s = isqrt(dl as u128) as i128;
    let lt_sqrt = |x: i128| x < 0 || x * x < dl;
    let mut forms = Vec::new();
    for b in 1..=s {
        if (b - dl).rem_euclid(2) != 0 {
            continue;
        }
        let m = (dl - b * b) / 4;
        for a_abs in 1..=(s + b) {
            // sqrt(D) - b < 2|a| < sqrt(D) + b
            if !lt_sqrt(2 * a_abs - b) || lt_sqrt(2 * a_abs + b) {
                continue;
            }
            if m % a_abs != 0 {
                continue;
            }
            for sgn in [1i128, -1] {
                let a = sgn * a_abs;
                let c = (b * b - dl) / (4 * a);
                forms.push((a, b, c));
            }
        }
    }
    forms.sort();
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for i in 0..forms.len() {
        if seen[i] {
            continue;
        }
        cycles += 1;
        let mut f = forms[i];
        loop {
            let idx = forms.binary_search(&f).expect("rho keeps forms reduced");
            if seen[idx] {
                break;
            }
            seen[idx] = true;
            let (_, b, c) = f;
            let two_c = 2 * c.abs();
            let bn = s - (s + b).rem_euclid(two_c);
            let cn = (bn * bn - dl) / (4 * c);
            f = (c, bn, cn);
        }
    }
    cycles
}

impl NumberField {
    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn label(&self) -> String {
        self.descriptor.label()
    }

    pub fn sqrt_disc(&self) -> f64 {
        (self.disc as f64).sqrt()
    }

    /// Real embeddings of omega, larger first.
    pub fn omega_embeddings(&self) -> [f64; 2] {
        if self.degree == 1 {
            return [0.0, 0.0];
        }
        let r = self.sqrt_disc();
        [(self.t as f64 + r) / 2.0, (self.t as f64 - r) / 2.0]
    }

    pub fn embed(&self, x: &FieldElement) -> Vec<f64> {
        let a = x.a.to_f64().unwrap();
        if self.degree == 1 {
            return vec![a];
        }
        let b = x.b.to_f64().unwrap();
        let w = self.omega_embeddings();
        vec![a + b * w[0], a + b * w[1]]
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let (t, n) = (rat(self.t as i128), rat(self.n as i128));
        FieldElement {
            a: x.a * y.a - x.b * y.b * n,
            b: x.a * y.b + x.b * y.a + x.b * y.b * t,
        }
    }

    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        if self.degree == 1 {
            return x.clone();
        }
        FieldElement { a: x.a + x.b * rat(self.t as i128), b: -x.b }
    }

    pub fn norm(&self, x: &FieldElement) -> Rat {
        if self.degree == 1 {
            return x.a;
        }
        x.a * x.a + x.a * x.b * rat(self.t as i128) + x.b * x.b * rat(self.n as i128)
    }

    pub fn trace(&self, x: &FieldElement) -> Rat {
        if self.degree == 1 {
            return x.a;
        }
        x.a * rat(2) + x.b * rat(self.t as i128)
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement("inverse"));
        }
        if self.degree == 1 {
            return Ok(FieldElement::new(x.a.recip(), Rat::zero()));
        }
        let nm = self.norm(x);
        Ok(self.conj(x).scale(&nm.recip()))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &FieldElement, e: i64) -> FieldElement {
        let base = if e < 0 { self.inv(x).expect("nonzero base") } else { x.clone() };
        let mut r = FieldElement::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        r
    }

    /// `sqrt(disc)` as a field element.
    pub fn sqrt_disc_element(&self) -> FieldElement {
        if self.degree == 1 {
            return FieldElement::one();
        }
        FieldElement::ints(-(self.t as i128), 2)
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement("sign"));
        }
        if self.degree == 1 {
            return Ok(x.a.is_positive());
        }
        // exact: x >> 0 iff trace > 0 and norm > 0
        Ok(self.norm(x).is_positive() && self.trace(x).is_positive())
    }

    fn log_tp_unit(&self) -> f64 {
        self.embed(&self.tp_unit)[0].ln()
    }

    /// Unit multiple of `x` (by a totally positive unit power, |m| <= 64) with
    /// the smallest spread between embedding sizes.
    pub fn balanced_representative(&self, x: &FieldElement) -> Result<Balanced, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement("balanced representative"));
        }
        if self.degree == 1 {
            return Ok(Balanced { element: x.clone(), exponent: 0, ratio: 1.0 });
        }
        let e = self.embed(x);
        let log_r = (e[0].abs() / e[1].abs()).ln();
        let lu = self.log_tp_unit();
        let spread = |m: i64| (log_r + 2.0 * m as f64 * lu).abs();
        let centre = (-log_r / (2.0 * lu)).round() as i64;
        let mut best = centre.clamp(-64, 64);
        for m in (centre - 1).max(-64)..=(centre + 1).min(64) {
            let (sm, sb) = (spread(m), spread(best));
            if sm < sb - 1e-12 || ((sm - sb).abs() <= 1e-12 && m < best) {
                best = m;
            }
        }
        let element = self.mul(x, &self.pow(&self.tp_unit, best));
        Ok(Balanced { element, exponent: best, ratio: spread(best).exp() })
    }

    pub fn totally_positive_units_mod_squares(&self) -> Vec<FieldElement> {
        if self.degree == 1 || self.eps0_norm == -1 {
            vec![FieldElement::one()]
        } else {
            vec![FieldElement::one(), self.tp_unit.clone()]
        }
    }

    /// Totally positive units whose embeddings are all at most `bound`.
    pub fn unit_window(&self, bound: f64) -> Vec<FieldElement> {
        if self.degree == 1 || bound < 1.0 {
            return vec![FieldElement::one()];
        }
        let mmax = (bound.ln() / self.log_tp_unit() + 1e-12).floor() as i64;
        (-mmax..=mmax).map(|m| self.pow(&self.tp_unit, m)).collect()
    }

    /// Exponents matching [`NumberField::unit_window`].
    pub fn unit_window_exponents(&self, bound: f64) -> Vec<i64> {
        if self.degree == 1 || bound < 1.0 {
            return vec![0];
        }
        let mmax = (bound.ln() / self.log_tp_unit() + 1e-12).floor() as i64;
        (-mmax..=mmax).collect()
    }

    /// Element as integer coordinates; panics when not integral.
    pub fn int_coords(&self, x: &FieldElement) -> (i128, i128) {
        assert!(x.is_integral(), "element {x} is not integral");
        (x.a.to_integer(), x.b.to_integer())
    }

    pub fn format_element(&self, x: &FieldElement) -> String {
        if self.degree == 1 {
            return x.a.to_string();
        }
        format!("{}+{}w", x.a, x.b)
    }

    /// Exact square test for rationals, used by constructors.
    pub fn is_unit(&self, x: &FieldElement) -> bool {
        x.is_integral() && self.norm(x).abs().is_one()
    }
}

pub fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Rat::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(d: i64) -> NumberField {
        make_field(&FieldDescriptor::RealQuadratic { d }).unwrap()
    }

    #[test]
    fn known_fundamental_units() {
        let cases: [(i64, (i128, i128), i64); 7] = [
            (2, (1, 1), -1),
            (3, (2, 1), 1),
            (5, (0, 1), -1),
            (6, (5, 2), 1),
            (7, (8, 3), 1),
            (13, (1, 1), -1),
            (94, (2143295, 221064), 1),
        ];
        for (d, (a, b), nrm) in cases {
            let f = quad(d);
            assert_eq!(f.eps0.clone().unwrap(), FieldElement::ints(a, b), "D={d}");
            assert_eq!(f.eps0_norm, nrm, "D={d}");
            assert!(f.embed(f.eps0.as_ref().unwrap())[0] > 1.0);
        }
    }

    #[test]
    fn fundamental_unit_matches_brute_force() {
        // smallest unit > 1 via direct search over y
        for d in [2i64, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 29, 31] {
            let f = quad(d);
            let mut found = None;
            'y: for y in 1..2000i128 {
                for x in -4000i128..4000 {
                    let e = FieldElement::ints(x, y);
                    if f.norm(&e).abs().is_one() && f.embed(&e)[0] > 1.0 {
                        found = Some(e);
                        break 'y;
                    }
                }
            }
            let e = found.unwrap();
            // the search minimises y, which for units > 1 with positive
            // second coordinate is the smallest such unit
            let ours = f.eps0.clone().unwrap();
            assert!(
                (f.embed(&e)[0] - f.embed(&ours)[0]).abs() < 1e-9 * f.embed(&ours)[0],
                "D={d}: brute {e} vs {ours}"
            );
        }
    }

    #[test]
    fn narrow_class_numbers() {
        for (d, hp, h) in [(2, 1, 1), (3, 2, 1), (5, 1, 1), (6, 2, 1), (10, 2, 2), (15, 4, 2), (34, 4, 2), (79, 6, 3)] {
            let f = quad(d);
            assert_eq!(f.narrow_class_number, hp, "D={d}");
            assert_eq!(f.class_number, h, "D={d}");
            assert_eq!(f.class_reps.len(), hp);
        }
    }

    #[test]
    fn residue_of_sqrt5() {
        let f = quad(5);
        assert!((f.residue - 0.4304089).abs() < 1e-7);
        assert_eq!(f.disc, 5);
    }

    #[test]
    fn descriptors_and_errors() {
        assert_eq!(
            make_field(&FieldDescriptor::RealQuadratic { d: 8 }).unwrap_err(),
            FieldError::BadDiscriminant(8)
        );
        assert_eq!(
            make_field(&FieldDescriptor::RealQuadratic { d: -5 }).unwrap_err(),
            FieldError::BadDiscriminant(-5)
        );
        assert_eq!(
            make_field(&FieldDescriptor::Degree { degree: 3 }).unwrap_err(),
            FieldError::UnsupportedDegree(3)
        );
        assert_eq!(FieldDescriptor::parse("Q(sqrt5)").unwrap(), FieldDescriptor::RealQuadratic { d: 5 });
        assert_eq!(FieldDescriptor::parse("q").unwrap(), FieldDescriptor::Rationals);
        let q = make_field(&FieldDescriptor::Rationals).unwrap();
        assert_eq!((q.disc, q.narrow_class_number, q.residue), (1, 1, 1.0));
    }

    #[test]
    fn positivity_and_balancing() {
        let f = quad(5);
        let sqrt5 = f.sqrt_disc_element();
        assert!(!f.is_totally_positive(&sqrt5).unwrap());
        // (3 + sqrt5)/2 = 1 + omega
        assert!(f.is_totally_positive(&FieldElement::ints(1, 1)).unwrap());
        assert!(f.is_totally_positive(&FieldElement::zero()).is_err());
        let e6 = f.pow(f.eps0.as_ref().unwrap(), 6);
        let emb = f.embed(&e6);
        assert!((emb[0] - 17.944).abs() < 1e-3 && (emb[1] - 0.0557).abs() < 1e-3);
        let bal = f.balanced_representative(&e6).unwrap();
        assert_eq!(bal.element, FieldElement::one());
        let two = FieldElement::int(2);
        assert_eq!(f.balanced_representative(&two).unwrap().element, two);
    }

    #[test]
    fn units_mod_squares_and_window() {
        assert_eq!(quad(5).totally_positive_units_mod_squares(), vec![FieldElement::one()]);
        assert_eq!(
            quad(3).totally_positive_units_mod_squares(),
            vec![FieldElement::one(), FieldElement::ints(2, 1)]
        );
        let f = quad(5);
        assert_eq!(f.unit_window(10.0).len(), 5);
        assert_eq!(f.unit_window(1.0001), vec![FieldElement::one()]);
        let q = make_field(&FieldDescriptor::Rationals).unwrap();
        assert_eq!(q.unit_window(100.0), vec![FieldElement::one()]);
    }
}
