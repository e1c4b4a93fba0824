//! Diagonal terms of the first and second mollified moments, plain and
//! derivative, as exact finite sums, with their predicted main terms.

use super::mollifier::MollifierSpec;
use super::MomentError;
use crate::arith::factorize;
use crate::exact::{q_to_f64, Poly, Q};
use crate::field::NumberField;
use crate::ideals::{enumerate_ideals, prime_splitting, IdealTable};
use crate::special::kernels::{kernel_f_core, kernel_f_log_core, kernel_g_core, kernel_h_core};
use crate::special::{
    arch_l_factor, kernel_f_closed_form, kernels::kernel_f_derivative_closed_form_weight2, KernelBank, QuadBudget,
    ZetaData,
};
use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;
use std::collections::HashMap;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKind {
    First,
    Second,
    FirstDerivative,
    SecondDerivative,
}

impl MomentKind {
    pub fn name(&self) -> &'static str {
        match self {
            MomentKind::First => "moment1",
            MomentKind::Second => "moment2",
            MomentKind::FirstDerivative => "moment1-deriv",
            MomentKind::SecondDerivative => "moment2-deriv",
        }
    }
}

/// One diagonal evaluation against its predicted main term.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub kind: MomentKind,
    pub field: String,
    pub level_norm: u64,
    pub weight: Vec<u32>,
    pub delta: String,
    pub poly: String,
    pub length: f64,
    pub computed: f64,
    pub predicted: f64,
    /// `computed / predicted`, absent when the prediction vanishes.
    pub ratio: Option<f64>,
    /// Accumulated kernel quadrature error; the sums themselves are finite.
    pub tail_bound: f64,
    pub terms: usize,
    pub wall_time: f64,
}

fn report(
    kind: MomentKind,
    field: &NumberField,
    k: &[u32],
    spec: &MollifierSpec,
    computed: f64,
    predicted: f64,
    tail_bound: f64,
    terms: usize,
    start: Instant,
) -> MomentReport {
    MomentReport {
        kind,
        field: field.label(),
        level_norm: spec.level_norm,
        weight: k.to_vec(),
        delta: spec.delta.to_string(),
        poly: spec.poly.to_string(),
        length: spec.length,
        computed,
        predicted,
        ratio: (predicted != 0.0).then(|| computed / predicted),
        tail_bound,
        terms,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// `P'(1)`.
pub fn first_bracket(p: &Poly<Q>) -> Q {
    p.derivative().eval(&Q::one())
}

/// `||P''||^2 / Delta^3 + P'(1)^2 / Delta^2`.
pub fn second_bracket(p: &Poly<Q>, delta: &Q) -> Q {
    let pp = p.derivative().derivative();
    let l2 = (&pp * &pp).integral01();
    let d1 = first_bracket(p);
    l2 / (delta * delta * delta) + &d1 * &d1 / (delta * delta)
}

/// `P(1) + P'(1) / Delta`.
pub fn first_derivative_bracket(p: &Poly<Q>, delta: &Q) -> Q {
    p.eval(&Q::one()) + first_bracket(p) / delta
}

/// `||P''||^2 / (3 Delta^3) + (P(1) + P'(1)/Delta)^2`.
pub fn second_derivative_bracket(p: &Poly<Q>, delta: &Q) -> Q {
    let pp = p.derivative().derivative();
    let l2 = (&pp * &pp).integral01();
    let l = first_derivative_bracket(p, delta);
    l2 / (Q::from_integer(3.into()) * delta * delta * delta) + &l * &l
}

/// `zeta_F(2) L_inf(1/2) / res zeta_F`.
pub fn main_term_constant(field: &NumberField, k: &[u32]) -> Result<f64, MomentError> {
    let z2 = ZetaData { disc: field.disc, removed_norm: None }.value(Complex64::new(2.0, 0.0)).re;
    let arch = arch_l_factor(k, Complex64::new(0.5, 0.0))?.re;
    Ok(z2 * arch / field.residue)
}

pub fn predicted(kind: MomentKind, field: &NumberField, k: &[u32], spec: &MollifierSpec) -> Result<f64, MomentError> {
    let c = main_term_constant(field, k)?;
    let n = spec.level_norm as f64;
    let ln = n.ln();
    let d = spec.delta_f64();
    let p = &spec.poly;
    Ok(match kind {
        MomentKind::First => 2.0 * n.powf(0.25) / (d * ln) * c * q_to_f64(&first_bracket(p)),
        MomentKind::Second => 8.0 * n.sqrt() / (ln * ln) * c * c * q_to_f64(&second_bracket(p, &spec.delta)),
        MomentKind::FirstDerivative => c * n.powf(0.25) * q_to_f64(&first_derivative_bracket(p, &spec.delta)),
        MomentKind::SecondDerivative => {
            2.0 * c * c * n.sqrt() * q_to_f64(&second_derivative_bracket(p, &spec.delta))
        }
    })
}

fn prepare(field: &NumberField, k: &[u32], spec: &MollifierSpec) -> Result<IdealTable, MomentError> {
    let nq = spec.level_norm;
    let prime_level = match factorize(nq).as_slice() {
        [(p, _)] => prime_splitting(field, *p).iter().any(|pr| pr.norm == nq),
        _ => false,
    };
    if !prime_level {
        return Err(MomentError::Precondition(format!("no prime ideal of norm {nq}")));
    }
    if k.len() != field.degree || k.iter().any(|&x| x == 0 || x % 2 == 1) {
        return Err(MomentError::Precondition(format!("weight {k:?} is not even of length {}", field.degree)));
    }
    if spec.length >= (nq as f64).sqrt() {
        return Err(MomentError::Precondition(format!("M = {} is not below N(q)^(1/2)", spec.length)));
    }
    Ok(enumerate_ideals(field, spec.length))
}

/// Kernel values with error, memoised by norm.
struct Memo<F: FnMut(f64) -> Result<(f64, f64), MomentError>> {
    eval: F,
    cache: HashMap<u64, (f64, f64)>,
}

impl<F: FnMut(f64) -> Result<(f64, f64), MomentError>> Memo<F> {
    fn new(eval: F) -> Self {
        Memo { eval, cache: HashMap::new() }
    }
    fn get(&mut self, norm: u64, y: f64) -> Result<(f64, f64), MomentError> {
        if let Some(&v) = self.cache.get(&norm) {
            return Ok(v);
        }
        let v = (self.eval)(y)?;
        self.cache.insert(norm, v);
        Ok(v)
    }
}

fn first_moment_sum<F>(table: &IdealTable, spec: &MollifierSpec, mut kern: F) -> Result<(f64, f64, usize), MomentError>
where
    F: FnMut(f64) -> Result<(f64, f64), MomentError>,
{
    let root = (spec.level_norm as f64).sqrt();
    let (mut sum, mut err, mut terms) = (0.0, 0.0, 0);
    for r in &table.ideals {
        let mu = table.moebius(r);
        if mu == 0 {
            continue;
        }
        let c = spec.coeff(mu, table.psi(r), r.norm) / (r.norm as f64).sqrt();
        let (v, e) = kern(r.norm as f64 / root)?;
        sum += c * v;
        err += c.abs() * e;
        terms += 1;
    }
    let pref = (spec.level_norm as f64).powf(0.25);
    Ok((pref * sum, pref * err, terms))
}

/// `N^{1/4} sum_{N(m) <= M} mu(m) F(N(m)/N^{1/2}) P(..) / (psi(m) N(m))`.
pub fn moment1_diagonal(
    field: &NumberField,
    k: &[u32],
    spec: &MollifierSpec,
    budget: &QuadBudget,
) -> Result<MomentReport, MomentError> {
    let start = Instant::now();
    let table = prepare(field, k, spec)?;
    let (value, err, terms) = if field.degree == 1 {
        let k0 = k[0];
        first_moment_sum(&table, spec, |y| Ok((kernel_f_closed_form(y, k0), 0.0)))?
    } else {
        let mut bank = KernelBank::new(kernel_f_core(k), budget.clone());
        first_moment_sum(&table, spec, |y| {
            let v = bank.eval(y)?;
            Ok((v.value, v.error))
        })?
    };
    let pred = predicted(MomentKind::First, field, k, spec)?;
    Ok(report(MomentKind::First, field, k, spec, value, pred, err, terms, start))
}

/// First moment with the s-derivative kernel `F_log(y) - log(y) F(y)`.
pub fn moment1_derivative_diagonal(
    field: &NumberField,
    k: &[u32],
    spec: &MollifierSpec,
    budget: &QuadBudget,
) -> Result<MomentReport, MomentError> {
    let start = Instant::now();
    let table = prepare(field, k, spec)?;
    let (value, err, terms) = if field.degree == 1 && k[0] == 2 {
        first_moment_sum(&table, spec, |y| Ok((kernel_f_derivative_closed_form_weight2(y), 0.0)))?
    } else {
        let mut bf = KernelBank::new(kernel_f_core(k), budget.clone());
        let mut bl = KernelBank::new(kernel_f_log_core(k), budget.clone());
        first_moment_sum(&table, spec, |y| {
            let (f, l) = (bf.eval(y)?, bl.eval(y)?);
            Ok((l.value - y.ln() * f.value, l.error + y.ln().abs() * f.error))
        })?
    };
    let pred = predicted(MomentKind::FirstDerivative, field, k, spec)?;
    Ok(report(MomentKind::FirstDerivative, field, k, spec, value, pred, err, terms, start))
}

pub(crate) fn merge(a: &[(usize, u32)], b: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

/// `sum_{n1 n2 = n} log N(n1) log N(n2)` from the factorization of `n`.
pub fn log_pair_sum(factors: &[(usize, u32)], table: &IdealTable) -> f64 {
    let tau: f64 = factors.iter().map(|&(_, e)| e as f64 + 1.0).product();
    let mut b = 0.0;
    let mut sq = 0.0;
    for &(i, e) in factors {
        let l = (table.primes[i].norm as f64).ln();
        let e = e as f64;
        b += e * l;
        sq += l * l * e * (e + 2.0);
    }
    tau * (b * b / 4.0 - sq / 12.0)
}

/// Visits `(m1, m2, P_{m1 d} P_{m2 d})` over all `d` and all pairs with
/// `N(m_i d) <= M`.
fn second_moment_pairs<V>(table: &IdealTable, spec: &MollifierSpec, mut visit: V) -> Result<usize, MomentError>
where
    V: FnMut(&[(usize, u32)], u64, f64) -> Result<(), MomentError>,
{
    let index: HashMap<&[(usize, u32)], usize> =
        table.ideals.iter().enumerate().map(|(i, r)| (r.factors.as_slice(), i)).collect();
    let coeff: Vec<f64> = table
        .ideals
        .iter()
        .map(|r| spec.coeff(table.moebius(r), table.psi(r), r.norm))
        .collect();
    let mut pairs = 0;
    for d in &table.ideals {
        if table.moebius(d) == 0 {
            continue;
        }
        let lim = spec.length / d.norm as f64;
        let row: Vec<(usize, f64)> = table
            .ideals
            .iter()
            .enumerate()
            .take_while(|(_, m)| m.norm as f64 <= lim)
            .filter_map(|(i, m)| {
                let md = merge(&m.factors, &d.factors);
                let c = index.get(md.as_slice()).map_or(0.0, |&j| coeff[j]);
                (c != 0.0).then_some((i, c))
            })
            .collect();
        for &(i1, c1) in &row {
            for &(i2, c2) in &row {
                let (m1, m2) = (&table.ideals[i1], &table.ideals[i2]);
                visit(&merge(&m1.factors, &m2.factors), m1.norm * m2.norm, c1 * c2)?;
                pairs += 1;
            }
        }
    }
    Ok(pairs)
}

fn level_zeta(field: &NumberField, spec: &MollifierSpec) -> ZetaData {
    ZetaData { disc: field.disc, removed_norm: Some(spec.level_norm as f64) }
}

/// `2 N^{1/2} sum_d sum_{m1, m2} G(N(m1 m2)/N) tau(m1 m2) N(m1 m2)^{-1/2} P_{m1 d} P_{m2 d}`.
pub fn moment2_diagonal(
    field: &NumberField,
    k: &[u32],
    spec: &MollifierSpec,
    budget: &QuadBudget,
) -> Result<MomentReport, MomentError> {
    let start = Instant::now();
    let table = prepare(field, k, spec)?;
    let nq = spec.level_norm as f64;
    let mut bank = KernelBank::new(kernel_g_core(k, &level_zeta(field, spec)), budget.clone());
    let mut g = Memo::new(|y| {
        let v = bank.eval(y)?;
        Ok((v.value, v.error))
    });
    let (mut sum, mut err) = (0.0, 0.0);
    let terms = second_moment_pairs(&table, spec, |n, norm, c| {
        let tau: f64 = n.iter().map(|&(_, e)| e as f64 + 1.0).product();
        let (v, e) = g.get(norm, norm as f64 / nq)?;
        let w = c * tau / (norm as f64).sqrt();
        sum += w * v;
        err += w.abs() * e;
        Ok(())
    })?;
    let pref = 2.0 * nq.sqrt();
    let pred = predicted(MomentKind::Second, field, k, spec)?;
    Ok(report(MomentKind::Second, field, k, spec, pref * sum, pred, pref * err, terms, start))
}

/// Second moment with the mixed s-derivative kernel, assembled from the
/// six kernels `H_ij = int y^{-s} L^2 l^i Z_j ds/s`.
pub fn moment2_derivative_diagonal(
    field: &NumberField,
    k: &[u32],
    spec: &MollifierSpec,
    budget: &QuadBudget,
) -> Result<MomentReport, MomentError> {
    const IJ: [(u32, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)];
    let start = Instant::now();
    let table = prepare(field, k, spec)?;
    let nq = spec.level_norm as f64;
    let zeta = level_zeta(field, spec);
    let mut banks: Vec<KernelBank> =
        IJ.iter().map(|&(i, j)| KernelBank::new(kernel_h_core(i, j, k, &zeta), budget.clone())).collect();
    let mut cache: HashMap<u64, [(f64, f64); 6]> = HashMap::new();
    let a = 0.5 * nq.ln();
    let (mut sum, mut err) = (0.0, 0.0);
    let terms = second_moment_pairs(&table, spec, |n, norm, c| {
        let h = match cache.get(&norm) {
            Some(h) => *h,
            None => {
                let mut h = [(0.0, 0.0); 6];
                for (slot, bank) in h.iter_mut().zip(banks.iter_mut()) {
                    let v = bank.eval(norm as f64 / nq)?;
                    *slot = (v.value, v.error);
                }
                cache.insert(norm, h);
                h
            }
        };
        let tau: f64 = n.iter().map(|&(_, e)| e as f64 + 1.0).product();
        let b = (norm as f64).ln();
        let s2 = log_pair_sum(n, &table);
        let w = [
            tau * (a * a - a * b) + s2,
            -tau * (2.0 * a - b),
            tau,
            tau * (2.0 * a - b),
            -2.0 * tau,
            tau,
        ];
        let scale = c / (norm as f64).sqrt();
        for (wi, (v, e)) in w.iter().zip(h.iter()) {
            sum += scale * wi * v;
            err += (scale * wi).abs() * e;
        }
        Ok(())
    })?;
    let pref = 2.0 * nq.sqrt();
    let pred = predicted(MomentKind::SecondDerivative, field, k, spec)?;
    Ok(report(MomentKind::SecondDerivative, field, k, spec, pref * sum, pred, pref * err, terms, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::field::{make_field, FieldDescriptor};

    fn rationals() -> NumberField {
        make_field(&FieldDescriptor::Rationals).unwrap()
    }

    fn spec(q_norm: u64, p: &[i64]) -> MollifierSpec {
        MollifierSpec::new(Poly::from_ints(p), q(1, 2), q_norm).unwrap()
    }

    #[test]
    fn brackets_exact() {
        let p = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(second_bracket(&p, &q(1, 2)), qi(48));
        // doubling Delta: 4/1 + 4/1 against 4*8 + 4*4
        assert_eq!(second_bracket(&p, &qi(1)) / second_bracket(&p, &q(1, 2)), q(8, 48));
        assert_eq!(first_derivative_bracket(&p, &qi(1)), qi(3));
        // (1/3)*4 + 9
        assert_eq!(second_derivative_bracket(&p, &qi(1)), q(31, 3));
    }

    #[test]
    fn log_pair_sum_matches_divisors() {
        let f = rationals();
        let t = enumerate_ideals(&f, 400.0);
        for r in t.ideals.iter().filter(|r| [1u64, 12, 360, 49, 210].contains(&r.norm)) {
            let n = r.norm;
            let brute: f64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| (d as f64).ln() * ((n / d) as f64).ln())
                .sum();
            assert!((log_pair_sum(&r.factors, &t) - brute).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn first_moment_oracle_value() {
        // direct float summation with the closed-form kernel
        let r = moment1_diagonal(&rationals(), &[2], &spec(10009, &[0, 0, 1]), &QuadBudget::default()).unwrap();
        assert!((r.computed - 1.160032320610911).abs() < 1e-12, "{r:?}");
        assert!((r.predicted - 2.2742499270312866).abs() < 1e-12);
    }

    #[test]
    fn second_moment_oracle_value() {
        // independent arbitrary-precision quadrature of the kernel
        let r = moment2_diagonal(&rationals(), &[2], &spec(10009, &[0, 0, 1]), &QuadBudget::default()).unwrap();
        assert!((r.computed / 5.394990500979044 - 1.0).abs() < 1e-8, "{r:?}");
        assert!((r.predicted / 31.033276383610854 - 1.0).abs() < 1e-12);
        assert!(r.computed > 0.0);
    }

    #[test]
    fn bank_route_matches_closed_form() {
        let f = rationals();
        let s = spec(100003, &[0, 0, 1, -1]);
        let closed = moment1_derivative_diagonal(&f, &[2], &s, &QuadBudget::default()).unwrap();
        let table = prepare(&f, &[2], &s).unwrap();
        let b = QuadBudget::default();
        let mut bf = KernelBank::new(kernel_f_core(&[2]), b.clone());
        let mut bl = KernelBank::new(kernel_f_log_core(&[2]), b);
        let (v, _, _) = first_moment_sum(&table, &s, |y| {
            let (f, l) = (bf.eval(y)?, bl.eval(y)?);
            Ok((l.value - y.ln() * f.value, 0.0))
        })
        .unwrap();
        assert!((v / closed.computed - 1.0).abs() < 1e-8);
    }

    #[test]
    fn scale_equivariance() {
        let f = rationals();
        let b = QuadBudget::default();
        let s = spec(10009, &[0, 0, 2, -1]);
        let s3 = s.scaled(&qi(3));
        let m1 = moment1_diagonal(&f, &[2], &s, &b).unwrap().computed;
        let m1c = moment1_diagonal(&f, &[2], &s3, &b).unwrap().computed;
        assert!((m1c - 3.0 * m1).abs() < 1e-12 * m1.abs());
        let m2 = moment2_diagonal(&f, &[2], &s, &b).unwrap().computed;
        let m2c = moment2_diagonal(&f, &[2], &s3, &b).unwrap().computed;
        assert!((m2c - 9.0 * m2).abs() < 1e-12 * m2.abs());
    }

    #[test]
    fn budget_doubling_changes_kernel_digits_only() {
        let f = rationals();
        let s = spec(10009, &[0, 0, 1]);
        let b1 = QuadBudget::default();
        let b2 = QuadBudget { t_max: 2.0 * b1.t_max, step: b1.step / 2.0, tol: b1.tol };
        let a = moment2_diagonal(&f, &[2], &s, &b1).unwrap();
        let c = moment2_diagonal(&f, &[2], &s, &b2).unwrap();
        assert_eq!(a.terms, c.terms);
        assert!((a.computed / c.computed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vanishing_linear_term() {
        // P = X^2 (1 - X)^2 has P'(1) = 0
        let f = rationals();
        let s = spec(100003, &[0, 0, 1, -2, 1]);
        let r = moment1_diagonal(&f, &[2], &s, &QuadBudget::default()).unwrap();
        assert_eq!(r.predicted, 0.0);
        assert!(r.ratio.is_none());
        let n = 100003f64;
        assert!(r.computed.abs() < n.powf(0.25) / n.ln().powi(2), "{}", r.computed);
    }

    #[test]
    fn preconditions() {
        let f = rationals();
        let b = QuadBudget::default();
        let wide = MollifierSpec::new(Poly::from_ints(&[0, 0, 1]), q(11, 10), 10009).unwrap();
        assert!(matches!(moment1_diagonal(&f, &[2], &wide, &b), Err(MomentError::Precondition(_))));
        let composite = MollifierSpec::new(Poly::from_ints(&[0, 0, 1]), q(1, 2), 10011).unwrap();
        assert!(moment1_diagonal(&f, &[2], &composite, &b).is_err());
    }

    #[test]
    fn derivative_moments_positive_and_finite() {
        let f = rationals();
        let b = QuadBudget::default();
        let s = spec(10009, &[0, 0, 6, -1]);
        let m1 = moment1_derivative_diagonal(&f, &[2], &s, &b).unwrap();
        let m2 = moment2_derivative_diagonal(&f, &[2], &s, &b).unwrap();
        assert!(m1.computed > 0.0 && m2.computed > 0.0, "{m1:?} {m2:?}");
        assert!(m2.tail_bound < 1e-6 * m2.computed);
    }
}
