//! Large-sieve ratios: the additive single-modulus form over the rationals
//! and the harmonic spectral form over a newform family.

use super::MomentError;
use crate::field::NumberField;
use crate::ideals::{IdealRecord, IdealTable, PrimeIdeal};
use crate::petersson::{oldform_basis_coeff, SpectralFamily};
use std::f64::consts::PI;

/// `sum_{d mod c} |sum_{n <= X} y_n e(d n / c)|^2` with `y[n - 1] = y_n`.
pub fn additive_sieve_sum(c: u64, y: &[f64]) -> f64 {
    let mut total = 0.0;
    for d in 0..c {
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in y.iter().enumerate() {
            let r = (d * (i as u64 + 1)) % c;
            let th = 2.0 * PI * r as f64 / c as f64;
            re += v * th.cos();
            im += v * th.sin();
        }
        total += re * re + im * im;
    }
    total
}

/// The same sum through orthogonality: `c sum_r |sum_{n = r (c)} y_n|^2`.
pub fn additive_sieve_by_classes(c: u64, y: &[f64]) -> f64 {
    let mut class = vec![0.0; c as usize];
    for (i, &v) in y.iter().enumerate() {
        class[(i + 1) % c as usize] += v;
    }
    c as f64 * class.iter().map(|x| x * x).sum::<f64>()
}

/// `sum_{d mod c} |..|^2 / ((c + X) ||y||^2)` with `X = y.len()`.
pub fn additive_sieve_ratio(c: u64, y: &[f64]) -> f64 {
    let norm2: f64 = y.iter().map(|v| v * v).sum();
    additive_sieve_sum(c, y) / ((c as f64 + y.len() as f64) * norm2)
}

fn factor_list(table: &IdealTable, r: &IdealRecord) -> Vec<(PrimeIdeal, u32)> {
    r.factors.iter().map(|&(i, e)| (table.primes[i].clone(), e)).collect()
}

/// `sum^h |sum_n lambda(n) x_n|^2 / ((1 + X / N(q)) ||x||^2)` over the
/// ideals of `table`, including the old-form pairs of the family.
pub fn spectral_sieve_ratio(
    field: &NumberField,
    family: &SpectralFamily,
    table: &IdealTable,
    x: &[f64],
    big_x: f64,
) -> Result<f64, MomentError> {
    family.validate()?;
    if x.len() != table.ideals.len() {
        return Err(MomentError::Precondition("one coefficient per ideal expected".into()));
    }
    if table.ideals.iter().zip(x).any(|(r, &v)| v != 0.0 && r.norm as f64 > big_x) {
        return Err(MomentError::Precondition(format!("coefficients beyond norm {big_x}")));
    }
    let mut acc = 0.0;
    for (f, w) in &family.newforms {
        let lam = f.lambda_table(table, field)?;
        let s: f64 = lam.iter().zip(x).map(|(l, v)| l * v).sum();
        acc += w * s * s;
    }
    for (f, w) in &family.oldforms {
        let lam = f.lambda_table(table, field)?;
        let s: f64 = lam.iter().zip(x).map(|(l, v)| l * v).sum();
        let mut t = 0.0;
        for (r, v) in table.ideals.iter().zip(x) {
            t += oldform_basis_coeff(field, f, &family.level, &factor_list(table, r))? * v;
        }
        acc += w * (s * s + t * t);
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    Ok(acc / ((1.0 + big_x / family.level.norm as f64) * norm2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonality_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(c, x) in &[(7u64, 50usize), (101, 500)] {
            let y: Vec<f64> = (0..x).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = additive_sieve_sum(c, &y);
            let b = additive_sieve_by_classes(c, &y);
            assert!((a - b).abs() < 1e-9 * b);
            assert!(additive_sieve_ratio(c, &y) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn constant_vector_concentrates_at_zero() {
        for c in [7u64, 101] {
            let y = vec![1.0; c as usize];
            let s = additive_sieve_sum(c, &y);
            assert!((s - (c * c) as f64).abs() < 1e-8 * (c * c) as f64);
            assert!((additive_sieve_ratio(c, &y) - 0.5).abs() < 1e-10);
        }
    }
}
