//! Growth of the number of newforms with the level, and the diagonal
//! main term of the harmonic average of `L(1, sym^2)`.

use crate::field::NumberField;
use crate::special::gamma::ln_gamma_real;
use crate::special::ZetaData;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `prod_j pi^{-(s+1)/2} Gamma((s+1)/2) (2 pi)^{-(s+k_j-1)} Gamma(s+k_j-1)`.
pub fn arch_sym2_factor(k: &[u32], s: f64) -> f64 {
    k.iter()
        .map(|&kj| {
            let a = (s + 1.0) / 2.0;
            let b = s + kj as f64 - 1.0;
            (-a * PI.ln() + ln_gamma_real(a) - b * (2.0 * PI).ln() + ln_gamma_real(b)).exp()
        })
        .product()
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelTerms {
    pub level_norm: u64,
    /// `zeta_F^{(q)}(2) L(1, sym^2 pi_inf)`.
    pub main_term: f64,
    /// `zeta_F^{(q)}(2)` from the zeta evaluator.
    pub zeta_removed: f64,
    /// `zeta_F(2) (1 - N(q)^{-2})`.
    pub zeta_removed_product: f64,
    /// Residue at `s = -1/2` of `N^s zeta_F^{(q)}(2+2s) L(s+1, sym^2 pi_inf) / (s+1)`.
    pub secondary: f64,
}

pub fn level_terms(field: &NumberField, k: &[u32], level_norm: u64) -> LevelTerms {
    let nq = level_norm as f64;
    let two = Complex64::new(2.0, 0.0);
    let z2 = ZetaData { disc: field.disc, removed_norm: None }.value(two).re;
    let zq = ZetaData { disc: field.disc, removed_norm: Some(nq) }.value(two).re;
    // zeta_F^{(q)}(2+2s) ~ res (1 - 1/N) / (2 (s + 1/2)), and 1/(s+1) = 2 there
    let secondary = nq.powf(-0.5) * field.residue * (1.0 - 1.0 / nq) * arch_sym2_factor(k, 0.5);
    LevelTerms {
        level_norm,
        main_term: zq * arch_sym2_factor(k, 1.0),
        zeta_removed: zq,
        zeta_removed_product: z2 * (1.0 - nq.powi(-2)),
        secondary,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountFormsReport {
    pub points: Vec<(u64, u64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Genus-growth slope `1/12` for weight 2 over the rationals.
    pub reference_slope: f64,
    pub levels: Vec<LevelTerms>,
}

impl CountFormsReport {
    pub fn slope_error(&self) -> f64 {
        (self.slope - self.reference_slope).abs() / self.reference_slope
    }
}

/// Weight 2 over the rationals: fitted dimension growth, and the main and
/// secondary diagonal terms at each level in `levels`.
pub fn count_forms_check(field: &NumberField, dims: &[(u64, u64)], levels: &[u64]) -> CountFormsReport {
    let pts: Vec<(f64, f64)> = dims.iter().map(|&(q, d)| (q as f64, d as f64)).collect();
    let (slope, intercept) = least_squares(&pts);
    CountFormsReport {
        points: dims.to_vec(),
        slope,
        intercept,
        reference_slope: 1.0 / 12.0,
        levels: levels.iter().map(|&q| level_terms(field, &[2], q)).collect(),
    }
}
