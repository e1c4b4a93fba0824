//! Archimedean L-factors and the smoothing kernels of the central-value
//! formulas, evaluated as vertical-line integrals at a saddle abscissa.

use super::gamma::{digamma, exp_integral_e1, ln_gamma, upper_incomplete_gamma};
use super::mellin::{mellin_line_integral, LineSpec};
use super::zeta::ZetaData;
use super::SpecialError;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Quadrature budget for kernel evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadBudget {
    pub t_max: f64,
    pub step: f64,
    pub tol: f64,
}

impl Default for QuadBudget {
    fn default() -> Self {
        QuadBudget { t_max: 200.0, step: 1.0 / 64.0, tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
    pub sigma: f64,
}

fn shift(k: u32) -> f64 {
    (k as f64 - 1.0) / 2.0
}

/// `prod_j (2 pi)^{-(s + (k_j - 1)/2)} Gamma(s + (k_j - 1)/2)`.
pub fn arch_l_factor(k: &[u32], s: Complex64) -> Result<Complex64, SpecialError> {
    for &kj in k {
        let z = s + shift(kj);
        if z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-12 && z.im.abs() < 1e-12 {
            return Err(SpecialError::Pole(z.re));
        }
    }
    Ok(ln_arch_l(k, s).exp())
}

pub fn ln_arch_l(k: &[u32], s: Complex64) -> Complex64 {
    let l2pi = (2.0 * PI).ln();
    k.iter().map(|&kj| -(s + shift(kj)) * l2pi + ln_gamma(s + shift(kj))).sum()
}

/// Logarithmic derivative of [`arch_l_factor`].
pub fn arch_log_derivative(k: &[u32], s: Complex64) -> Complex64 {
    let l2pi = (2.0 * PI).ln();
    k.iter().map(|&kj| digamma(s + shift(kj)) - l2pi).sum()
}

type CoreFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// `K(y) = (1/2 pi i) int y^{-s} exp(base(s)) extra(s) ds` for real-on-real integrands.
#[derive(Clone)]
pub struct MellinKernel {
    base: CoreFn,
    extra: Option<CoreFn>,
    sigma_lo: f64,
    sigma_hi: f64,
}

impl MellinKernel {
    pub fn new(base: CoreFn, extra: Option<CoreFn>, sigma_lo: f64, sigma_hi: f64) -> Self {
        MellinKernel { base, extra, sigma_lo, sigma_hi }
    }

    fn integrand(&self, s: Complex64, ly: f64) -> Complex64 {
        let v = ((self.base)(s) - s * ly).exp();
        match &self.extra {
            Some(e) => v * e(s),
            None => v,
        }
    }

    /// Abscissa minimising the real-axis size of `y^{-s} exp(base(s))`.
    pub fn saddle(&self, y: f64) -> f64 {
        let ly = y.ln();
        let phi = |x: f64| ((self.base)(Complex64::new(x, 0.0)) - x * ly).re;
        let (mut a, mut b) = (self.sigma_lo.ln(), self.sigma_hi.ln());
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (phi(c.exp()), phi(d.exp()));
        for _ in 0..60 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = phi(c.exp());
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = phi(d.exp());
            }
        }
        ((a + b) / 2.0).exp()
    }

    pub fn eval_at(&self, y: f64, sigma: f64, budget: &QuadBudget) -> Result<KernelValue, SpecialError> {
        if !(y > 0.0) {
            return Err(SpecialError::Domain(format!("kernel argument must be positive, got {y}")));
        }
        let ly = y.ln();
        let t_max = budget.t_max.max(12.0 * sigma.sqrt());
        let spec = LineSpec { sigma, t_max, step: budget.step, oscillation: None };
        let r = mellin_line_integral(|s| self.integrand(s, ly), &spec)?;
        let out = KernelValue { value: r.value.re, error: r.error, sigma };
        check(out, budget)
    }

    pub fn eval(&self, y: f64, budget: &QuadBudget) -> Result<KernelValue, SpecialError> {
        let sigma = self.saddle(y);
        self.eval_at(y, sigma, budget)
    }
}

fn check(v: KernelValue, budget: &QuadBudget) -> Result<KernelValue, SpecialError> {
    let scale = v.value.abs().max(1e-300);
    if v.error > budget.tol * scale.max(1.0) && v.error > budget.tol * scale {
        return Err(SpecialError::Budget { value: v.value, error: v.error, tol: budget.tol });
    }
    Ok(v)
}

/// Node table on one line, reused for many arguments.
struct NodeTable {
    sigma: f64,
    h: f64,
    nodes: Vec<(f64, Complex64)>,
    tail: f64,
}

impl NodeTable {
    fn build(kernel: &MellinKernel, sigma: f64, budget: &QuadBudget) -> Self {
        let t_max = budget.t_max.max(12.0 * sigma.sqrt());
        let mut n = (t_max / budget.step).ceil() as usize;
        n += n % 2;
        let h = t_max / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut peak = f64::NEG_INFINITY;
        let mut tail = 0.0;
        for j in 0..=n {
            let t = j as f64 * h;
            let s = Complex64::new(sigma, t);
            let v = kernel.integrand(s, 0.0);
            let lm = v.norm().ln();
            peak = peak.max(lm);
            nodes.push((t, v));
            if lm < peak - 80.0 && j % 2 == 0 {
                break;
            }
            if j == n {
                tail = v.norm() * t_max;
            }
        }
        NodeTable { sigma, h, nodes, tail }
    }

    /// One-sided trapezoid using conjugate symmetry.
    fn eval(&self, y: f64) -> KernelValue {
        let ly = y.ln();
        let amp = (-self.sigma * ly).exp();
        let last = self.nodes.len() - 1;
        let (mut fine, mut coarse) = (0.0, 0.0);
        for (j, &(t, v)) in self.nodes.iter().enumerate() {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            let term = (v * Complex64::from_polar(1.0, -t * ly)).re * w;
            fine += term;
            if j % 2 == 0 {
                coarse += term;
            }
        }
        // coarse endpoints carry half weight at both ends as well
        let value = amp * fine * self.h / PI;
        let coarse_v = amp * coarse * 2.0 * self.h / PI;
        KernelValue { value, error: (value - coarse_v).abs() + amp * self.tail / PI, sigma: self.sigma }
    }
}

/// Memoised evaluation of one kernel at many arguments, with tables bucketed
/// by saddle abscissa.
pub struct KernelBank {
    kernel: MellinKernel,
    budget: QuadBudget,
    tables: HashMap<i64, NodeTable>,
}

impl KernelBank {
    const BUCKET: f64 = 0.05;

    pub fn new(kernel: MellinKernel, budget: QuadBudget) -> Self {
        KernelBank { kernel, budget, tables: HashMap::new() }
    }

    pub fn eval(&mut self, y: f64) -> Result<KernelValue, SpecialError> {
        let key = (self.kernel.saddle(y).ln() / Self::BUCKET).round() as i64;
        let sigma = (key as f64 * Self::BUCKET).exp();
        let (kernel, budget) = (&self.kernel, &self.budget);
        let table = self.tables.entry(key).or_insert_with(|| NodeTable::build(kernel, sigma, budget));
        check(table.eval(y), &self.budget)
    }
}

fn base_f(k: Vec<u32>) -> CoreFn {
    Arc::new(move |s: Complex64| ln_arch_l(&k, s + 0.5) - s.ln())
}

fn base_g(k: Vec<u32>, zeta: ZetaData) -> CoreFn {
    Arc::new(move |s: Complex64| ln_arch_l(&k, s + 0.5) * 2.0 + zeta.value(s * 2.0 + 1.0).ln() - s.ln())
}

/// Kernel of the central-value series.
pub fn kernel_f_core(k: &[u32]) -> MellinKernel {
    MellinKernel::new(base_f(k.to_vec()), None, 0.1, 5000.0)
}

/// Kernel of the squared central-value series.
pub fn kernel_g_core(k: &[u32], zeta: &ZetaData) -> MellinKernel {
    MellinKernel::new(base_g(k.to_vec(), zeta.clone()), None, 0.1, 5000.0)
}

/// `int y^{-s} L(s+1/2) l(s) ds/s` with `l` the archimedean log-derivative.
pub fn kernel_f_log_core(k: &[u32]) -> MellinKernel {
    let kk = k.to_vec();
    MellinKernel::new(
        base_f(k.to_vec()),
        Some(Arc::new(move |s: Complex64| arch_log_derivative(&kk, s + 0.5))),
        0.1,
        5000.0,
    )
}

/// `int y^{-s} L(s+1/2)^2 l(s)^i Z_j(1+2s) ds/s`, where
/// `Z_j(w) = sum chi(d) log(N d)^j N(d)^-w`.
pub fn kernel_h_core(i: u32, j: usize, k: &[u32], zeta: &ZetaData) -> MellinKernel {
    assert!(j <= 2, "log-power zeta sums are available through j = 2");
    let kk = k.to_vec();
    let z = zeta.clone();
    let extra: CoreFn = Arc::new(move |s: Complex64| {
        let w = s * 2.0 + 1.0;
        let jet = z.jet(w);
        let ratio = jet.0[j] / jet.0[0] * if j == 1 { -1.0 } else { 1.0 };
        arch_log_derivative(&kk, s + 0.5).powu(i) * ratio
    });
    MellinKernel::new(base_g(k.to_vec(), zeta.clone()), Some(extra), 0.1, 5000.0)
}

pub fn kernel_f(y: f64, k: &[u32], budget: &QuadBudget) -> Result<KernelValue, SpecialError> {
    kernel_f_core(k).eval(y, budget)
}

pub fn kernel_g(y: f64, k: &[u32], zeta: &ZetaData, budget: &QuadBudget) -> Result<KernelValue, SpecialError> {
    kernel_g_core(k, zeta).eval(y, budget)
}

/// `(1/2 pi i) int d/ds (y^{-s} L(s+1/2)) ds/s`.
pub fn kernel_f_derivative(y: f64, k: &[u32], budget: &QuadBudget) -> Result<KernelValue, SpecialError> {
    let base = kernel_f_core(k);
    let sigma = base.saddle(y);
    let f = base.eval_at(y, sigma, budget)?;
    let fl = kernel_f_log_core(k).eval_at(y, sigma, budget)?;
    let value = fl.value - y.ln() * f.value;
    Ok(KernelValue { value, error: fl.error + y.ln().abs() * f.error, sigma })
}

/// Closed form of the central-value kernel over the rationals.
pub fn kernel_f_closed_form(y: f64, k: u32) -> f64 {
    let a = k as f64 / 2.0;
    (2.0 * PI).powf(-a) * upper_incomplete_gamma(a, 2.0 * PI * y)
}

/// Closed form of the derivative kernel for weight 2 over the rationals.
pub fn kernel_f_derivative_closed_form_weight2(y: f64) -> f64 {
    exp_integral_e1(2.0 * PI * y) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn arch_factor_values() {
        let half = Complex64::new(0.5, 0.0);
        assert_relative_eq!(arch_l_factor(&[2], half).unwrap().re, 1.0 / (2.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(arch_l_factor(&[2, 2], half).unwrap().re, (2.0 * PI).powi(-2), max_relative = 1e-14);
        assert_relative_eq!(arch_l_factor(&[12], half).unwrap().re, 120.0 / (2.0 * PI).powi(6), max_relative = 1e-13);
        assert!(arch_l_factor(&[2], Complex64::new(-0.5, 0.0)).is_err());
    }

    #[test]
    fn f_kernel_limits() {
        let b = QuadBudget::default();
        assert_relative_eq!(kernel_f(0.5, &[2], &b).unwrap().value, (-PI).exp() / (2.0 * PI), max_relative = 1e-10);
        assert_relative_eq!(kernel_f(1e-6, &[2], &b).unwrap().value, 1.0 / (2.0 * PI), max_relative = 1e-4);
        assert!(kernel_f(10.0, &[2], &b).unwrap().value < 1e-20);
        assert!(kernel_f(-1.0, &[2], &b).is_err());
    }

    #[test]
    fn bank_matches_direct_evaluation() {
        let b = QuadBudget::default();
        let zeta = ZetaData { disc: 1, removed_norm: Some(1009.0) };
        let mut bank = KernelBank::new(kernel_g_core(&[2], &zeta), b.clone());
        for y in [1e-5, 3e-3, 0.2, 1.0, 4.0] {
            let d = kernel_g(y, &[2], &zeta, &b).unwrap().value;
            let t = bank.eval(y).unwrap().value;
            assert_relative_eq!(d, t, max_relative = 1e-10);
        }
    }

    #[test]
    fn derivative_kernel_matches_e1() {
        let b = QuadBudget::default();
        for y in [1e-3, 0.05, 0.4, 2.0] {
            let v = kernel_f_derivative(y, &[2], &b).unwrap().value;
            assert_relative_eq!(v, kernel_f_derivative_closed_form_weight2(y), max_relative = 1e-9);
        }
    }
}
