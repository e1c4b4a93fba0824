//! Bessel functions of the first kind of integer order.

use super::gamma::ln_gamma;
use super::mellin::{mellin_line_integral, LineSpec, MellinResult};
use super::SpecialError;
use num_complex::Complex64;
use std::f64::consts::PI;

fn series(nu: u32, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = (1..=nu).fold(1.0, |acc, k| acc * h / k as f64);
    let mut sum = term;
    let h2 = h * h;
    let mut m = 1.0;
    loop {
        term *= -h2 / (m * (m + nu as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && m > h {
            break;
        }
        m += 1.0;
    }
    sum
}

/// Hankel asymptotic expansion for J_0 and J_1, optimally truncated.
fn hankel01(x: f64) -> (f64, f64) {
    let mut out = [0.0; 2];
    for (idx, nu) in [0.0f64, 1.0].iter().enumerate() {
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0;
        let mut last = f64::INFINITY;
        let mut k = 1;
        loop {
            let kk = k as f64;
            term *= (mu - (2.0 * kk - 1.0).powi(2)) / (kk * 8.0 * x);
            if term.abs() >= last || term.abs() < 1e-18 {
                break;
            }
            last = term.abs();
            // alternating between the Q and P series
            match k % 4 {
                1 => q += term,
                2 => p -= term,
                3 => q -= term,
                _ => p += term,
            }
            k += 1;
        }
        let chi = x - (0.5 * nu + 0.25) * PI;
        out[idx] = (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin());
    }
    (out[0], out[1])
}

/// `J_nu(x)` for integer `nu >= 0` and `x >= 0`.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j needs x >= 0");
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if x <= nu as f64 + 10.0 {
        return series(nu, x);
    }
    let (j0, j1) = hankel01(x);
    if nu == 0 {
        return j0;
    }
    // forward recurrence is stable while the order stays below x
    let (mut a, mut b) = (j0, j1);
    for n in 1..nu {
        let next = 2.0 * n as f64 / x * b - a;
        a = b;
        b = next;
    }
    b
}

/// `J_nu(x)` through its Mellin-Barnes representation, with the contour moved
/// past the first two poles so the integrand decays like `|t|^-(nu+4)`.
pub fn bessel_j_mellin(nu: u32, x: f64, t_max: f64) -> Result<MellinResult, SpecialError> {
    let n = nu as f64;
    let lx = (x / 2.0).ln();
    let f = |s: Complex64| -> Complex64 {
        let ln = ln_gamma((n - s) / 2.0) - ln_gamma((n + s) / 2.0 + 1.0) + s * lx;
        ln.exp() * 0.5
    };
    let spec = LineSpec { sigma: n + 3.0, t_max, step: 1.0 / 64.0, oscillation: None };
    let mut r = mellin_line_integral(f, &spec)?;
    let h = x / 2.0;
    let lead = (n * h.ln() - ln_gamma(Complex64::new(n + 1.0, 0.0)).re).exp();
    r.value += Complex64::new(lead * (1.0 - h * h / (n + 1.0)), 0.0);
    Ok(r)
}
