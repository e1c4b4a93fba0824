//! Truncated trapezoid quadrature on vertical lines, `(1/2 pi i) int_(sigma) f(s) ds`.

use super::SpecialError;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct LineSpec {
    pub sigma: f64,
    pub t_max: f64,
    pub step: f64,
    /// Rate `L` when `f(sigma + it) ~ e^{-itL} g(t)` with slowly varying `g`;
    /// enables the integration-by-parts end correction.
    pub oscillation: Option<f64>,
}

impl LineSpec {
    pub fn at(sigma: f64) -> Self {
        LineSpec { sigma, t_max: 200.0, step: 1.0 / 64.0, oscillation: None }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MellinResult {
    pub value: Complex64,
    /// `|I_h - I_{2h}|`.
    pub discretization: f64,
    /// Estimated mass beyond `|t| = t_max` (after any end correction).
    pub tail: f64,
    pub error: f64,
}

/// Integrates `f` over the segment `sigma + i[-T, T]`, with estimated error.
pub fn mellin_line_integral<F>(f: F, spec: &LineSpec) -> Result<MellinResult, SpecialError>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(spec.t_max > 0.0 && spec.step > 0.0) {
        return Err(SpecialError::Domain("line integral needs positive height and step".into()));
    }
    let mut n = (spec.t_max / spec.step).ceil() as usize;
    n += n % 2;
    let h = spec.t_max / n as f64;
    let at = |t: f64| f(Complex64::new(spec.sigma, t));
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    let f0 = at(0.0);
    fine += f0;
    coarse += f0;
    let mut top = (f0, f0);
    for j in 1..=n {
        let t = j as f64 * h;
        let (up, down) = (at(t), at(-t));
        let w = if j == n { 0.5 } else { 1.0 };
        fine += (up + down) * w;
        if j % 2 == 0 {
            coarse += (up + down) * w;
        }
        if j == n {
            top = (up, down);
        }
    }
    if !fine.re.is_finite() || !fine.im.is_finite() {
        return Err(SpecialError::NonIntegrable("non-finite integrand on the line".into()));
    }
    let mut value = fine * h / (2.0 * PI);
    let discretization = ((fine * h - coarse * 2.0 * h) / (2.0 * PI)).norm();
    let edge = top.0.norm().max(top.1.norm());
    let t = spec.t_max;
    let tail = if edge == 0.0 {
        0.0
    } else if let Some(l) = spec.oscillation {
        if l == 0.0 {
            return Err(SpecialError::NonIntegrable("zero oscillation rate".into()));
        }
        let corr = (top.0 - top.1) / (Complex64::i() * l) / (2.0 * PI);
        value += corr;
        2.0 * edge / (2.0 * PI * t * l * l) + 1e-3 * corr.norm()
    } else {
        let back = t - 1.0f64.min(t / 4.0);
        let prev = at(back).norm().max(at(-back).norm());
        let rate = (prev.ln() - edge.ln()) / (t - back);
        if !(rate * t > 1.01) {
            return Err(SpecialError::NonIntegrable(format!(
                "integrand decays too slowly at |t| = {t} (local exponent {:.3})",
                rate * t
            )));
        }
        2.0 * edge / (2.0 * PI * (rate - 1.0 / t))
    };
    Ok(MellinResult { value, discretization, tail, error: discretization + tail })
}

#[cfg(test)]
mod tests {
    use super::super::gamma::gamma;
    use super::*;

    #[test]
    fn cahen_mellin() {
        let r = mellin_line_integral(|s| gamma(s), &LineSpec::at(2.0)).unwrap();
        assert!((r.value.re - (-1.0f64).exp()).abs() < 1e-10);
        assert!(r.value.im.abs() < 1e-12);
        assert!(r.error < 1e-10);
        let y: f64 = 3.0;
        let r = mellin_line_integral(|s| gamma(s) * (-s * y.ln()).exp(), &LineSpec::at(2.0)).unwrap();
        assert!((r.value.re - (-y).exp()).abs() < 1e-10);
    }

    #[test]
    fn perron_truncation() {
        let y: f64 = 0.5;
        let spec = LineSpec { sigma: 2.0, t_max: 1e4, step: 1.0 / 64.0, oscillation: Some(y.ln()) };
        let f = |s: Complex64| (-s * y.ln()).exp() / s;
        let r = mellin_line_integral(f, &spec).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-6, "{:?}", r);
        let y2: f64 = 2.0;
        let spec2 = LineSpec { oscillation: Some(y2.ln()), ..spec.clone() };
        let r2 = mellin_line_integral(|s: Complex64| (-s * y2.ln()).exp() / s, &spec2).unwrap();
        assert!(r2.value.re.abs() < 1e-6);
        // without the oscillation hint the 1/s decay is rejected
        let bad = LineSpec { oscillation: None, ..spec };
        assert!(mellin_line_integral(f, &bad).is_err());
    }
}
