//! Complex log-gamma and digamma, incomplete gamma and the exponential integral.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `log(sin(pi z))` without overflow for large `|Im z|`; branch unspecified.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    let i = Complex64::i();
    if z.im > 0.0 {
        // sin(pi z) = e^{-i pi z} (1 - e^{2 i pi z}) i / 2
        -i * PI * z + (c(1.0) - (i * 2.0 * PI * z).exp()).ln() + (i * 0.5).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

/// Principal-ish logarithm of the gamma function; only `exp` of it is canonical.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return c(PI.ln()) - ln_sin_pi(z) - ln_gamma(c(1.0) - z);
    }
    let z = z - 1.0;
    let mut x = c(LANCZOS[0]);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    c(0.5 * (2.0 * PI).ln()) + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(c(x)).re
}

pub fn gamma_real(x: f64) -> f64 {
    let g = gamma(c(x));
    g.re
}

/// Digamma via upward recurrence and the asymptotic series.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let cot = (z * PI).cos() / (z * PI).sin();
        let cot = if cot.is_finite() { cot } else { Complex64::new(0.0, -z.im.signum()) };
        return digamma(c(1.0) - z) - cot * PI;
    }
    let mut z = z;
    let mut acc = c(0.0);
    while z.norm() < 12.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let z2 = (z * z).inv();
    // Bernoulli B_{2k} / (2k)
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut series = c(0.0);
    let mut pw = z2;
    for co in coeffs {
        series += pw * co;
        pw *= z2;
    }
    acc + z.ln() - z.inv() * 0.5 - series
}

/// Upper incomplete gamma `Gamma(a, x)` for `a >= 0`, `x > 0` (or `a > 0`, `x = 0`).
pub fn upper_incomplete_gamma(a: f64, x: f64) -> f64 {
    assert!(a >= 0.0 && x >= 0.0, "incomplete gamma needs a, x >= 0");
    if x == 0.0 {
        return gamma_real(a);
    }
    if x < a + 1.0 && a > 0.0 {
        // Gamma(a) - gamma(a, x), lower part by its power series
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = 1.0;
        while term.abs() > sum.abs() * 1e-17 {
            term *= x / (a + n);
            sum += term;
            n += 1.0;
        }
        let lower = (a * x.ln() - x - ln_gamma_real(a)).exp() * sum;
        return gamma_real(a) * (1.0 - lower);
    }
    (a * x.ln() - x).exp() * gamma_continued_fraction(a, x)
}

/// Modified Lentz evaluation of the continued fraction for `e^x x^-a Gamma(a, x)`.
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut cc = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        cc = b + an / cc;
        if cc.abs() < tiny {
            cc = tiny;
        }
        d = 1.0 / d;
        let delta = d * cc;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Exponential integral `E_1(x)`, `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs x > 0");
    if x <= 1.0 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let mut sum = 0.0;
        let mut term = 1.0;
        let mut k = 1.0;
        loop {
            term *= -x / k;
            let add = -term / k;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
            k += 1.0;
        }
        return -EULER_GAMMA - x.ln() + sum;
    }
    (-x).exp() * gamma_continued_fraction(0.0, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_at_integers_and_half() {
        for n in 1..20u32 {
            let f: f64 = (1..n).map(|k| k as f64).product();
            assert_relative_eq!(gamma_real(n as f64), f, max_relative = 1e-13);
        }
        assert_relative_eq!(gamma_real(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_real(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn gamma_on_vertical_lines() {
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        for t in [0.3, 5.0, 40.0, 150.0] {
            let g = ln_gamma(Complex64::new(0.5, t));
            let expect = 0.5 * (PI.ln() - (PI * t).cosh().ln());
            assert_relative_eq!(g.re, expect, max_relative = 1e-11, epsilon = 1e-11);
        }
        // reflection branch far up the line stays finite
        let g = ln_gamma(Complex64::new(-1.5, 400.0));
        assert!(g.re.is_finite() && g.im.is_finite());
        // recurrence Gamma(z+1) = z Gamma(z)
        let z = Complex64::new(-2.3, 37.0);
        let lhs = gamma(z + 1.0);
        let rhs = gamma(z) * z;
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn digamma_values() {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        assert_relative_eq!(digamma(c(1.0)).re, -EULER_GAMMA, max_relative = 1e-13);
        assert_relative_eq!(digamma(c(0.5)).re, -EULER_GAMMA - 2.0 * 2f64.ln(), max_relative = 1e-13);
        // central difference of ln_gamma
        let z = Complex64::new(1.3, 7.0);
        let h = 1e-5;
        let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
        assert!((fd - digamma(z)).norm() < 1e-8);
    }

    #[test]
    fn incomplete_gamma_matches_integer_closed_form() {
        // Gamma(n, x) = (n-1)! e^-x sum_{j<n} x^j / j!
        for n in 1..7u32 {
            for x in [0.01, 0.5, 2.0, 7.5, 40.0] {
                let mut s = 0.0;
                let mut term = 1.0;
                for j in 0..n {
                    if j > 0 {
                        term *= x / j as f64;
                    }
                    s += term;
                }
                let fact: f64 = (1..n).map(|k| k as f64).product();
                let exact = fact * (-x).exp() * s;
                assert_relative_eq!(upper_incomplete_gamma(n as f64, x), exact, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn e1_values() {
        assert_relative_eq!(exp_integral_e1(1.0), 0.219_383_934_395_520_3, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(0.1), 1.822_923_958_419_390_7, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(10.0), 4.156_968_929_685_324e-6, max_relative = 1e-12);
    }
}
