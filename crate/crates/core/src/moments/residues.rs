//! Exact residue identities for the Mellin transform of the mollifier, by
//! formal Laurent expansion over the rationals.

use super::mollifier::check_admissible;
use super::MomentError;
use crate::exact::{factorial, Laurent, Poly, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueCheck {
    /// Iterated residue of `M^{t1+t2} P_hat(t1) P_hat(t2) t1 t2 / (t1 + t2)`.
    pub cross: Q,
    /// `log(M)^{-3} int_0^1 P''^2`.
    pub cross_expected: Q,
    /// Residue of `M^{t1+t2} P_hat(t1) P_hat(t2)`.
    pub plain: Q,
    /// `log(M)^{-2} P'(1)^2`.
    pub plain_expected: Q,
}

impl ResidueCheck {
    pub fn holds(&self) -> bool {
        self.cross == self.cross_expected && self.plain == self.plain_expected
    }
}

/// `M^t = exp(L t)` through degree `hi`.
fn exp_scaled(l: &Q, hi: i64) -> Laurent {
    let base = Laurent::exp(hi);
    let mut pow = Q::one();
    let c = base
        .c
        .iter()
        .map(|a| {
            let v = a * &pow;
            pow = &pow * l;
            v
        })
        .collect();
    Laurent::new(0, c)
}

/// `P_hat(t) = sum_k a_k k! (L t)^{-k}` as a Laurent polynomial in `t`.
fn p_hat_laurent(p: &Poly<Q>, l: &Q) -> Laurent {
    let n = p.degree().unwrap_or(0) as i64;
    let mut c = vec![Q::zero(); n as usize + 1];
    let mut lk = Q::one();
    for (k, a) in p.coeffs().iter().enumerate() {
        if k > 0 {
            lk = &lk * l;
        }
        c[n as usize - k] = a * Q::from_integer(factorial(k as u32)) / &lk;
    }
    Laurent::new(-n, c)
}

/// Both identities for one polynomial at `log M = l`. The inner residue is
/// taken in `t2` with `|t2| < |t1|`.
pub fn residue_identities(p: &Poly<Q>, l: &Q) -> Result<ResidueCheck, MomentError> {
    check_admissible(p)?;
    if l.is_zero() {
        return Err(MomentError::Precondition("log M must be nonzero".into()));
    }
    let n = p.degree().unwrap_or(0) as i64;
    let hi = n + 2;
    let mp = exp_scaled(l, hi + n).mul(&p_hat_laurent(p, l), hi);
    let plain_single = mp.residue();
    // g(t) = M^t P_hat(t) t
    let g = mp.mul(&Laurent::monomial(1, Q::one()), hi);
    // h(t1) = sum_j (-1)^j c_{-1-j}(g) t1^{-1-j}
    let depth = n.max(1);
    let mut hc = vec![Q::zero(); depth as usize];
    for j in 0..depth {
        let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
        hc[(depth - 1 - j) as usize] = sign * g.coeff(-1 - j);
    }
    let h = Laurent::new(-depth, hc);
    let cross = g.mul(&h, hi).residue();
    let pp = p.derivative().derivative();
    let d1 = p.derivative().eval(&Q::one());
    let l2 = l * l;
    Ok(ResidueCheck {
        cross,
        cross_expected: (&pp * &pp).integral01() / (&l2 * l),
        plain: &plain_single * &plain_single,
        plain_expected: &d1 * &d1 / l2,
    })
}

/// Checks both identities on `X^i` and `X^i + X^j`, `2 <= i <= j <= deg`.
/// Both sides are quadratic forms in the coefficients, so this covers every
/// admissible polynomial of degree at most `deg`.
pub fn residue_identities_through(deg: usize, l: &Q) -> Result<bool, MomentError> {
    for i in 2..=deg {
        for j in i..=deg {
            let mut c = vec![Q::zero(); deg + 1];
            c[i] += Q::one();
            if j != i {
                c[j] += Q::one();
            }
            if !residue_identities(&Poly::new(c), l)?.holds() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn rational_log(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    #[test]
    fn square_polynomial() {
        let r = residue_identities(&Poly::from_ints(&[0, 0, 1]), &qi(1)).unwrap();
        assert_eq!(r.cross, qi(4));
        assert_eq!(r.plain, qi(4));
        assert!(r.holds());
    }

    #[test]
    fn optimal_cubic_and_general_log() {
        let p = Poly::new(vec![qi(0), qi(0), qi(1), q(-1, 6)]);
        let r = residue_identities(&p, &q(7, 3)).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn all_degrees_through_eight() {
        assert!(residue_identities_through(8, &q(5, 2)).unwrap());
        assert!(residue_identities_through(8, &rational_log(-3, 7)).unwrap());
    }

    #[test]
    fn rejects_inadmissible() {
        assert!(residue_identities(&Poly::from_ints(&[0, 1]), &qi(1)).is_err());
    }
}
