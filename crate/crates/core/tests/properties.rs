//! Property tests over random polynomials, moduli, ideals and configurations.

use mollify::arith::{gcd, divisor_count};
use mollify::exact::{q, qi, Poly, Q};
use mollify::field::{make_field, FieldDescriptor, FieldElement, NumberField};
use mollify::harness::report::num;
use mollify::harness::{Budgets, RunConfig};
use mollify::ideals::Ideal;
use mollify::kloosterman::{classical_kloosterman, ClassicalKloosterman};
use mollify::moments::residue_identities;
use mollify::moments::sieve::{additive_sieve_by_classes, additive_sieve_sum};
use mollify::optimize::{density_bound, functional_value, optimize, predicted_density, Kind};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn sqrt5() -> &'static NumberField {
    static F: OnceLock<NumberField> = OnceLock::new();
    F.get_or_init(|| make_field(&FieldDescriptor::parse("Q(sqrt5)").unwrap()).unwrap())
}

/// Admissible polynomial `sum_{i>=2} c_i X^i` with small integer numerators
/// over a common small denominator.
fn admissible() -> impl Strategy<Value = Poly<Q>> {
    (prop::collection::vec(-6i64..=6, 1..6), 1i64..5)
        .prop_filter("nonzero", |(c, _)| c.iter().any(|&x| x != 0))
        .prop_map(|(c, d)| {
            let mut v = vec![qi(0), qi(0)];
            v.extend(c.into_iter().map(|x| q(x, d)));
            Poly::new(v)
        })
}

fn delta() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=12).prop_filter("<= 1", |(a, b)| a <= b).prop_map(|(a, b)| q(a, b))
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Plain), Just(Kind::Derivative)]
}

/// Kloosterman sum from the definition with a brute-force inverse.
fn kloosterman_oracle(m: i64, n: i64, c: i64) -> f64 {
    let mut s = 0.0;
    for x in 0..c {
        if let Some(y) = (0..c).find(|y| (x * y) % c == 1 % c) {
            let phase = (m * x + n * y).rem_euclid(c) as f64;
            s += (2.0 * PI * phase / c as f64).cos();
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_is_scale_invariant(k in kind(), d in delta(), p in admissible(), a in -9i64..=9, b in 1i64..=9) {
        prop_assume!(a != 0);
        let c = q(a, b);
        let v = functional_value(k, &d, &p).unwrap();
        prop_assert_eq!(functional_value(k, &d, &p.scale(&c)).unwrap(), v);
    }

    #[test]
    fn plain_functional_increases_with_delta(p in admissible(), a in 1i64..12) {
        prop_assume!(!p.derivative().eval(&qi(1)).is_zero());
        let lo = functional_value(Kind::Plain, &q(a, 12), &p).unwrap();
        let hi = functional_value(Kind::Plain, &q(a + 1, 12), &p).unwrap();
        prop_assert!(lo < hi);
    }

    #[test]
    fn optimum_dominates_and_nests(k in kind(), d in delta(), p in admissible()) {
        let deg = p.degree().unwrap().max(2);
        let best = optimize(k, &d, deg).unwrap();
        prop_assert!(functional_value(k, &d, &p).unwrap() <= best.value.clone());
        prop_assert!(best.value <= optimize(k, &d, deg + 1).unwrap().value);
        prop_assert!(best.value < q(1, 2));
    }

    #[test]
    fn predicted_density_equals_functional(k in kind(), d in delta(), p in admissible()) {
        prop_assert_eq!(predicted_density(k, &d, &p), functional_value(k, &d, &p).unwrap());
    }

    #[test]
    fn density_bound_is_scale_invariant(m1 in -50.0f64..50.0, m2 in 0.01f64..100.0, c in 0.1f64..10.0) {
        let a = density_bound(m1, m2).unwrap();
        let b = density_bound(c * m1, c * c * m2).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        prop_assert!(density_bound(m1, -m2).is_err());
    }

    #[test]
    fn residue_identities_hold(p in admissible(), num_l in 1i64..40, den_l in 1i64..8) {
        prop_assert!(residue_identities(&p, &q(num_l, den_l)).unwrap().holds());
    }

    #[test]
    fn kloosterman_routes_agree(m in -60i64..60, n in -60i64..60, c in 1u64..90) {
        let direct = classical_kloosterman(m, n, c);
        let oracle = kloosterman_oracle(m, n, c as i64);
        let multiplicative = ClassicalKloosterman::new().value(m, n, c);
        prop_assert!((direct - oracle).abs() < 1e-9);
        prop_assert!((multiplicative - oracle).abs() < 1e-9);
        prop_assert!((classical_kloosterman(n, m, c) - direct).abs() < 1e-9);
        let g = gcd(gcd(m as i128, n as i128), c as i128) as f64;
        prop_assert!(direct.abs() <= g.sqrt() * divisor_count(c) as f64 * (c as f64).sqrt() + 1e-9);
    }

    #[test]
    fn additive_sieve_routes_agree(c in 1u64..40, y in prop::collection::vec(-1.0f64..1.0, 1..80)) {
        let norm2: f64 = y.iter().map(|v| v * v).sum();
        prop_assume!(norm2 > 1e-6);
        let a = additive_sieve_sum(c, &y);
        let b = additive_sieve_by_classes(c, &y);
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
        prop_assert!(a <= (c as f64 + y.len() as f64) * norm2 * (1.0 + 1e-12));
    }

    #[test]
    fn principal_ideal_norms(a in -40i128..40, b in -40i128..40, e in -20i128..20, f in -20i128..20) {
        prop_assume!((a, b) != (0, 0) && (e, f) != (0, 0));
        let k = sqrt5();
        let (x, y) = (FieldElement::ints(a, b), FieldElement::ints(e, f));
        let ix = Ideal::principal(k, &x).unwrap();
        let iy = Ideal::principal(k, &y).unwrap();
        prop_assert_eq!(ix.norm(k), k.norm(&x).abs());
        prop_assert_eq!(ix.mul(&iy, k).norm(k), ix.norm(k) * iy.norm(k));
        prop_assert!(ix.contains(&k.mul(&x, &y), k));
    }

    #[test]
    fn csv_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn config_round_trips(
        seed in any::<u64>(),
        workers in 1usize..16,
        qs in prop::collection::vec(2u64..1_000_000, 0..4),
        cap in prop::option::of(1u64..1_000_000),
        prime in prop::option::of(1u64..100_000),
    ) {
        let cfg = RunConfig {
            seed,
            workers,
            q: qs,
            budget: Budgets { modulus_cap: cap, prime_norm: prime, ..Default::default() },
            ..Default::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        prop_assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }
}
