//! The registered suites.

use super::config::RunConfig;
use super::count_forms::count_forms_check;
use super::fixtures::{bundled_at_level, bundled_records, ingest_fixtures, DimensionTable, FixtureRecord, DIMS_WEIGHT2};
use super::report::{Report, Row};
use super::{HarnessError, Suite};
use crate::exact::{q_to_f64, Q};
use crate::field::NumberField;
use crate::ideals::{enumerate_ideals, prime_ideals_up_to, PrimeIdeal};
use crate::kloosterman::{classical_kloosterman, classical_weil_ratio, default_weil_constant, weil_survey};
use crate::moments::sieve::{additive_sieve_by_classes, additive_sieve_sum};
use crate::moments::symsq::{d_alpha_series, l1_sym2_euler};
use crate::moments::{
    additive_sieve_ratio, dirichlet_d2, dirichlet_f3, dirichlet_f4,
    moment1_derivative_diagonal, moment1_diagonal, moment2_derivative_diagonal, moment2_diagonal, spectral_sieve_ratio,
    MollifierSpec, MomentKind, MomentReport, SeriesBudget,
};
use crate::optimize::{euler_lagrange_residual, numeric_optimize, optimize, stationarity_residual, Kind};
use crate::petersson::{
    calibrate_two_weights, central_derivative, central_value, geometric_side_rational, SpectralFamily,
    TruncationBudget,
};
use crate::special::{QuadBudget, ZetaData};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn weights(cfg: &RunConfig, field: &NumberField) -> Vec<u32> {
    vec![cfg.k; field.degree]
}

fn quad_budget(cfg: &RunConfig) -> QuadBudget {
    let mut b = QuadBudget::default();
    if let Some(t) = cfg.budget.t_max {
        b.t_max = t;
    }
    b
}

fn prime_of_norm(field: &NumberField, norm: u64) -> Option<PrimeIdeal> {
    prime_ideals_up_to(field, norm).into_iter().find(|p| p.norm == norm)
}

fn rational_only(field: &NumberField, report: &mut Report, what: &str) -> bool {
    if field.degree != 1 {
        report.push(Row::failed(&field.label(), what, "only implemented over the rationals"));
        return false;
    }
    true
}

/// Bundled records plus those of `cfg.fixtures`.
fn all_records(cfg: &RunConfig) -> Result<Vec<(String, FixtureRecord)>, HarnessError> {
    let mut recs = bundled_records()?;
    if let Some(p) = &cfg.fixtures {
        let name = p.display().to_string();
        recs.extend(ingest_fixtures(p)?.into_iter().map(|r| (name.clone(), r)));
    }
    Ok(recs)
}

pub struct KloostermanSuite;

impl Suite for KloostermanSuite {
    fn name(&self) -> &'static str {
        "kloosterman"
    }
    fn describe(&self) -> &'static str {
        "Weil bound: exhaustive over rational moduli, random instances over a quadratic field"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let field = cfg.number_field()?;
        let mut r = Report::new(self.name());
        if field.degree == 1 {
            let cmax = cfg.budget.kloosterman_c.unwrap_or(500);
            let all: Vec<(u64, (f64, u64, u64))> = (1..=cmax).into_par_iter().map(|c| (c, classical_weil_ratio(c))).collect();
            let slack = 1e-9;
            let violations = all.iter().filter(|(_, w)| w.0 > 1.0 + slack).count();
            let (c, (worst, m, n)) = all.iter().copied().fold((0, (0.0, 0, 0)), |a, b| if b.1 .0 > a.1 .0 { b } else { a });
            let case = format!("c<={cmax}");
            r.push(Row::abs_check(&case, "violations", violations as f64, 0.0, 0.0));
            r.push(Row::at_most(&case, "max_ratio", worst, 1.0 + slack).with_note(format!("c={c} m={m} n={n}")));
            let direct = classical_kloosterman(m as i64, n as i64, c);
            let bound = worst * crate::arith::divisor_count(c) as f64 * (c as f64).sqrt()
                * (crate::arith::gcd(crate::arith::gcd(m as i128, n as i128), c as i128) as f64).sqrt();
            r.push(Row::abs_check(&format!("c={c} m={m} n={n}"), "direct_vs_table", direct.abs(), bound, 1e-8));
        } else {
            let count = cfg.budget.instances.unwrap_or(200) as usize;
            let max_norm = cfg.budget.modulus_norm.unwrap_or(2000);
            let constant = default_weil_constant(&field);
            let case = format!("{} random={count} N<={max_norm} K={constant}", field.label());
            match weil_survey(&field, count, max_norm, constant, cfg.seed) {
                Ok(s) => {
                    r.push(Row::abs_check(&case, "violations", s.violations as f64, 0.0, 0.0));
                    r.push(
                        Row::at_most(&case, "max_ratio", s.worst_ratio, 1.0)
                            .with_note(format!("N(c)={}", s.worst_modulus_norm)),
                    );
                }
                Err(e) => r.push(Row::failed(&case, "survey", e.to_string())),
            }
        }
        Ok(r)
    }
}

pub struct PeterssonCheck;

impl Suite for PeterssonCheck {
    fn name(&self) -> &'static str {
        "petersson-check"
    }
    fn describe(&self) -> &'static str {
        "geometric side of the trace formula against fixture eigenvalues"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let field = cfg.number_field()?;
        let mut r = Report::new(self.name());
        if !rational_only(&field, &mut r, "geometric_side") {
            return Ok(r);
        }
        let tol = cfg.tol_or(1e-2);
        let budget = TruncationBudget { modulus_cap: cfg.budget.modulus_cap.unwrap_or(100_000), ..Default::default() };
        let k = cfg.k;
        for q in cfg.q_or(&[11]) {
            let mut forms: Vec<FixtureRecord> = bundled_at_level(q, k)?;
            if let Some(p) = &cfg.fixtures {
                forms.extend(
                    ingest_fixtures(p)?
                        .into_iter()
                        .filter(|f| f.field.degree == 1 && f.form.record.level == q && f.form.weight == k),
                );
            }
            let mut ns = cfg.n_or(&[2, 3, 4, 5]);
            if forms.len() == 2 && !ns.contains(&2) {
                ns.push(2);
            }
            let mut all = vec![1u64];
            all.extend(&ns);
            let sides: Vec<_> = all.par_iter().map(|&n| geometric_side_rational(1, n, q, k, &budget)).collect();
            let g11 = &sides[0];
            r.push(Row::info(&format!("q={q} k={k} n=1"), "geometric_side", g11.value, g11.tail_estimate));
            let g = |n: u64| &sides[all.iter().position(|&x| x == n).unwrap()];
            match forms.len() {
                1 => {
                    let f = &forms[0];
                    for &n in &ns {
                        let case = format!("q={q} k={k} n={n}");
                        match f.form.lambda_int(n, &f.field) {
                            Ok(lam) => r.push(
                                Row::rel_check(&case, "ratio_vs_lambda", g(n).value / g11.value, lam, tol)
                                    .with_tail(g(n).tail_estimate / g11.value.abs())
                                    .with_note(f.form.label().to_string()),
                            ),
                            Err(e) => r.push(Row::failed(&case, "ratio_vs_lambda", e.to_string())),
                        }
                    }
                }
                2 => {
                    let pair = [&forms[0].form, &forms[1].form];
                    let w = calibrate_two_weights(&field, pair, 2, g11.value, g(2).value)
                        .map_err(|e| HarnessError::Config(e.to_string()))?;
                    for (f, wi) in pair.iter().zip(w) {
                        r.push(Row::info(&format!("q={q} k={k}"), &format!("weight_{}", f.label()), wi, g11.tail_estimate));
                    }
                    for &n in ns.iter().filter(|&&n| n != 2) {
                        let case = format!("q={q} k={k} n={n}");
                        let spectral: Result<f64, _> = pair
                            .iter()
                            .zip(w)
                            .map(|(f, wi)| f.lambda_int(n, &field).map(|l| wi * l))
                            .sum();
                        match spectral {
                            Ok(s) => r.push(
                                Row::abs_check(&case, "geometric_vs_spectral", g(n).value, s, tol * g11.value.abs())
                                    .with_tail(g(n).tail_estimate),
                            ),
                            Err(e) => r.push(Row::failed(&case, "geometric_vs_spectral", e.to_string())),
                        }
                    }
                }
                _ => {
                    for &n in &ns {
                        let case = format!("q={q} k={k} n={n}");
                        r.push(
                            Row::info(&case, "ratio", g(n).value / g11.value, g(n).tail_estimate / g11.value.abs())
                                .with_note("no fixture family at this level"),
                        );
                    }
                }
            }
        }
        Ok(r)
    }
}

pub struct MomentSuite {
    pub kind: MomentKind,
}

impl MomentSuite {
    fn evaluate(&self, field: &NumberField, k: &[u32], spec: &MollifierSpec, qb: &QuadBudget) -> Result<MomentReport, String> {
        let r = match self.kind {
            MomentKind::First => moment1_diagonal(field, k, spec, qb),
            MomentKind::Second => moment2_diagonal(field, k, spec, qb),
            MomentKind::FirstDerivative => moment1_derivative_diagonal(field, k, spec, qb),
            MomentKind::SecondDerivative => moment2_derivative_diagonal(field, k, spec, qb),
        };
        r.map_err(|e| e.to_string())
    }
}

impl Suite for MomentSuite {
    fn name(&self) -> &'static str {
        match self.kind {
            MomentKind::First => "moment1",
            MomentKind::Second => "moment2",
            MomentKind::FirstDerivative => "moment1-deriv",
            MomentKind::SecondDerivative => "moment2-deriv",
        }
    }
    fn describe(&self) -> &'static str {
        "diagonal mollified moment against its predicted main term"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let field = cfg.number_field()?;
        let k = weights(cfg, &field);
        let delta = cfg.delta_or("1/2")?;
        let poly = cfg.poly_or("0,0,1")?;
        let qb = quad_budget(cfg);
        let tol = cfg.tol_or(1e-6);
        let qs = cfg.q_or(&[10_009]);
        let results: Vec<(u64, Result<MomentReport, String>)> = qs
            .par_iter()
            .map(|&q| {
                let rep = MollifierSpec::new(poly.clone(), delta.clone(), q)
                    .map_err(|e| e.to_string())
                    .and_then(|spec| self.evaluate(&field, &k, &spec, &qb));
                (q, rep)
            })
            .collect();
        let mut r = Report::new(self.name());
        let mut gaps = Vec::new();
        for (q, res) in results {
            let case = format!("{} q={q} k={} delta={delta} P={poly}", field.label(), cfg.k);
            match res {
                Ok(m) => {
                    r.push(Row::info(&case, "computed", m.computed, m.tail_bound).with_note(format!("terms={}", m.terms)));
                    r.push(Row::info(&case, "predicted", m.predicted, 0.0));
                    if let Some(ratio) = m.ratio {
                        r.push(Row::info(&case, "ratio", ratio, m.tail_bound / m.predicted.abs()));
                        gaps.push((ratio - 1.0).abs());
                    }
                    r.push(Row::at_most(&case, "relative_tail", m.tail_bound / m.computed.abs(), tol));
                }
                Err(e) => r.push(Row::failed(&case, "computed", e)),
            }
        }
        if gaps.len() >= 2 && gaps.len() == qs.len() {
            let improving = gaps.windows(2).all(|w| w[1] < w[0]);
            r.push(Row::holds(&format!("q={qs:?}"), "ratio_gap_decreasing", improving));
        }
        Ok(r)
    }
}

pub struct EulerIdentities;

impl Suite for EulerIdentities {
    fn name(&self) -> &'static str {
        "euler-identities"
    }
    fn describe(&self) -> &'static str {
        "regular parts of the two-, three- and four-variable series at the origin"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let field = cfg.number_field()?;
        let budget = SeriesBudget { box_norm: cfg.budget.box_norm.unwrap_or(1), prime_norm: cfg.budget.prime_norm.unwrap_or(10_000) };
        let tol = cfg.tol_or(1e-4);
        let z = Complex64::new(0.0, 0.0);
        let z2 = ZetaData { disc: field.disc, removed_norm: None }.value(Complex64::new(2.0, 0.0)).re;
        let mut r = Report::new(self.name());
        let case = format!("{} primes<={}", field.label(), budget.prime_norm);
        let d2 = dirichlet_d2(&field, z, z, z, &budget);
        r.push(Row::abs_check(&case, "eta2_vs_zeta2_squared", d2.eta.re, z2 * z2, tol).with_tail(d2.eta_tail));
        let want = cfg.q_or(&[11])[0];
        let level = prime_ideals_up_to(&field, want.max(2) * 4).into_iter().find(|p| p.norm >= want);
        match level {
            Some(level) => {
                let case = format!("{case} level={}", level.norm);
                let f3 = dirichlet_f3(&field, &level, z, z, z, &budget);
                r.push(Row::abs_check(&case, "eta3_vs_one", f3.eta.re, 1.0, tol).with_tail(f3.eta_tail));
                let f4 = dirichlet_f4(&field, &level, z, z, z, z, &budget);
                r.push(Row::abs_check(&case, "eta4_vs_zeta2", f4.eta.re, z2, tol).with_tail(f4.eta_tail));
            }
            None => r.push(Row::failed(&case, "level", format!("no prime ideal of norm >= {want}"))),
        }
        Ok(r)
    }
}

pub struct OptimizeSuite;

impl Suite for OptimizeSuite {
    fn name(&self) -> &'static str {
        "optimize"
    }
    fn describe(&self) -> &'static str {
        "exact maximization of the density functionals"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let kind: Kind = cfg.kind.as_deref().unwrap_or("derivative").parse().map_err(HarnessError::Config)?;
        let degree = cfg.degree.unwrap_or(3);
        let delta = cfg.delta_or("1")?;
        let case = format!("kind={kind} delta={delta} degree={degree}");
        let mut r = Report::new(self.name());
        let o = match optimize(kind, &delta, degree) {
            Ok(o) => o,
            Err(e) => {
                r.push(Row::failed(&case, "value", e.to_string()));
                return Ok(r);
            }
        };
        let value = q_to_f64(&o.value);
        let closed: Option<Q> = match (kind, delta.is_one()) {
            (Kind::Plain, true) => Some(Q::new(1.into(), 4.into())),
            (Kind::Derivative, true) if degree >= 3 => Some(Q::new(7.into(), 16.into())),
            _ => None,
        };
        match &closed {
            Some(c) => r.push(
                Row::abs_check(&case, "value", value, q_to_f64(c), 0.0)
                    .with_exact(o.value.to_string())
                    .with_note(if *c == o.value { "exact match" } else { "exact mismatch" }),
            ),
            None => r.push(Row::info(&case, "value", value, 0.0).with_exact(o.value.to_string())),
        }
        if let Some(c) = &closed {
            r.push(Row::holds(&case, "value_exact", *c == o.value).with_exact(c.to_string()));
        }
        let mut coeffs = Row::info(&case, "maximizer", 0.0, 0.0).with_exact(o.poly.to_string());
        if degree >= 3 && !o.poly.coeff(2).is_zero() {
            coeffs.value = q_to_f64(&(o.poly.coeff(3) / o.poly.coeff(2)));
            coeffs.note = "value is a3/a2".into();
        }
        r.push(coeffs);
        let stationary = stationarity_residual(kind, &delta, &o.poly).map(|v| v.iter().all(|x| x.is_zero()));
        r.push(Row::holds(&case, "stationarity_residual_zero", stationary == Ok(true)));
        if kind == Kind::Derivative && delta.is_one() && degree == 3 {
            let (poly_res, scalar) = euler_lagrange_residual(&o.poly);
            r.push(Row::holds(&case, "euler_lagrange_zero", poly_res.is_zero() && scalar.is_zero()));
        }
        match numeric_optimize(kind, q_to_f64(&delta), degree, 1e-14) {
            Ok(n) => r.push(
                Row::abs_check(&case, "numeric_cross_check", n.value, value, 1e-6)
                    .with_note(format!("iterations={}", n.iterations)),
            ),
            Err(e) => r.push(Row::failed(&case, "numeric_cross_check", e.to_string())),
        }
        if let Some(p) = &cfg.poly {
            let poly = super::config::parse_poly(p)?;
            match crate::optimize::functional_value(kind, &delta, &poly) {
                Ok(v) => r.push(
                    Row::at_most(&format!("kind={kind} delta={delta} P={poly}"), "functional_value", q_to_f64(&v), value)
                        .with_exact(v.to_string()),
                ),
                Err(e) => r.push(Row::failed(&format!("P={poly}"), "functional_value", e.to_string())),
            }
        }
        Ok(r)
    }
}

/// Harmonic level-37 family with weights calibrated from the geometric side.
fn level37_family<'a>(
    records: &'a [FixtureRecord],
    field: &NumberField,
    cap: u64,
) -> Result<SpectralFamily<'a>, String> {
    if records.len() != 2 {
        return Err(format!("expected two level-37 forms, found {}", records.len()));
    }
    let budget = TruncationBudget { modulus_cap: cap, ..Default::default() };
    let g11 = geometric_side_rational(1, 1, 37, 2, &budget).value;
    let g12 = geometric_side_rational(1, 2, 37, 2, &budget).value;
    let pair = [&records[0].form, &records[1].form];
    let w = calibrate_two_weights(field, pair, 2, g11, g12).map_err(|e| e.to_string())?;
    let level = prime_of_norm(field, 37).ok_or("no prime of norm 37")?;
    Ok(SpectralFamily { level, newforms: vec![(pair[0], w[0]), (pair[1], w[1])], oldforms: Vec::new() })
}

pub struct SieveCheck;

impl Suite for SieveCheck {
    fn name(&self) -> &'static str {
        "sieve-check"
    }
    fn describe(&self) -> &'static str {
        "additive and spectral large-sieve ratios"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let mut r = Report::new(self.name());
        let count = cfg.budget.instances.unwrap_or(100) as usize;
        for (c, x) in [(7u64, 50usize), (7, 500), (101, 50), (101, 500)] {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (c << 32) ^ x as u64);
            let vecs: Vec<Vec<f64>> = (0..count).map(|_| (0..x).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let stats: Vec<(f64, f64)> = vecs
                .par_iter()
                .map(|y| {
                    let a = additive_sieve_sum(c, y);
                    let b = additive_sieve_by_classes(c, y);
                    (additive_sieve_ratio(c, y), (a - b).abs() / b)
                })
                .collect();
            let worst = stats.iter().map(|s| s.0).fold(0.0, f64::max);
            let route = stats.iter().map(|s| s.1).fold(0.0, f64::max);
            let case = format!("c={c} X={x} vectors={count}");
            r.push(Row::at_most(&case, "additive_ratio_max", worst, 1.0 + 1e-12));
            r.push(Row::at_most(&case, "orthogonality_route_gap", route, 1e-9));
        }
        let field = crate::field::make_field(&crate::field::FieldDescriptor::Rationals)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let recs = bundled_at_level(37, 2)?;
        let cap = cfg.budget.modulus_cap.unwrap_or(20_000);
        let big_x = cfg.budget.box_norm.unwrap_or(200) as f64;
        let case = format!("level=37 X={big_x} cap={cap}");
        match level37_family(&recs, &field, cap) {
            Ok(fam) => {
                let table = enumerate_ideals(&field, big_x);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(37));
                let mut worst: f64 = 0.0;
                for _ in 0..count.min(20) {
                    let x: Vec<f64> = table.ideals.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
                    match spectral_sieve_ratio(&field, &fam, &table, &x, big_x) {
                        Ok(v) => worst = worst.max(v),
                        Err(e) => {
                            r.push(Row::failed(&case, "spectral_ratio_max", e.to_string()));
                            return Ok(r);
                        }
                    }
                }
                r.push(Row::at_most(&case, "spectral_ratio_max", worst, 10.0));
            }
            Err(e) => r.push(Row::failed(&case, "spectral_ratio_max", e)),
        }
        Ok(r)
    }
}

pub struct CountForms;

impl Suite for CountForms {
    fn name(&self) -> &'static str {
        "count-forms"
    }
    fn describe(&self) -> &'static str {
        "dimension growth and the diagonal main term of the symmetric-square average"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let field = cfg.number_field()?;
        let mut r = Report::new(self.name());
        if !rational_only(&field, &mut r, "count_forms") {
            return Ok(r);
        }
        let dims = DimensionTable::parse(DIMS_WEIGHT2)?.points()?;
        let levels = cfg.q_or(&[11, 37, 101, 10_007, 100_003]);
        let rep = count_forms_check(&field, &dims, &levels);
        let case = format!("dims={dims:?}");
        r.push(Row::rel_check(&case, "dimension_slope", rep.slope, rep.reference_slope, cfg.tol_or(0.25)));
        r.push(Row::info(&case, "dimension_intercept", rep.intercept, 0.0));
        for t in &rep.levels {
            let case = format!("q={}", t.level_norm);
            r.push(Row::info(&case, "main_term", t.main_term, 0.0));
            r.push(Row::abs_check(&case, "zeta_removed_vs_product", t.zeta_removed, t.zeta_removed_product, 1e-14));
            let bound = (t.level_norm as f64).powf(-1.0 / 3.0);
            if t.level_norm >= 10_000 {
                r.push(Row::at_most(&case, "secondary_residue", t.secondary, bound));
            } else {
                r.push(Row::info(&case, "secondary_residue", t.secondary, 0.0));
            }
        }
        Ok(r)
    }
}

pub struct CentralValues;

impl Suite for CentralValues {
    fn name(&self) -> &'static str {
        "central-values"
    }
    fn describe(&self) -> &'static str {
        "root numbers and central values of the fixture forms"
    }
    fn run(&self, cfg: &RunConfig) -> Result<Report, HarnessError> {
        let qb = quad_budget(cfg);
        let tol = cfg.tol_or(1e-6);
        let recs = all_records(cfg)?;
        let rows: Vec<Vec<Row>> = recs
            .par_iter()
            .map(|(src, rec)| {
                let case = format!("{src}:{} {}", rec.line, rec.form.label());
                let mut rows = vec![Row::abs_check(
                    &case,
                    "sign_epsilon",
                    rec.computed_sign as f64,
                    rec.form.record.sign as f64,
                    0.0,
                )];
                if rec.form.record.sign > 0 {
                    let a = central_value(&rec.field, &rec.form, 1.0, &qb);
                    let b = central_value(&rec.field, &rec.form, 1.7, &qb);
                    match (a, b) {
                        (Ok(a), Ok(b)) => {
                            rows.push(Row::rel_check(&case, "central_value_two_cutoffs", b.value, a.value, tol).with_tail(a.tail_estimate));
                            rows.push(Row::holds(&case, "central_value_positive", a.value > 0.0));
                            rows.push(Row::info(&case, "central_value", a.value, a.tail_estimate));
                            if let Some(v) = rec.form.record.central_value {
                                rows.push(Row::rel_check(&case, "central_value_vs_record", a.value, v, tol));
                            }
                        }
                        (Err(e), _) | (_, Err(e)) => rows.push(Row::failed(&case, "central_value", e.to_string())),
                    }
                } else {
                    match central_value(&rec.field, &rec.form, 1.0, &qb) {
                        Ok(v) => rows.push(Row::abs_check(&case, "central_value_vanishes", v.value, 0.0, 0.0)),
                        Err(e) => rows.push(Row::failed(&case, "central_value_vanishes", e.to_string())),
                    }
                    match central_derivative(&rec.field, &rec.form, &qb) {
                        Ok(v) => rows.push(Row::info(&case, "central_derivative", v.value, v.tail_estimate)),
                        Err(e) => rows.push(Row::failed(&case, "central_derivative", e.to_string())),
                    }
                }
                if let Some(alpha) = cfg.alpha {
                    match (d_alpha_series(&rec.form, &rec.field, alpha), l1_sym2_euler(&rec.form, &rec.field, 997)) {
                        (Ok(d), Ok(l1)) => rows.push(
                            Row::info(&case, &format!("d_alpha({alpha})"), d.value, d.tail_estimate)
                                .with_note(format!("L(1,sym2) Euler product to 997: {l1:.12}")),
                        ),
                        (Err(e), _) | (_, Err(e)) => rows.push(Row::failed(&case, "d_alpha", e.to_string())),
                    }
                }
                rows
            })
            .collect();
        let mut r = Report::new(self.name());
        for row in rows.into_iter().flatten() {
            r.push(row);
        }
        Ok(r)
    }
}
