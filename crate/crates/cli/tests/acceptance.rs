//! Acceptance suite: one test per criterion, each printing its own
//! pass/fail line through the harness.
//!
//! Criteria 1-5 pin the classification tables and spot orders, 6 the genus
//! cross-check, 7 the brute-force oracle suites, 8 the Galois-action
//! checks, and 9 the aggregate known-answer command.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use k3brauer::brauer::{brauer_superset, catalog_from_kept, integral_ideals_up_to, odd_disc_case, BrauerCatalog};
use k3brauer::enumerate::{enumerate_kept, EnumerateOptions};
use k3brauer::ideal::{
    euler_phi, factor_element, is_principal, primes_above, ray_class_number,
    residue_units_galois_trivial, to_zbasis,
};
use k3brauer::k3::{k3_base_order, k3_order};
use k3brauer::lattice::{dual_lattice, dual_via_gram, is_integral_lattice, scale, IdealLatticeLS};
use k3brauer::literal::parse_ideal;
use k3brauer::{FactoredIdeal, FieldElement, ImQuadField};

const GAUSSIAN: &str = include_str!("../data/gaussian_n1.json");
const EISENSTEIN: &str = include_str!("../data/eisenstein_n1.json");
const ODD_CASES: &str = include_str!("../data/odd_disc_cases.json");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_k3brauer"))
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Criterion 1: the Gaussian catalog at n = 1 is byte-exact against the
/// embedded sixteen-group table, in under ten seconds.
#[test]
fn criterion_1_gaussian_catalog() {
    let start = Instant::now();
    let output = bin()
        .args(["brauer", "-d", "-1", "-n", "1", "--md"])
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "brauer command failed");
    let stdout = String::from_utf8(output.stdout).unwrap();
    let table: Value = serde_json::from_str(GAUSSIAN).unwrap();
    let expected = strings(&table["groups"]);
    // group rows of the second markdown table, byte for byte
    let rows: Vec<String> = stdout
        .lines()
        .skip_while(|l| !l.starts_with("## Possible"))
        .filter(|l| l.starts_with("| ") && !l.starts_with("| Group"))
        .map(|l| l.trim_matches('|').split('|').next().unwrap().trim().to_string())
        .collect();
    assert_eq!(rows, expected, "group table mismatch");
    assert!(start.elapsed().as_secs() < 10, "took too long");
}

/// Criterion 2: the Gaussian kept set at n = 1 is exactly the thirteen
/// ideals, certified complete, in under ten seconds.
#[test]
fn criterion_2_gaussian_kept_ideals() {
    let start = Instant::now();
    let field = ImQuadField::new(-1).unwrap();
    let report = enumerate_kept(&field, 1, &EnumerateOptions::default()).unwrap();
    assert!(!report.cap_saturated, "cap must not be saturated");
    assert!(report.certified());
    let mut expected: BTreeSet<FactoredIdeal> = BTreeSet::new();
    expected.insert(FactoredIdeal::one());
    for k in 1..=6 {
        expected.insert(parse_ideal(&field, &format!("2r^{k}")).unwrap());
    }
    expected.insert(parse_ideal(&field, "3i").unwrap());
    expected.insert(parse_ideal(&field, "5s*5t").unwrap());
    for k in 1..=2 {
        expected.insert(parse_ideal(&field, &format!("2r^{k}*3i")).unwrap());
        expected.insert(parse_ideal(&field, &format!("2r^{k}*5s*5t")).unwrap());
    }
    let got: BTreeSet<FactoredIdeal> = report.kept_ideals().into_iter().collect();
    assert_eq!(got, expected);
    assert!(start.elapsed().as_secs() < 10, "took too long");
}

/// Criterion 3: the Eisenstein kept set and catalog match the embedded
/// nine-group table exactly, in under ten seconds.
///
/// Known discrepancy: the live divisor expansion of the kept ideal
/// 7s*7t also yields Z/7 (one split factor), which the published
/// nine-group list omits, so the group half of this criterion fails; the
/// kept-ideal half passes. See the verify-paper output for the diff.
#[test]
fn criterion_3_eisenstein_catalog() {
    let start = Instant::now();
    let field = ImQuadField::new(-3).unwrap();
    let report = enumerate_kept(&field, 1, &EnumerateOptions::default()).unwrap();
    assert!(report.certified());
    let table: Value = serde_json::from_str(EISENSTEIN).unwrap();
    let kept: Vec<String> = report.kept.iter().map(|e| e.ideal.to_string()).collect();
    assert_eq!(kept, strings(&table["kept"]), "kept set mismatch");
    let catalog = brauer_superset(&report, false).unwrap();
    assert!(start.elapsed().as_secs() < 10, "took too long");
    assert_eq!(
        catalog.group_labels(),
        strings(&table["groups"]),
        "group list mismatch"
    );
}

/// Criterion 4: the six odd-discriminant cases reproduce the embedded
/// kept-ideal and group tables exactly (restricted to the primes above 2
/// and 3 that the tables cover).
#[test]
fn criterion_4_odd_discriminant_matrix() {
    let table: Value = serde_json::from_str(ODD_CASES).unwrap();
    for case in table["cases"].as_array().unwrap() {
        let label = case["case"].as_str().unwrap();
        let d = case["d"].as_i64().unwrap();
        let field = ImQuadField::new(d).unwrap();
        assert_eq!(
            field.splitting_type(2).unwrap().to_string(),
            case["two"].as_str().unwrap(),
            "case {label}: wrong splitting of 2"
        );
        assert_eq!(
            field.splitting_type(3).unwrap().to_string(),
            case["three"].as_str().unwrap(),
            "case {label}: wrong splitting of 3"
        );
        let n = k3_base_order(&field).unwrap().to_u64().unwrap();
        let report = enumerate_kept(&field, n, &EnumerateOptions::default()).unwrap();
        assert!(report.certified(), "case {label}: uncertified");
        let filtered: Vec<FactoredIdeal> = report
            .kept_ideals()
            .into_iter()
            .filter(|i| {
                !i.is_one() && i.rational_support().iter().all(|p| *p == 2 || *p == 3)
            })
            .collect();
        let got: BTreeSet<String> = filtered.iter().map(|i| i.to_string()).collect();
        let expected: BTreeSet<String> = strings(&case["kept"]).into_iter().collect();
        assert_eq!(got, expected, "case {label}: kept mismatch");

        // the library's own case table agrees
        let case_table = odd_disc_case(&field).unwrap();
        assert_eq!(case_table.label.to_string(), label);
        let table_kept: BTreeSet<String> =
            case_table.kept.iter().map(|i| i.to_string()).collect();
        assert_eq!(got, table_kept, "case {label}: case-table kept mismatch");

        let mut with_unit = filtered;
        with_unit.push(FactoredIdeal::one());
        let catalog = catalog_from_kept(d, n, &with_unit);
        assert_eq!(
            catalog.group_labels(),
            strings(&case["groups"]),
            "case {label}: group mismatch"
        );
        let table_groups: Vec<String> = case_table
            .groups
            .iter()
            .map(|g| BrauerCatalog::group_label(g))
            .collect();
        assert_eq!(catalog.group_labels(), table_groups);
    }
}

/// Criterion 5: spot values of the order formula, exact.
#[test]
fn criterion_5_order_spot_values() {
    let gauss = ImQuadField::new(-1).unwrap();
    let three = parse_ideal(&gauss, "3i").unwrap();
    assert_eq!(
        k3_order(&gauss, &three).unwrap().exact_order(),
        Some(&BigInt::one())
    );
    let seven = parse_ideal(&gauss, "7i").unwrap();
    assert_eq!(
        k3_order(&gauss, &seven).unwrap().exact_order(),
        Some(&BigInt::from(2))
    );
    let eis = ImQuadField::new(-3).unwrap();
    let two = parse_ideal(&eis, "2i").unwrap();
    assert_eq!(
        k3_order(&eis, &two).unwrap().exact_order(),
        Some(&BigInt::one())
    );
    let s3_4 = parse_ideal(&eis, "3r^4").unwrap();
    assert!(k3_order(&eis, &s3_4).unwrap().exact_order().unwrap() > &BigInt::one());
}

/// Criterion 6: base order equals the genus value h / 2^(t-1) for every
/// fundamental discriminant with |D| <= 200, in under thirty seconds.
#[test]
fn criterion_6_genus_cross_check() {
    let start = Instant::now();
    let mut seen = 0;
    for d in -200i64..0 {
        let field = match ImQuadField::new(d) {
            Ok(f) if -f.discriminant() <= 200 => f,
            _ => continue,
        };
        seen += 1;
        let t = field.ramified_primes().len() as u32;
        let h = BigInt::from(field.class_number());
        let (genus, rem) = h.div_rem(&(BigInt::one() << (t - 1)));
        assert!(rem.is_zero(), "d = {d}: 2^(t-1) does not divide h");
        assert_eq!(k3_base_order(&field).unwrap(), genus, "d = {d}");
    }
    assert!(seen > 50, "sweep covered too few fields");
    assert!(start.elapsed().as_secs() < 30, "took too long");
}

/// Criterion 7: brute-force oracle suites, zero failures.
#[test]
fn criterion_7_oracle_suites() {
    phi_oracle_suite();
    gram_dual_oracle_suite();
    ray_class_oracle_suite();
    scaling_laws_suite();
}

/// phi_E against exhaustive residue counting, up to the 10^4 norm scale.
fn phi_oracle_suite() {
    let count_units = |field: &ImQuadField, ideal: &FactoredIdeal| -> u64 {
        let zb = to_zbasis(field, ideal);
        let a = zb.a().to_integer().to_i64().unwrap();
        let c = zb.c().to_integer().to_i64().unwrap();
        let primes: Vec<_> = ideal
            .iter()
            .map(|(p, _)| to_zbasis(field, &FactoredIdeal::from_prime(*p, 1)))
            .collect();
        let mut count = 0;
        for x in 0..a {
            for y in 0..c {
                let e = FieldElement::from_ints(x, y);
                if primes.iter().all(|p| !p.contains(&e)) {
                    count += 1;
                }
            }
        }
        count
    };
    for d in [-1i64, -3, -5, -7] {
        let field = ImQuadField::new(d).unwrap();
        for ideal in integral_ideals_up_to(&field, 120).unwrap() {
            assert_eq!(
                euler_phi(&ideal).unwrap(),
                BigInt::from(count_units(&field, &ideal)),
                "phi mismatch, d = {d}, I = {ideal}"
            );
        }
    }
    let gauss = ImQuadField::new(-1).unwrap();
    for lit in ["2r^13", "3i^4", "5s^4*5t", "(99)"] {
        let ideal = parse_ideal(&gauss, lit).unwrap();
        assert!(ideal.norm() <= q(10_000));
        assert_eq!(
            euler_phi(&ideal).unwrap(),
            BigInt::from(count_units(&gauss, &ideal))
        );
    }
}

fn xorshift(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

/// Formula dual against the Gram-inverse dual on 200 random integral
/// lattices.
fn gram_dual_oracle_suite() {
    let fields: Vec<ImQuadField> = [-1i64, -3, -5, -7, -15]
        .iter()
        .map(|d| ImQuadField::new(*d).unwrap())
        .collect();
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut checked = 0;
    while checked < 200 {
        let field = &fields[(xorshift(&mut state) % 5) as usize];
        let x = (xorshift(&mut state) % 9) as i64 - 4;
        let y = (xorshift(&mut state) % 9) as i64 - 4;
        let den = (xorshift(&mut state) % 6) as i64 + 1;
        let e = FieldElement::new(BigRational::new(x.into(), den.into()), q(y));
        if e.is_zero() {
            continue;
        }
        let ideal = factor_element(field, &e).unwrap();
        let alpha = BigRational::new(
            BigInt::from((xorshift(&mut state) % 5) as i64 + 1),
            BigInt::from((xorshift(&mut state) % 40) as i64 + 1),
        );
        if !is_integral_lattice(field, &ideal, &alpha).unwrap() {
            continue;
        }
        assert_eq!(
            dual_lattice(field, &ideal, &alpha).unwrap(),
            dual_via_gram(field, &ideal, &alpha).unwrap(),
            "dual mismatch for {ideal}"
        );
        checked += 1;
    }
}

/// Ray class numbers against class enumeration for three fields.
fn ray_class_oracle_suite() {
    for d in [-1i64, -3, -5] {
        let field = ImQuadField::new(d).unwrap();
        for ideal in integral_ideals_up_to(&field, 30).unwrap() {
            let expected = ray_class_number(&field, &ideal).unwrap();
            let got = ray_class_count(&field, &ideal, 60);
            assert_eq!(expected, BigInt::from(got), "d = {d}, I = {ideal}");
        }
    }
}

fn ray_class_count(field: &ImQuadField, ideal: &FactoredIdeal, enum_bound: u64) -> u64 {
    let in_kernel = |e: &FieldElement| -> bool {
        let one = FieldElement::one();
        if *e == one {
            return true;
        }
        let shifted = factor_element(field, &field.sub(e, &one)).unwrap();
        ideal.iter().all(|(p, v)| shifted.exponent(p) >= *v)
    };
    let mut reps: Vec<FactoredIdeal> = Vec::new();
    'next: for a in integral_ideals_up_to(field, enum_bound)
        .unwrap()
        .into_iter()
        .filter(|a| a.gcd(ideal).is_one())
    {
        for r in &reps {
            if let Some(g) = is_principal(field, &a.mul(&r.inv())) {
                if field
                    .roots_of_unity()
                    .iter()
                    .any(|z| in_kernel(&field.mul(z, &g)))
                {
                    continue 'next;
                }
            }
        }
        reps.push(a);
    }
    reps.len() as u64
}

/// Dual-of-scaled lattices and level-ideal invariance, 200 random cases.
fn scaling_laws_suite() {
    let fields: Vec<ImQuadField> = [-1i64, -2, -3, -7, -11]
        .iter()
        .map(|d| ImQuadField::new(*d).unwrap())
        .collect();
    let mut state = 0xDEADBEEFCAFEF00Du64;
    let mut checked = 0;
    while checked < 200 {
        let field = &fields[(xorshift(&mut state) % 5) as usize];
        let x = (xorshift(&mut state) % 11) as i64 - 5;
        let y = (xorshift(&mut state) % 11) as i64 - 5;
        if x == 0 && y == 0 {
            continue;
        }
        let e = field.el(x, y);
        let base = (xorshift(&mut state) % 7) as i64 - 3;
        let ideal = if base == 0 {
            FactoredIdeal::one()
        } else {
            factor_element(field, &field.el(base, 1)).unwrap()
        };
        let alpha = q(1);
        // dual commutes with scaling
        let principal = factor_element(field, &e).unwrap();
        let lhs = dual_lattice(field, &ideal.mul(&principal), &(&alpha / field.norm(&e))).unwrap();
        let rhs = dual_lattice(field, &ideal, &alpha).unwrap().mul(&principal);
        assert_eq!(lhs, rhs, "dual/scale mismatch");
        // level ideal is unchanged under scaling
        let shrink = (xorshift(&mut state) % 3) as i64;
        let target = factor_element(field, &field.el(1, 1)).unwrap().pow(shrink);
        let level = dual_lattice(field, &ideal, &alpha).unwrap().mul(&target.inv());
        let ls = IdealLatticeLS::new(field, ideal, alpha, level).unwrap();
        let scaled = scale(field, &e, &ls).unwrap();
        assert_eq!(
            ls.level_ideal(field).unwrap(),
            scaled.level_ideal(field).unwrap(),
            "level ideal changed under scaling"
        );
        checked += 1;
    }
}

/// Criterion 8: Galois-action checks. Ramified primes pass; for
/// mu = {+-1} fields, powers of unramified ell in {5, 7, 11} fail.
#[test]
fn criterion_8_galois_action_checks() {
    for d in [-1i64, -3, -7, -15] {
        let field = ImQuadField::new(d).unwrap();
        for r in field.ramified_primes() {
            let prime = FactoredIdeal::from_prime(primes_above(&field, *r).unwrap()[0], 1);
            assert!(
                residue_units_galois_trivial(&field, &prime, 1 << 24).unwrap(),
                "d = {d}: prime over {r} must pass"
            );
        }
    }
    let cap = BigInt::from(10_000u64);
    for d in [-2i64, -6, -13] {
        let field = ImQuadField::new(d).unwrap();
        assert_eq!(field.mu_order(), 2);
        for ell in [5u64, 7, 11] {
            assert!(!field.ramified_primes().contains(&ell));
            let mut targets: Vec<FactoredIdeal> = Vec::new();
            let full = FactoredIdeal::from_factors(
                primes_above(&field, ell).unwrap().into_iter().map(|p| (p, 1)),
            );
            let mut n = 1i64;
            while full.pow(n).norm().to_integer() <= cap {
                targets.push(full.pow(n));
                n += 1;
            }
            for p in primes_above(&field, ell).unwrap() {
                let mut k = 1i64;
                while FactoredIdeal::from_prime(p, k).norm().to_integer() <= cap {
                    targets.push(FactoredIdeal::from_prime(p, k));
                    k += 1;
                }
            }
            for ideal in targets {
                let j = ideal.lcm(&ideal.conj());
                assert!(
                    !residue_units_galois_trivial(&field, &j, 1 << 30).unwrap(),
                    "d = {d}: {ideal} must fail"
                );
            }
        }
    }
}

/// Criterion 9: the aggregate known-answer command exits cleanly in under
/// a minute.
///
/// Known discrepancy: this currently exits 1 because the Eisenstein group
/// table diff reports the extra Z/7 (see criterion 3).
#[test]
fn criterion_9_verify_paper_aggregate() {
    let start = Instant::now();
    let output = bin().arg("verify-paper").output().expect("binary runs");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(
        start.elapsed().as_secs() < 60,
        "verify-paper took too long"
    );
    assert!(
        output.status.success(),
        "verify-paper reported failures:\n{stdout}"
    );
}
