//! Built-in known-answer suite: recomputes the classification tables from
//! scratch and diffs them against the embedded reference data.

use serde_json::Value;

use k3brauer::brauer::{brauer_superset, catalog_from_kept, odd_disc_case, BrauerCatalog};
use k3brauer::enumerate::{enumerate_kept, EnumerateOptions};
use k3brauer::ideal::{primes_above, residue_units_galois_trivial, FactoredIdeal};
use k3brauer::k3::{k3_base_order, k3_order};
use k3brauer::literal::parse_ideal;
use k3brauer::ImQuadField;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn ok(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: true,
            detail: String::new(),
        }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: false,
            detail: detail.into(),
        }
    }

    fn diff(name: impl Into<String>, expected: &[String], got: &[String]) -> Self {
        if expected == got {
            return Check::ok(name);
        }
        let missing: Vec<_> = expected.iter().filter(|x| !got.contains(x)).collect();
        let extra: Vec<_> = got.iter().filter(|x| !expected.contains(x)).collect();
        Check::fail(
            name,
            format!("missing {missing:?}, extra {extra:?} (expected {} entries, got {})", expected.len(), got.len()),
        )
    }
}

const GAUSSIAN: &str = include_str!("../data/gaussian_n1.json");
const EISENSTEIN: &str = include_str!("../data/eisenstein_n1.json");
const ODD_CASES: &str = include_str!("../data/odd_disc_cases.json");
const SPOT_ORDERS: &str = include_str!("../data/spot_orders.json");

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|x| x.as_str().expect("string").to_string())
        .collect()
}

/// Live enumeration + expansion for a whole-field table.
fn live_table(d: i64, n: u64) -> Result<(Vec<String>, Vec<String>), String> {
    let field = ImQuadField::new(d).map_err(|e| e.to_string())?;
    let report = enumerate_kept(&field, n, &EnumerateOptions::default()).map_err(|e| e.to_string())?;
    if !report.certified() {
        return Err("enumeration not certified".into());
    }
    let catalog = brauer_superset(&report, false).map_err(|e| e.to_string())?;
    let kept = report.kept.iter().map(|e| e.ideal.to_string()).collect();
    Ok((kept, catalog.group_labels()))
}

fn table_checks(raw: &str, label: &str, out: &mut Vec<Check>) {
    let table: Value = serde_json::from_str(raw).expect("valid embedded JSON");
    let d = table["d"].as_i64().unwrap();
    let n = table["n"].as_u64().unwrap();
    match live_table(d, n) {
        Ok((kept, groups)) => {
            out.push(Check::diff(
                format!("{label}: kept ideals"),
                &strings(&table["kept"]),
                &kept,
            ));
            out.push(Check::diff(
                format!("{label}: groups"),
                &strings(&table["groups"]),
                &groups,
            ));
        }
        Err(e) => {
            out.push(Check::fail(format!("{label}: kept ideals"), e.clone()));
            out.push(Check::fail(format!("{label}: groups"), e));
        }
    }
}

fn supported_above_23(ideal: &FactoredIdeal) -> bool {
    ideal.rational_support().iter().all(|p| *p == 2 || *p == 3)
}

fn odd_disc_checks(out: &mut Vec<Check>) {
    let table: Value = serde_json::from_str(ODD_CASES).expect("valid embedded JSON");
    for case in table["cases"].as_array().unwrap() {
        let label = case["case"].as_str().unwrap();
        let d = case["d"].as_i64().unwrap();
        let name = format!("odd-discriminant case ({label}), d = {d}");
        let field = match ImQuadField::new(d) {
            Ok(f) => f,
            Err(e) => {
                out.push(Check::fail(name, e.to_string()));
                continue;
            }
        };
        type CaseTables = (Vec<String>, Vec<String>, Vec<String>, Vec<String>);
        let run = || -> Result<CaseTables, String> {
            let n = k3_base_order(&field)
                .map_err(|e| e.to_string())?
                .to_u64()
                .expect("base order fits");
            let report =
                enumerate_kept(&field, n, &EnumerateOptions::default()).map_err(|e| e.to_string())?;
            if !report.certified() {
                return Err("enumeration not certified".into());
            }
            // the case tables cover only the part supported above 2 and 3;
            // ramified primes over other rational primes are field-specific
            let filtered: Vec<FactoredIdeal> = report
                .kept_ideals()
                .into_iter()
                .filter(|i| !i.is_one() && supported_above_23(i))
                .collect();
            let kept: Vec<String> = filtered.iter().map(|i| i.to_string()).collect();
            let mut with_unit = filtered.clone();
            with_unit.push(FactoredIdeal::one());
            let catalog = catalog_from_kept(d, n, &with_unit);
            let expected = odd_disc_case(&field).map_err(|e| e.to_string())?;
            let expected_kept: Vec<String> =
                expected.kept.iter().map(|i| i.to_string()).collect();
            let expected_groups: Vec<String> = expected
                .groups
                .iter()
                .map(|g| BrauerCatalog::group_label(g))
                .collect();
            Ok((kept, catalog.group_labels(), expected_kept, expected_groups))
        };
        match run() {
            Ok((kept, groups, expected_kept_live, expected_groups_live)) => {
                // embedded table and the library's case table must both match
                let mut embedded_kept = strings(&case["kept"]);
                embedded_kept.sort_by(sort_by_ideal_text(&field));
                out.push(Check::diff(format!("{name}: kept ideals"), &embedded_kept, &kept));
                out.push(Check::diff(
                    format!("{name}: groups"),
                    &strings(&case["groups"]),
                    &groups,
                ));
                let mut expected_sorted = expected_kept_live.clone();
                expected_sorted.sort();
                let mut live_sorted = kept.clone();
                live_sorted.sort();
                out.push(Check::diff(
                    format!("{name}: case table consistency"),
                    &expected_sorted,
                    &live_sorted,
                ));
                out.push(Check::diff(
                    format!("{name}: group table consistency"),
                    &expected_groups_live,
                    &groups,
                ));
            }
            Err(e) => out.push(Check::fail(name, e)),
        }
    }
}

/// Sort literals the way enumeration reports them: by norm, then text.
fn sort_by_ideal_text(field: &ImQuadField) -> impl Fn(&String, &String) -> std::cmp::Ordering + '_ {
    move |a: &String, b: &String| {
        let ia = parse_ideal(field, a).expect("embedded literal");
        let ib = parse_ideal(field, b).expect("embedded literal");
        ia.norm()
            .to_integer()
            .cmp(&ib.norm().to_integer())
            .then_with(|| a.cmp(b))
    }
}

fn spot_order_checks(out: &mut Vec<Check>) {
    let table: Value = serde_json::from_str(SPOT_ORDERS).expect("valid embedded JSON");
    let mut pass = true;
    let mut detail = String::new();
    for row in table["exact"].as_array().unwrap() {
        let d = row["d"].as_i64().unwrap();
        let lit = row["ideal"].as_str().unwrap();
        let expected = BigInt::from(row["order"].as_u64().unwrap());
        let field = ImQuadField::new(d).unwrap();
        let ideal = parse_ideal(&field, lit).unwrap();
        match k3_order(&field, &ideal) {
            Ok(est) => match est.exact_order() {
                Some(order) if *order == expected => {}
                other => {
                    pass = false;
                    detail.push_str(&format!(
                        "d={d} I={lit}: expected exact order {expected}, got {other:?}; "
                    ));
                }
            },
            Err(e) => {
                pass = false;
                detail.push_str(&format!("d={d} I={lit}: {e}; "));
            }
        }
    }
    for row in table["greater_than_one"].as_array().unwrap() {
        let d = row["d"].as_i64().unwrap();
        let lit = row["ideal"].as_str().unwrap();
        let field = ImQuadField::new(d).unwrap();
        let ideal = parse_ideal(&field, lit).unwrap();
        match k3_order(&field, &ideal) {
            Ok(est) => {
                if est.exact_order().map(|o| o > &BigInt::one()) != Some(true) {
                    pass = false;
                    detail.push_str(&format!("d={d} I={lit}: expected order > 1; "));
                }
            }
            Err(e) => {
                pass = false;
                detail.push_str(&format!("d={d} I={lit}: {e}; "));
            }
        }
    }
    out.push(if pass {
        Check::ok("order formula spot values")
    } else {
        Check::fail("order formula spot values", detail)
    });
}

fn galois_action_checks(out: &mut Vec<Check>) {
    // every prime over a ramified rational prime passes
    let mut pass = true;
    let mut detail = String::new();
    for d in [-1i64, -3, -7, -15] {
        let field = ImQuadField::new(d).unwrap();
        for r in field.ramified_primes() {
            let prime = FactoredIdeal::from_prime(primes_above(&field, *r).unwrap()[0], 1);
            match residue_units_galois_trivial(&field, &prime, 1 << 24) {
                Ok(true) => {}
                Ok(false) => {
                    pass = false;
                    detail.push_str(&format!("d={d}: ramified prime over {r} rejected; "));
                }
                Err(e) => {
                    pass = false;
                    detail.push_str(&format!("d={d}, prime over {r}: {e}; "));
                }
            }
        }
    }
    out.push(if pass {
        Check::ok("Galois action: ramified primes pass")
    } else {
        Check::fail("Galois action: ramified primes pass", detail)
    });

    // mu = {+-1}, ell in {5, 7, 11} unramified: (ell)^n and the primes above
    // ell all fail, up to ideal norm 10^4
    let mut pass = true;
    let mut detail = String::new();
    for d in [-2i64, -6, -13] {
        let field = ImQuadField::new(d).unwrap();
        assert_eq!(field.mu_order(), 2);
        for ell in [5u64, 7, 11] {
            assert!(!field.ramified_primes().contains(&ell));
            let mut targets: Vec<FactoredIdeal> = Vec::new();
            let full = FactoredIdeal::from_factors(
                primes_above(&field, ell).unwrap().into_iter().map(|q| (q, 1)),
            );
            let cap = BigInt::from(10_000u64);
            let mut n = 1i64;
            while full.pow(n).norm().to_integer() <= cap {
                targets.push(full.pow(n));
                n += 1;
            }
            for q in primes_above(&field, ell).unwrap() {
                let mut k = 1i64;
                while FactoredIdeal::from_prime(q, k).norm().to_integer() <= cap {
                    targets.push(FactoredIdeal::from_prime(q, k));
                    k += 1;
                }
            }
            for ideal in targets {
                let j = ideal.lcm(&ideal.conj());
                match residue_units_galois_trivial(&field, &j, 1 << 30) {
                    Ok(false) => {}
                    Ok(true) => {
                        pass = false;
                        detail.push_str(&format!("d={d}: {ideal} unexpectedly passes; "));
                    }
                    Err(e) => {
                        pass = false;
                        detail.push_str(&format!("d={d}, {ideal}: {e}; "));
                    }
                }
            }
        }
    }
    out.push(if pass {
        Check::ok("Galois action: unramified odd prime powers fail")
    } else {
        Check::fail("Galois action: unramified odd prime powers fail", detail)
    });
}

pub fn run_all() -> Vec<Check> {
    let mut out = Vec::new();
    table_checks(GAUSSIAN, "Gaussian table (d = -1, n = 1)", &mut out);
    table_checks(EISENSTEIN, "Eisenstein table (d = -3, n = 1)", &mut out);
    odd_disc_checks(&mut out);
    spot_order_checks(&mut out);
    galois_action_checks(&mut out);
    out
}
