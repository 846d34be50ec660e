//! Expansion of kept ideals into the superset of possible Galois-fixed
//! Brauer groups, the six-case table for odd discriminants, and the
//! Hilbert-class-field classifier based on the Galois action on residue
//! units.
//!
//! A group enters the catalog as O_E/I_B for an integral divisor I_B of
//! some kept ideal; entries carry their witnesses for auditability, and
//! the deduplicated list of abelian-group shapes is reported in
//! invariant-factor form.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::enumerate::EnumerationReport;
use crate::error::{Error, Result};
use crate::field::{ImQuadField, SplittingType};
use crate::ideal::{
    abelian_invariants, factor_rational, primes_above, residue_units_galois_trivial,
    FactoredIdeal,
};

/// One divisor of a kept ideal, with the group it cuts out.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub ideal: FactoredIdeal,
    pub norm: BigInt,
    pub invariants: Vec<BigInt>,
    /// The kept ideals this divisor divides.
    pub witnesses: Vec<FactoredIdeal>,
}

/// The Brauer-group superset attached to (E, n).
#[derive(Debug, Clone)]
pub struct BrauerCatalog {
    pub field_d: i64,
    pub n: u64,
    /// All divisors of kept ideals, deduplicated by ideal and sorted by
    /// norm then literal.
    pub entries: Vec<CatalogEntry>,
    /// Distinct abelian groups, sorted by order then invariants.
    pub distinct_groups: Vec<Vec<BigInt>>,
}

impl BrauerCatalog {
    /// Renders invariant factors as a group label, largest factor first,
    /// e.g. `Z/8 x Z/4`; the trivial group is `0`.
    pub fn group_label(invariants: &[BigInt]) -> String {
        if invariants.is_empty() {
            return "0".into();
        }
        invariants
            .iter()
            .rev()
            .map(|d| format!("Z/{d}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }

    pub fn group_labels(&self) -> Vec<String> {
        self.distinct_groups.iter().map(|g| Self::group_label(g)).collect()
    }
}

/// All integral divisors of an integral ideal.
pub fn divisors(ideal: &FactoredIdeal) -> Vec<FactoredIdeal> {
    let factors: Vec<_> = ideal.iter().map(|(p, e)| (*p, *e)).collect();
    let mut out = vec![FactoredIdeal::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            for k in 0..=e {
                next.push(d.mul(&FactoredIdeal::from_prime(p, k)));
            }
        }
        out = next;
    }
    out
}

/// Step 3: expands a certified enumeration into the group superset.
pub fn brauer_superset(
    report: &EnumerationReport,
    force_uncertified: bool,
) -> Result<BrauerCatalog> {
    if !report.certified() && !force_uncertified {
        let mut why = Vec::new();
        if report.cap_saturated {
            why.push("a kept ideal sits on an exponent ceiling".to_string());
        }
        why.extend(report.uncertified_reasons.iter().cloned());
        return Err(Error::Uncertified(why.join("; ")));
    }
    Ok(catalog_from_kept(
        report.field_d,
        report.n,
        &report.kept_ideals(),
    ))
}

/// Divisor expansion of an explicit kept set (no certification check).
pub fn catalog_from_kept(
    field_d: i64,
    n: u64,
    kept: &[FactoredIdeal],
) -> BrauerCatalog {
    let mut by_ideal: BTreeMap<FactoredIdeal, Vec<FactoredIdeal>> = BTreeMap::new();
    for witness in kept {
        for d in divisors(witness) {
            by_ideal.entry(d).or_default().push(witness.clone());
        }
    }
    let mut entries: Vec<CatalogEntry> = by_ideal
        .into_iter()
        .map(|(ideal, witnesses)| {
            let invariants = abelian_invariants(&ideal).expect("divisors are integral");
            CatalogEntry {
                norm: ideal.norm().to_integer(),
                invariants,
                ideal,
                witnesses,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.norm
            .cmp(&b.norm)
            .then_with(|| a.ideal.to_string().cmp(&b.ideal.to_string()))
    });
    let distinct: BTreeSet<Vec<BigInt>> =
        entries.iter().map(|e| e.invariants.clone()).collect();
    let mut distinct_groups: Vec<Vec<BigInt>> = distinct.into_iter().collect();
    distinct_groups.sort_by_key(|g| (g.iter().product::<BigInt>(), g.clone()));
    BrauerCatalog {
        field_d,
        n,
        entries,
        distinct_groups,
    }
}

/// The six-case classification table for odd-discriminant fields, keyed by
/// the behaviour of 2 and 3.
#[derive(Debug, Clone)]
pub struct OddDiscCase {
    pub label: char,
    /// Proper ambiguous ideals supported above 2 and 3 whose K3 order
    /// stays at the base order.
    pub kept: Vec<FactoredIdeal>,
    /// Expected groups, in invariant-factor form.
    pub groups: Vec<Vec<BigInt>>,
}

/// Looks up the expected kept ideals and groups for a field with
/// mu(E) = {+-1} and 2 unramified, by the splitting of 2 and 3.
pub fn odd_disc_case(field: &ImQuadField) -> Result<OddDiscCase> {
    if field.mu_order() != 2 {
        return Err(Error::Validation(
            "the odd-discriminant table needs mu(E) = {+-1}".into(),
        ));
    }
    if field.ramified_primes().contains(&2) {
        return Err(Error::Validation(
            "the odd-discriminant table needs 2 unramified".into(),
        ));
    }
    let two = factor_rational(field, &BigInt::from(2).into())?;
    let four = two.pow(2);
    let s2 = field.splitting_type(2)?;
    let s3 = field.splitting_type(3)?;
    let three = || factor_rational(field, &BigInt::from(3).into());
    let r3 = || -> Result<FactoredIdeal> {
        Ok(FactoredIdeal::from_prime(primes_above(field, 3)?[0], 1))
    };

    let inv = |v: &[i64]| -> Vec<BigInt> { v.iter().map(|x| BigInt::from(*x)).collect() };
    let two_groups_split: Vec<Vec<BigInt>> = [
        vec![],
        vec![2],
        vec![2, 2],
        vec![4],
        vec![2, 4],
        vec![4, 4],
    ]
    .iter()
    .map(|v| inv(v))
    .collect();

    let (label, kept, mut groups) = match (s2, s3) {
        (SplittingType::Split, SplittingType::Split) => {
            let three = three()?;
            let six = two.mul(&three);
            let mut g = two_groups_split.clone();
            g.extend([vec![3], vec![3, 3], vec![6], vec![3, 6], vec![2, 6], vec![6, 6]]
                .iter()
                .map(|v| inv(v)));
            ('a', vec![two.clone(), three, four, six], g)
        }
        (SplittingType::Split, SplittingType::Inert) => {
            ('b', vec![two.clone(), four], two_groups_split.clone())
        }
        (SplittingType::Split, SplittingType::Ramified) => {
            let r3 = r3()?;
            let two_r3 = two.mul(&r3);
            let mut g = two_groups_split.clone();
            g.extend([vec![3], vec![6], vec![2, 6]].iter().map(|v| inv(v)));
            ('c', vec![two.clone(), four, r3, two_r3], g)
        }
        (SplittingType::Inert, SplittingType::Split) => {
            ('d', vec![three()?], vec![inv(&[]), inv(&[3]), inv(&[3, 3])])
        }
        (SplittingType::Inert, SplittingType::Inert) => ('e', vec![], vec![inv(&[])]),
        (SplittingType::Inert, SplittingType::Ramified) => {
            ('f', vec![r3()?], vec![inv(&[]), inv(&[3])])
        }
        (SplittingType::Ramified, _) => unreachable!("2 unramified was checked"),
    };
    groups.sort_by_key(|g| (g.iter().product::<BigInt>(), g.clone()));
    let mut kept = kept;
    kept.sort();
    Ok(OddDiscCase {
        label,
        kept,
        groups,
    })
}

/// An ideal passing the Hilbert-class-field criterion, with its group.
#[derive(Debug, Clone)]
pub struct HilbertEntry {
    pub ideal: FactoredIdeal,
    pub invariants: Vec<BigInt>,
}

/// All integral ideals I of norm at most `norm_bound` (up to conjugation)
/// such that complex conjugation acts trivially on the residue units of
/// lcm(I, conj(I)) modulo the roots of unity.
pub fn hilbert_brauer_set(
    field: &ImQuadField,
    norm_bound: u64,
    residue_bound: u64,
) -> Result<Vec<HilbertEntry>> {
    let mut out = Vec::new();
    for ideal in integral_ideals_up_to(field, norm_bound)? {
        // one representative per conjugate pair
        if ideal.conj() < ideal {
            continue;
        }
        let j = ideal.lcm(&ideal.conj());
        if residue_units_galois_trivial(field, &j, residue_bound)? {
            let invariants = abelian_invariants(&ideal)?;
            out.push(HilbertEntry { ideal, invariants });
        }
    }
    Ok(out)
}

/// All integral ideals of norm at most the bound, sorted by norm then
/// literal.
pub fn integral_ideals_up_to(field: &ImQuadField, norm_bound: u64) -> Result<Vec<FactoredIdeal>> {
    let mut primes = Vec::new();
    for p in 2..=norm_bound {
        if !crate::field::is_prime(p) {
            continue;
        }
        for q in primes_above(field, p)? {
            if q.residue_norm() <= BigInt::from(norm_bound) {
                primes.push(q);
            }
        }
    }
    let mut out = Vec::new();
    let mut stack = vec![(0usize, FactoredIdeal::one(), BigInt::from(1u32))];
    let bound = BigInt::from(norm_bound);
    while let Some((idx, ideal, norm)) = stack.pop() {
        if idx == primes.len() {
            out.push(ideal);
            continue;
        }
        let q = primes[idx];
        let mut e = 0i64;
        let mut n = norm.clone();
        while n <= bound {
            stack.push((idx + 1, ideal.mul(&FactoredIdeal::from_prime(q, e)), n.clone()));
            e += 1;
            n *= q.residue_norm();
        }
    }
    out.sort_by(|a, b| {
        a.norm()
            .to_integer()
            .cmp(&b.norm().to_integer())
            .then_with(|| a.to_string().cmp(&b.to_string()))
    });
    Ok(out)
}
