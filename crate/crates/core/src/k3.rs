//! The order engine for K3 class groups of an imaginary quadratic field.
//!
//! For an ambiguous integral ideal I with J = I intersect Z, the group
//! order is
//!
//! ```text
//!              h * phi_E(I) * 2 * 2
//!   A / |H1|,  A = ---------------------------------
//!              phi(J) * [O_E^x : O_E^I] * e(E/Q, J)
//! ```
//!
//! where the two 2's are the degree \[E:Q\] and the norm-unit index
//! \[Z^x : N(O_E^I)\] (norms from an imaginary quadratic field are positive,
//! so the latter is always 2), e(E/Q, J) collects the ramification indices
//! of the places of Q not dividing J, and H1 is a 2-torsion cohomology
//! group that is trivial unless 2 ramifies in E and divides I. When H1 is
//! only bounded, the engine carries the full set of orders compatible with
//! the bound instead of guessing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::ImQuadField;
use crate::ideal::{
    conj_fixed_unit_count, euler_phi, rational_intersection, unit_residue_index, FactoredIdeal,
};

/// Default ceiling for residue enumerations used by the H^1 bound.
pub const DEFAULT_RESIDUE_BOUND: u64 = 1_000_000;

/// Outcome of bounding |H^1(E^{I,1})|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum H1Bound {
    /// The group is trivial (odd I, or 2 unramified in E).
    Exact1,
    /// Only an upper bound 2 * index is known; `invariant_unit_index` is
    /// [(O_E/I_2)^{x,G} : (Z/J_2)^x], computed by residue enumeration.
    Upper { bound: u64, invariant_unit_index: u64 },
}

impl H1Bound {
    pub fn upper(&self) -> u64 {
        match self {
            H1Bound::Exact1 => 1,
            H1Bound::Upper { bound, .. } => *bound,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, H1Bound::Exact1)
    }
}

/// The order data attached to an ambiguous integral ideal.
#[derive(Debug, Clone)]
pub struct K3OrderEstimate {
    /// The ambiguous ideal the estimate is for (input after lcm reduction).
    pub ideal: FactoredIdeal,
    /// The integer value of the formula before dividing by |H^1|.
    pub numerator_a: BigInt,
    /// Bound or exact triviality of H^1.
    pub h1: H1Bound,
    /// All orders A/h with h dividing the H^1 bound and A/h integral.
    pub possible_orders: Vec<BigInt>,
    /// J = I intersect Z.
    pub rational_j: BigInt,
    /// e(E/Q, J).
    pub e_factor: u64,
    /// phi_E(I).
    pub phi_e: BigInt,
    /// phi(J), the rational totient.
    pub phi_j: BigInt,
    /// [O_E^x : O_E^I].
    pub unit_index: u64,
}

impl K3OrderEstimate {
    /// The exact order when H^1 is known to be trivial.
    pub fn exact_order(&self) -> Option<&BigInt> {
        if self.h1.is_exact() {
            Some(&self.numerator_a)
        } else {
            None
        }
    }
}

/// e(E/Q, J) = 2^(1 + #{ramified p with p not dividing J}).
///
/// The archimedean place of Q always ramifies in an imaginary quadratic
/// field and never divides the (finite) modulus J, so it always
/// contributes a factor 2.
pub fn e_ramification(field: &ImQuadField, j: &BigInt) -> u64 {
    assert!(j.is_positive(), "modulus must be a positive integer");
    let finite = field
        .ramified_primes()
        .iter()
        .filter(|p| !(j % BigInt::from(**p)).is_zero())
        .count() as u32;
    1u64 << (1 + finite)
}

/// [O_F^x : N(O_E^I)] = 2: norms from an imaginary quadratic field are
/// positive, so the norm subgroup is {1} inside {+-1}.
pub fn norm_unit_index(_field: &ImQuadField) -> u64 {
    2
}

/// Rational Euler totient.
pub fn rational_phi(n: &BigInt) -> Result<BigInt> {
    if !n.is_positive() {
        return Err(Error::Validation("totient of a nonpositive integer".into()));
    }
    let mut phi = BigInt::one();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            let mut e = 0u32;
            while (&m % &p).is_zero() {
                m /= &p;
                e += 1;
            }
            phi *= (&p - BigInt::one()) * p.pow(e - 1);
        }
        p += 1;
    }
    if !m.is_one() {
        phi *= &m - BigInt::one();
    }
    Ok(phi)
}

/// Bounds |H^1(E^{I,1})| for an ambiguous integral ideal.
///
/// Trivial whenever I is odd or 2 does not ramify in E. Otherwise the
/// bound is 2 * [(O_E/I_2)^{x,G} : (Z/J_2)^x] with I_2 the 2-part of I and
/// J_2 = I_2 intersect Z; the invariant-unit index is found by exhaustive
/// residue enumeration (the factor 2 accounts for the one prime above 2).
pub fn h1_bound(field: &ImQuadField, ideal: &FactoredIdeal, residue_bound: u64) -> Result<H1Bound> {
    if !ideal.is_integral() || !ideal.is_ambiguous() {
        return Err(Error::Validation(
            "H^1 bound needs an integral ambiguous ideal".into(),
        ));
    }
    let two_part = ideal.part_above(2);
    if two_part.is_one() || !field.ramified_primes().contains(&2) {
        return Ok(H1Bound::Exact1);
    }
    let k = two_part.iter().next().map(|(_, e)| *e as u32).unwrap();
    let fixed = conj_fixed_unit_count(field, &two_part, residue_bound)?;
    let phi_j2 = 1u64 << (k.div_ceil(2) - 1); // phi(2^ceil(k/2))
    if fixed % phi_j2 != 0 {
        return Err(Error::Internal(
            "rational units do not embed in the invariant units".into(),
        ));
    }
    let index = fixed / phi_j2;
    Ok(H1Bound::Upper {
        bound: 2 * index,
        invariant_unit_index: index,
    })
}

/// Evaluates the order formula on an integral ideal.
///
/// A non-ambiguous input is first replaced by lcm(I, conj(I)), which
/// leaves the group unchanged.
pub fn k3_order(field: &ImQuadField, ideal: &FactoredIdeal) -> Result<K3OrderEstimate> {
    k3_order_with_bound(field, ideal, DEFAULT_RESIDUE_BOUND)
}

pub fn k3_order_with_bound(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
    residue_bound: u64,
) -> Result<K3OrderEstimate> {
    if !ideal.is_integral() {
        return Err(Error::Validation("k3 order needs an integral ideal".into()));
    }
    let ideal = ideal.lcm(&ideal.conj());
    let phi_e = euler_phi(&ideal)?;
    let rational_j = rational_intersection(&ideal)?;
    let phi_j = rational_phi(&rational_j)?;
    let unit_index = unit_residue_index(field, &ideal)?;
    let e_factor = e_ramification(field, &rational_j);
    let h = BigInt::from(field.class_number());

    let numerator = h * &phi_e * BigInt::from(norm_unit_index(field)) * BigInt::from(2);
    let denominator = &phi_j * BigInt::from(unit_index) * BigInt::from(e_factor);
    let (a, rem) = numerator.div_rem(&denominator);
    if !rem.is_zero() {
        return Err(Error::Internal(format!(
            "order formula did not clear denominators on {ideal}"
        )));
    }
    let h1 = h1_bound(field, &ideal, residue_bound)?;
    let mut possible_orders = Vec::new();
    let mut div = BigInt::one();
    let upper = BigInt::from(h1.upper());
    while div <= upper {
        if (&a % &div).is_zero() {
            possible_orders.push(&a / &div);
        }
        div *= 2;
    }
    possible_orders.sort();
    Ok(K3OrderEstimate {
        ideal,
        numerator_a: a,
        h1,
        possible_orders,
        rational_j,
        e_factor,
        phi_e,
        phi_j,
        unit_index,
    })
}

/// Whether some order compatible with the H^1 bound divides n.
///
/// Equivalent to A | n * h1_upper (witness h = A / gcd(A, n)); exact when
/// H^1 is known, and the sound relaxation otherwise.
pub fn k3_order_divides(estimate: &K3OrderEstimate, n: &BigInt) -> bool {
    let target = n * BigInt::from(estimate.h1.upper());
    (target % &estimate.numerator_a).is_zero()
}

/// Convenience wrapper: evaluate the formula on I and test divisibility.
pub fn k3_divides(field: &ImQuadField, ideal: &FactoredIdeal, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Validation("degree bound must be positive".into()));
    }
    let est = k3_order(field, ideal)?;
    Ok(k3_order_divides(&est, &BigInt::from(n)))
}

/// |G_{K3}(E)| = order at the unit ideal, cross-checked against the genus
/// value h / 2^(t-1) with t the number of ramified primes.
pub fn k3_base_order(field: &ImQuadField) -> Result<BigInt> {
    let est = k3_order(field, &FactoredIdeal::one())?;
    let t = field.ramified_primes().len() as u32;
    let h = BigInt::from(field.class_number());
    let pow = BigInt::from(1u64) << (t - 1);
    let (genus, rem) = h.div_rem(&pow);
    if !rem.is_zero() || genus != est.numerator_a {
        return Err(Error::Internal(format!(
            "genus cross-check failed: formula gives {}, genus theory gives {}/2^{}",
            est.numerator_a,
            h,
            t - 1
        )));
    }
    Ok(est.numerator_a)
}
