//! Fractional ideals of O_E in factored form, with on-demand Z-bases.
//!
//! The factored representation (a map from tagged prime ideals to integer
//! exponents) is primary because every order formula in this crate is
//! multiplicative over primes. The Hermite-reduced Z-basis [a, b + c*w] is
//! computed on demand for membership tests and residue enumeration; for an
//! integral ideal the index [O_E : I] = a*c equals the norm.
//!
//! Split primes are labelled canonically: if b is the smallest nonnegative
//! root of the minimal polynomial of w modulo p, the prime (p, w - b) is
//! `SplitFirst` and its conjugate `SplitConj`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, ImQuadField, SplittingType};

/// Position of a prime ideal over its rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimeTag {
    Ramified,
    Inert,
    SplitFirst,
    SplitConj,
}

impl PrimeTag {
    /// One-letter tag used by the ideal literal grammar.
    pub fn letter(self) -> char {
        match self {
            PrimeTag::Ramified => 'r',
            PrimeTag::Inert => 'i',
            PrimeTag::SplitFirst => 's',
            PrimeTag::SplitConj => 't',
        }
    }
}

/// A prime ideal of O_E, identified by its rational prime and tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub tag: PrimeTag,
}

impl PrimeIdeal {
    /// Residue norm: p^2 for inert primes, p otherwise.
    pub fn residue_norm(&self) -> BigInt {
        match self.tag {
            PrimeTag::Inert => BigInt::from(self.p) * BigInt::from(self.p),
            _ => BigInt::from(self.p),
        }
    }

    pub fn conj(&self) -> PrimeIdeal {
        let tag = match self.tag {
            PrimeTag::SplitFirst => PrimeTag::SplitConj,
            PrimeTag::SplitConj => PrimeTag::SplitFirst,
            t => t,
        };
        PrimeIdeal { p: self.p, tag }
    }
}

/// The prime ideals of O_E above a rational prime p.
pub fn primes_above(field: &ImQuadField, p: u64) -> Result<Vec<PrimeIdeal>> {
    Ok(match field.splitting_type(p)? {
        SplittingType::Ramified => vec![PrimeIdeal {
            p,
            tag: PrimeTag::Ramified,
        }],
        SplittingType::Inert => vec![PrimeIdeal {
            p,
            tag: PrimeTag::Inert,
        }],
        SplittingType::Split => vec![
            PrimeIdeal {
                p,
                tag: PrimeTag::SplitFirst,
            },
            PrimeIdeal {
                p,
                tag: PrimeTag::SplitConj,
            },
        ],
    })
}

/// A fractional ideal as a finite product of prime-ideal powers.
///
/// The empty product is the unit ideal (1) = O_E. Exponents are nonzero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FactoredIdeal {
    factors: BTreeMap<PrimeIdeal, i64>,
}

impl FactoredIdeal {
    pub fn one() -> Self {
        FactoredIdeal::default()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn from_prime(p: PrimeIdeal, e: i64) -> Self {
        let mut factors = BTreeMap::new();
        if e != 0 {
            factors.insert(p, e);
        }
        FactoredIdeal { factors }
    }

    pub fn from_factors<I: IntoIterator<Item = (PrimeIdeal, i64)>>(it: I) -> Self {
        let mut out = FactoredIdeal::one();
        for (p, e) in it {
            out.set_exponent(p, out.exponent(&p) + e);
        }
        out
    }

    pub fn exponent(&self, p: &PrimeIdeal) -> i64 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    fn set_exponent(&mut self, p: PrimeIdeal, e: i64) {
        if e == 0 {
            self.factors.remove(&p);
        } else {
            self.factors.insert(p, e);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PrimeIdeal, &i64)> {
        self.factors.iter()
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn mul(&self, other: &FactoredIdeal) -> FactoredIdeal {
        let mut out = self.clone();
        for (p, e) in &other.factors {
            out.set_exponent(*p, out.exponent(p) + e);
        }
        out
    }

    pub fn inv(&self) -> FactoredIdeal {
        FactoredIdeal {
            factors: self.factors.iter().map(|(p, e)| (*p, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> FactoredIdeal {
        if k == 0 {
            return FactoredIdeal::one();
        }
        FactoredIdeal {
            factors: self.factors.iter().map(|(p, e)| (*p, e * k)).collect(),
        }
    }

    pub fn conj(&self) -> FactoredIdeal {
        FactoredIdeal {
            factors: self.factors.iter().map(|(p, e)| (p.conj(), *e)).collect(),
        }
    }

    /// Exponentwise minimum.
    pub fn gcd(&self, other: &FactoredIdeal) -> FactoredIdeal {
        let mut out = FactoredIdeal::one();
        for p in self.factors.keys().chain(other.factors.keys()) {
            out.set_exponent(*p, self.exponent(p).min(other.exponent(p)));
        }
        out
    }

    /// Exponentwise maximum.
    pub fn lcm(&self, other: &FactoredIdeal) -> FactoredIdeal {
        let mut out = FactoredIdeal::one();
        for p in self.factors.keys().chain(other.factors.keys()) {
            out.set_exponent(*p, self.exponent(p).max(other.exponent(p)));
        }
        out
    }

    /// True iff other/self is integral (exponentwise <=).
    pub fn divides(&self, other: &FactoredIdeal) -> bool {
        self.factors
            .keys()
            .chain(other.factors.keys())
            .all(|p| self.exponent(p) <= other.exponent(p))
    }

    pub fn is_integral(&self) -> bool {
        self.factors.values().all(|e| *e >= 0)
    }

    /// Fixed by complex conjugation, i.e. split exponents pairwise equal.
    pub fn is_ambiguous(&self) -> bool {
        self.factors.iter().all(|(p, e)| match p.tag {
            PrimeTag::SplitFirst | PrimeTag::SplitConj => self.exponent(&p.conj()) == *e,
            _ => true,
        })
    }

    /// Norm as a positive rational, multiplicative over the factors.
    pub fn norm(&self) -> BigRational {
        let mut n = BigRational::one();
        for (p, e) in &self.factors {
            let nb = BigRational::from_integer(p.residue_norm());
            let pw = pow_rational(&nb, *e);
            n *= pw;
        }
        n
    }

    /// The part of the ideal supported above the rational prime p.
    pub fn part_above(&self, p: u64) -> FactoredIdeal {
        FactoredIdeal {
            factors: self
                .factors
                .iter()
                .filter(|(q, _)| q.p == p)
                .map(|(q, e)| (*q, *e))
                .collect(),
        }
    }

    /// Rational primes occurring in the support.
    pub fn rational_support(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.keys().map(|q| q.p).collect();
        ps.dedup();
        ps
    }
}

fn pow_rational(q: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    let b = if e >= 0 { q.clone() } else { q.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= &b;
    }
    acc
}

// ---------------------------------------------------------------------------
// Z-bases
// ---------------------------------------------------------------------------

/// Hermite-reduced basis [a, b + c*w] of an integral O_E-lattice,
/// with 0 <= b < a and a, c > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntLattice {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl IntLattice {
    fn ring() -> Self {
        IntLattice {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::one(),
        }
    }

    /// HNF of the lattice spanned by integer coordinate rows (x, y).
    fn from_rows(rows: &[(BigInt, BigInt)]) -> Self {
        // combine rows to a single one carrying gcd of the y's
        let mut pivot: Option<(BigInt, BigInt)> = None;
        let mut xs: Vec<BigInt> = Vec::new();
        for (x, y) in rows {
            if y.is_zero() {
                xs.push(x.clone());
                continue;
            }
            pivot = Some(match pivot {
                None => (x.clone(), y.clone()),
                Some((px, py)) => {
                    let eg = py.extended_gcd(y);
                    let combined = (&eg.x * &px + &eg.y * x, eg.gcd.clone());
                    // leftover generator with zero y-part
                    let q1 = &py / &eg.gcd;
                    let q2 = y / &eg.gcd;
                    xs.push(&q2 * &px - &q1 * x);
                    combined
                }
            });
        }
        let (px, py) = pivot.expect("rank-2 lattice needs a generator with nonzero w-part");
        let mut a = BigInt::zero();
        for x in xs {
            a = a.gcd(&x);
        }
        assert!(!a.is_zero(), "lattice is not of full rank");
        let c = py.abs();
        let b = px.mod_floor(&a);
        IntLattice { a, b, c }
    }

    fn from_prime(field: &ImQuadField, q: &PrimeIdeal) -> Self {
        let p = BigInt::from(q.p);
        match q.tag {
            PrimeTag::Inert => IntLattice {
                a: p.clone(),
                b: BigInt::zero(),
                c: p,
            },
            PrimeTag::Ramified => {
                let root = field.omega_root_mod(q.p).expect("ramified prime has a root");
                IntLattice {
                    a: p.clone(),
                    b: BigInt::from(root).neg_mod(&p),
                    c: BigInt::one(),
                }
            }
            PrimeTag::SplitFirst | PrimeTag::SplitConj => {
                let r0 = field.omega_root_mod(q.p).expect("split prime has roots");
                let root = if q.tag == PrimeTag::SplitFirst {
                    r0
                } else {
                    (field.omega_trace().rem_euclid(q.p as i64) as u64 + q.p - r0) % q.p
                };
                IntLattice {
                    a: p.clone(),
                    b: BigInt::from(root).neg_mod(&p),
                    c: BigInt::one(),
                }
            }
        }
    }

    /// Product lattice, generated by the four pairwise generator products.
    fn mul(&self, other: &IntLattice, field: &ImQuadField) -> IntLattice {
        let g = [
            (self.a.clone(), BigInt::zero()),
            (self.b.clone(), self.c.clone()),
        ];
        let h = [
            (other.a.clone(), BigInt::zero()),
            (other.b.clone(), other.c.clone()),
        ];
        let mut rows = Vec::with_capacity(4);
        for gi in &g {
            for hj in &h {
                rows.push(mul_int_pair(field, gi, hj));
            }
        }
        IntLattice::from_rows(&rows)
    }

    fn pow(&self, e: u32, field: &ImQuadField) -> IntLattice {
        let mut acc = IntLattice::ring();
        for _ in 0..e {
            acc = acc.mul(self, field);
        }
        acc
    }

    pub fn contains(&self, x: &BigInt, y: &BigInt) -> bool {
        if !y.mod_floor(&self.c).is_zero() {
            return false;
        }
        let t = y / &self.c;
        (x - t * &self.b).mod_floor(&self.a).is_zero()
    }

}

trait NegMod {
    fn neg_mod(self, m: &BigInt) -> BigInt;
}

impl NegMod for BigInt {
    fn neg_mod(self, m: &BigInt) -> BigInt {
        (-self).mod_floor(m)
    }
}

fn mul_int_pair(
    field: &ImQuadField,
    (x1, y1): &(BigInt, BigInt),
    (x2, y2): &(BigInt, BigInt),
) -> (BigInt, BigInt) {
    let tr = BigInt::from(field.omega_trace());
    let nm = BigInt::from(field.omega_norm());
    let cross = y1 * y2;
    (x1 * x2 - &cross * nm, x1 * y2 + y1 * x2 + cross * tr)
}

/// A fractional ideal as a Z-module [a, b + c*w] with rational a, c > 0
/// and 0 <= b < a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZBasisIdeal {
    a: BigRational,
    b: BigRational,
    c: BigRational,
}

impl ZBasisIdeal {
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }

    /// First basis vector a*1.
    pub fn basis_first(&self) -> FieldElement {
        FieldElement::new(self.a.clone(), BigRational::zero())
    }

    /// Second basis vector b + c*w.
    pub fn basis_second(&self) -> FieldElement {
        FieldElement::new(self.b.clone(), self.c.clone())
    }

    /// Exact membership of an element in the Z-module.
    pub fn contains(&self, e: &FieldElement) -> bool {
        let t = &e.y / &self.c;
        if !t.is_integer() {
            return false;
        }
        ((&e.x - t * &self.b) / &self.a).is_integer()
    }
}

/// Canonical Z-basis of a fractional ideal.
pub fn to_zbasis(field: &ImQuadField, ideal: &FactoredIdeal) -> ZBasisIdeal {
    let (lat, scale) = to_scaled_lattice(field, ideal);
    ZBasisIdeal {
        a: &scale * BigRational::from_integer(lat.a),
        b: &scale * BigRational::from_integer(lat.b),
        c: scale * BigRational::from_integer(lat.c),
    }
}

/// Writes the ideal as q * L with L an integral lattice in HNF and q rational.
pub(crate) fn to_scaled_lattice(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
) -> (IntLattice, BigRational) {
    let mut num = FactoredIdeal::one();
    let mut den = FactoredIdeal::one();
    for (p, e) in ideal.iter() {
        if *e > 0 {
            num.set_exponent(*p, *e);
        } else {
            den.set_exponent(*p, -*e);
        }
    }
    let num_lat = integral_lattice(field, &num);
    if den.is_one() {
        return (num_lat, BigRational::one());
    }
    // I = num / den = num * conj(den) / N(den)
    let den_conj_lat = integral_lattice(field, &den.conj());
    let lat = num_lat.mul(&den_conj_lat, field);
    let n = den.norm();
    (lat, n.recip())
}

fn integral_lattice(field: &ImQuadField, ideal: &FactoredIdeal) -> IntLattice {
    debug_assert!(ideal.is_integral());
    let mut acc = IntLattice::ring();
    for (p, e) in ideal.iter() {
        let pl = IntLattice::from_prime(field, p);
        acc = acc.mul(&pl.pow(*e as u32, field), field);
    }
    acc
}

// ---------------------------------------------------------------------------
// Factorisation
// ---------------------------------------------------------------------------

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Factors a positive integer by trial division; large prime cofactors are
/// accepted, anything else is rejected rather than guessed.
fn factor_positive(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    debug_assert!(n.is_positive());
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= m && p <= TRIAL_DIVISION_LIMIT {
        let mut e = 0u32;
        let pb = BigInt::from(p);
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        let cof = m
            .to_u64()
            .filter(|c| crate::field::is_prime(*c))
            .ok_or_else(|| Error::Validation(format!("cannot factor cofactor {m}")))?;
        out.push((cof, 1));
    }
    Ok(out)
}

/// The principal ideal (q) O_E for a nonzero rational q.
pub fn factor_rational(field: &ImQuadField, q: &BigRational) -> Result<FactoredIdeal> {
    if q.is_zero() {
        return Err(Error::Validation("cannot factor the zero ideal".into()));
    }
    let mut out = FactoredIdeal::one();
    for (n, sign) in [(q.numer().abs(), 1i64), (q.denom().abs(), -1i64)] {
        for (p, e) in factor_positive(&n)? {
            let e = sign * e as i64;
            for prime in primes_above(field, p)? {
                let mult = if prime.tag == PrimeTag::Ramified { 2 } else { 1 };
                out.set_exponent(prime, out.exponent(&prime) + mult * e);
            }
        }
    }
    Ok(out)
}

/// The principal ideal (e) for a nonzero element, with norm |N(e)|.
pub fn factor_element(field: &ImQuadField, e: &FieldElement) -> Result<FactoredIdeal> {
    if e.is_zero() {
        return Err(Error::Validation("cannot factor the zero ideal".into()));
    }
    // clear denominators: e = f / den with f integral
    let den = e.x.denom().lcm(e.y.denom());
    let f = (
        (&e.x * &den).to_integer(),
        (&e.y * &den).to_integer(),
    );
    let mut out = factor_integral_element(field, &f)?;
    if !den.is_one() {
        let denominator = factor_rational(field, &BigRational::from_integer(den))?;
        out = out.mul(&denominator.inv());
    }
    debug_assert_eq!(out.norm(), field.norm(e).abs());
    Ok(out)
}

fn factor_integral_element(field: &ImQuadField, f: &(BigInt, BigInt)) -> Result<FactoredIdeal> {
    let tr = BigInt::from(field.omega_trace());
    let nm = BigInt::from(field.omega_norm());
    let norm = (&f.0 * &f.0 + &f.0 * &f.1 * tr + &f.1 * &f.1 * nm).abs();
    let mut out = FactoredIdeal::one();
    for (p, m) in factor_positive(&norm)? {
        match field.splitting_type(p)? {
            SplittingType::Inert => {
                if m % 2 != 0 {
                    return Err(Error::Internal(format!(
                        "odd valuation {m} of an element norm at inert prime {p}"
                    )));
                }
                out.set_exponent(
                    PrimeIdeal {
                        p,
                        tag: PrimeTag::Inert,
                    },
                    (m / 2) as i64,
                );
            }
            SplittingType::Ramified => {
                out.set_exponent(
                    PrimeIdeal {
                        p,
                        tag: PrimeTag::Ramified,
                    },
                    m as i64,
                );
            }
            SplittingType::Split => {
                let first = PrimeIdeal {
                    p,
                    tag: PrimeTag::SplitFirst,
                };
                let lat = IntLattice::from_prime(field, &first);
                let mut v1 = 0u32;
                let mut pw = IntLattice::ring();
                while v1 < m {
                    pw = pw.mul(&lat, field);
                    if !pw.contains(&f.0, &f.1) {
                        break;
                    }
                    v1 += 1;
                }
                out.set_exponent(first, v1 as i64);
                out.set_exponent(first.conj(), (m - v1) as i64);
            }
        }
    }
    Ok(out)
}

impl ImQuadField {
    /// The different ideal D_E = (sqrt(D)), of norm |D|.
    pub fn different(&self) -> FactoredIdeal {
        let d = factor_element(self, &self.sqrt_disc()).expect("sqrt(D) is nonzero");
        debug_assert_eq!(d.norm(), BigRational::from_integer(BigInt::from(-self.discriminant())));
        d
    }
}

// ---------------------------------------------------------------------------
// Residue arithmetic
// ---------------------------------------------------------------------------

/// phi_E(I) = |(O_E/I)^x| = prod N(p)^(e-1) (N(p) - 1) over the factors.
pub fn euler_phi(ideal: &FactoredIdeal) -> Result<BigInt> {
    if !ideal.is_integral() {
        return Err(Error::Validation("euler_phi needs an integral ideal".into()));
    }
    let mut phi = BigInt::one();
    for (p, e) in ideal.iter() {
        let n = p.residue_norm();
        phi *= (&n - BigInt::one()) * n.pow(*e as u32 - 1);
    }
    Ok(phi)
}

/// J = I intersect Z for an integral ambiguous ideal, as a positive integer.
pub fn rational_intersection(ideal: &FactoredIdeal) -> Result<BigInt> {
    if !ideal.is_integral() {
        return Err(Error::Validation(
            "rational intersection needs an integral ideal".into(),
        ));
    }
    if !ideal.is_ambiguous() {
        return Err(Error::Validation(
            "rational intersection needs an ambiguous ideal; lcm with the conjugate first".into(),
        ));
    }
    let mut j = BigInt::one();
    for (p, e) in ideal.iter() {
        let f = match p.tag {
            PrimeTag::SplitConj => 0, // counted at SplitFirst
            PrimeTag::SplitFirst | PrimeTag::Inert => *e as u32,
            PrimeTag::Ramified => (*e as u32).div_ceil(2),
        };
        j *= BigInt::from(p.p).pow(f);
    }
    Ok(j)
}

/// [O_E^x : O_E^I]: the unit group modulo units congruent to 1 mod I.
pub fn unit_residue_index(field: &ImQuadField, ideal: &FactoredIdeal) -> Result<u64> {
    if !ideal.is_integral() {
        return Err(Error::Validation("unit index needs an integral ideal".into()));
    }
    let zb = to_zbasis(field, ideal);
    let one = FieldElement::one();
    let fixed = field
        .roots_of_unity()
        .iter()
        .filter(|z| zb.contains(&field.sub(z, &one)))
        .count() as u64;
    let mu = field.mu_order() as u64;
    if !mu.is_multiple_of(fixed) {
        return Err(Error::Internal(
            "congruence units do not form a subgroup".into(),
        ));
    }
    Ok(mu / fixed)
}

/// O_E/I as an abelian group in invariant-factor form d_1 | d_2 | ...
///
/// Per prime: split p^a pbar^b contributes Z/p^a x Z/p^b, inert q^k
/// contributes (Z/q^k)^2 and ramified r^m contributes
/// Z/r^ceil(m/2) x Z/r^floor(m/2); the factors are then merged across
/// primes and trivial ones dropped.
pub fn abelian_invariants(ideal: &FactoredIdeal) -> Result<Vec<BigInt>> {
    if !ideal.is_integral() {
        return Err(Error::Validation("invariants need an integral ideal".into()));
    }
    // per rational prime, the (at most two) cyclic p-power exponents
    let mut cyclic: BTreeMap<u64, [u32; 2]> = BTreeMap::new();
    for (p, e) in ideal.iter() {
        let entry = cyclic.entry(p.p).or_insert([0, 0]);
        let e = *e as u32;
        match p.tag {
            PrimeTag::SplitFirst => entry[0] += e,
            PrimeTag::SplitConj => entry[1] += e,
            PrimeTag::Inert => {
                entry[0] += e;
                entry[1] += e;
            }
            PrimeTag::Ramified => {
                entry[0] += e.div_ceil(2);
                entry[1] += e / 2;
            }
        }
    }
    let mut d = [BigInt::one(), BigInt::one()];
    for (p, exps) in &cyclic {
        let hi = exps[0].max(exps[1]);
        let lo = exps[0].min(exps[1]);
        d[1] *= BigInt::from(*p).pow(hi);
        d[0] *= BigInt::from(*p).pow(lo);
    }
    Ok(d.into_iter().filter(|x| !x.is_one()).collect())
}

/// Ray class number h_I(E) = h * phi_E(I) / [O_E^x : O_E^I].
pub fn ray_class_number(field: &ImQuadField, ideal: &FactoredIdeal) -> Result<BigInt> {
    let phi = euler_phi(ideal)?;
    let u = BigInt::from(unit_residue_index(field, ideal)?);
    let num = BigInt::from(field.class_number()) * phi;
    let (q, r) = num.div_rem(&u);
    if !r.is_zero() {
        return Err(Error::Internal(
            "ray class number formula did not yield an integer".into(),
        ));
    }
    Ok(q)
}

/// Searches for a generator; None means the ideal is not principal.
///
/// The search enumerates the finitely many elements whose norm equals the
/// ideal norm (an ellipse of lattice points), so a None answer is exact.
pub fn is_principal(field: &ImQuadField, ideal: &FactoredIdeal) -> Option<FieldElement> {
    let mut num = FactoredIdeal::one();
    let mut den = FactoredIdeal::one();
    for (p, e) in ideal.iter() {
        if *e > 0 {
            num.set_exponent(*p, *e);
        } else {
            den.set_exponent(*p, -*e);
        }
    }
    // ideal = C / N(den) with C = num * conj(den) integral
    let c_ideal = num.mul(&den.conj());
    let lat = integral_lattice(field, &c_ideal);
    let target = c_ideal.norm().to_integer();
    let t = target
        .to_i128()
        .expect("principality search requires the ideal norm to fit in 128 bits");
    let disc = field.discriminant() as i128;
    let tr = field.omega_trace() as i128;

    let mut y = 0i128;
    loop {
        let s2 = 4 * t + disc * y * y;
        if s2 < 0 {
            break;
        }
        let s = integer_sqrt(s2);
        if s * s == s2 {
            for (sy, ss) in [(y, s), (y, -s), (-y, s), (-y, -s)] {
                let xx = -tr * sy + ss;
                if xx % 2 != 0 {
                    continue;
                }
                let x = xx / 2;
                if lat.contains(&BigInt::from(x), &BigInt::from(sy)) {
                    let g = FieldElement::new(
                        BigRational::from_integer(BigInt::from(x)),
                        BigRational::from_integer(BigInt::from(sy)),
                    );
                    debug_assert_eq!(field.norm(&g), BigRational::from_integer(target));
                    let n = den.norm();
                    return Some(field.scale_el(&n.recip(), &g));
                }
            }
        }
        y += 1;
    }
    None
}

fn integer_sqrt(n: i128) -> i128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128 + 2;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

// ---------------------------------------------------------------------------
// Brute-force residue enumeration
// ---------------------------------------------------------------------------

/// Residue system of O_E/I for an integral ideal, with machine integers.
pub(crate) struct ResidueRing {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    prime_lats: Vec<(i128, i128, i128)>,
    tr: i128,
    nm: i128,
}

impl ResidueRing {
    pub fn new(field: &ImQuadField, ideal: &FactoredIdeal, bound: u64) -> Result<ResidueRing> {
        debug_assert!(ideal.is_integral());
        let norm = ideal.norm().to_integer();
        if norm > BigInt::from(bound) {
            return Err(Error::BoundExceeded(format!(
                "residue enumeration over an ideal of norm {norm} exceeds the bound {bound}"
            )));
        }
        let lat = integral_lattice(field, ideal);
        let as_i128 = |v: &BigInt| v.to_i128().expect("bounded lattice fits in i128");
        let mut prime_lats = Vec::new();
        for p in ideal.iter().map(|(p, _)| p) {
            let pl = IntLattice::from_prime(field, p);
            prime_lats.push((as_i128(&pl.a), as_i128(&pl.b), as_i128(&pl.c)));
        }
        Ok(ResidueRing {
            a: as_i128(&lat.a),
            b: as_i128(&lat.b),
            c: as_i128(&lat.c),
            prime_lats,
            tr: field.omega_trace() as i128,
            nm: field.omega_norm() as i128,
        })
    }

    fn lat_contains(lat: &(i128, i128, i128), x: i128, y: i128) -> bool {
        y.rem_euclid(lat.2) == 0 && (x - (y / lat.2) * lat.1).rem_euclid(lat.0) == 0
    }

    pub fn contains(&self, x: i128, y: i128) -> bool {
        Self::lat_contains(&(self.a, self.b, self.c), x, y)
    }

    /// Coprime to the ideal, i.e. outside every prime above it.
    pub fn is_unit(&self, x: i128, y: i128) -> bool {
        self.prime_lats
            .iter()
            .all(|lat| !Self::lat_contains(lat, x, y))
    }

    pub fn conj(&self, x: i128, y: i128) -> (i128, i128) {
        (x + self.tr * y, -y)
    }

    pub fn mul(&self, (x1, y1): (i128, i128), (x2, y2): (i128, i128)) -> (i128, i128) {
        let cross = y1 * y2;
        (x1 * x2 - cross * self.nm, x1 * y2 + y1 * x2 + cross * self.tr)
    }

    /// All residue representatives x + y*w, 0 <= x < a, 0 <= y < c.
    pub fn residues(&self) -> impl Iterator<Item = (i128, i128)> + '_ {
        (0..self.c).flat_map(move |y| (0..self.a).map(move |x| (x, y)))
    }
}

/// Decides whether complex conjugation acts trivially on
/// coker(mu(E) -> (O_E/J)^x), by exhaustive residue enumeration.
pub fn residue_units_galois_trivial(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
    bound: u64,
) -> Result<bool> {
    if !ideal.is_integral() {
        return Err(Error::Validation("needs an integral ideal".into()));
    }
    if !ideal.is_ambiguous() {
        return Err(Error::Validation(
            "needs an ambiguous ideal; lcm with the conjugate first".into(),
        ));
    }
    let ring = ResidueRing::new(field, ideal, bound)?;
    let mu: Vec<(i128, i128)> = field
        .roots_of_unity()
        .iter()
        .map(|z| {
            (
                z.x.to_integer().to_i128().unwrap(),
                z.y.to_integer().to_i128().unwrap(),
            )
        })
        .collect();
    for (x, y) in ring.residues() {
        if !ring.is_unit(x, y) {
            continue;
        }
        let cu = ring.conj(x, y);
        let twisted_ok = mu.iter().any(|z| {
            let zu = ring.mul(*z, (x, y));
            ring.contains(cu.0 - zu.0, cu.1 - zu.1)
        });
        if !twisted_ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Counts units of O_E/I fixed by conjugation (used by the H^1 bound).
pub(crate) fn conj_fixed_unit_count(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
    bound: u64,
) -> Result<u64> {
    let ring = ResidueRing::new(field, ideal, bound)?;
    let mut count = 0u64;
    for (x, y) in ring.residues() {
        if !ring.is_unit(x, y) {
            continue;
        }
        let (cx, cy) = ring.conj(x, y);
        if ring.contains(cx - x, cy - y) {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn gauss() -> ImQuadField {
        ImQuadField::new(-1).unwrap()
    }

    fn eisenstein() -> ImQuadField {
        ImQuadField::new(-3).unwrap()
    }

    #[test]
    fn factor_rational_examples() {
        let f = gauss();
        let two = factor_rational(&f, &q(2)).unwrap();
        assert_eq!(two.num_primes(), 1);
        assert_eq!(
            two.exponent(&PrimeIdeal { p: 2, tag: PrimeTag::Ramified }),
            2
        );
        let five = factor_rational(&f, &q(5)).unwrap();
        assert_eq!(
            five.exponent(&PrimeIdeal { p: 5, tag: PrimeTag::SplitFirst }),
            1
        );
        assert_eq!(
            five.exponent(&PrimeIdeal { p: 5, tag: PrimeTag::SplitConj }),
            1
        );
        let e = eisenstein();
        let two = factor_rational(&e, &q(2)).unwrap();
        assert_eq!(two.exponent(&PrimeIdeal { p: 2, tag: PrimeTag::Inert }), 1);
    }

    #[test]
    fn factor_element_examples() {
        let f = gauss();
        let onei = factor_element(&f, &f.el(1, 1)).unwrap();
        assert_eq!(
            onei.exponent(&PrimeIdeal { p: 2, tag: PrimeTag::Ramified }),
            1
        );
        let three = factor_element(&f, &f.el(3, 0)).unwrap();
        assert_eq!(three.exponent(&PrimeIdeal { p: 3, tag: PrimeTag::Inert }), 1);

        let e = eisenstein();
        // sqrt(-3) = 2w - 1
        let s = factor_element(&e, &e.el(-1, 2)).unwrap();
        assert_eq!(s.exponent(&PrimeIdeal { p: 3, tag: PrimeTag::Ramified }), 1);
    }

    #[test]
    fn split_factor_labels_are_conjugate() {
        let f = gauss();
        // 2 + i has norm 5 and w = i = 2 mod (2 + i)... the canonical root of
        // x^2 + 1 mod 5 is 2, so (5, w - 2) is SplitFirst and contains 2 + i?
        let a = factor_element(&f, &f.el(2, 1)).unwrap();
        let b = factor_element(&f, &f.el(2, -1)).unwrap();
        assert_eq!(a.conj(), b);
        assert_eq!(a.mul(&b), factor_rational(&f, &q(5)).unwrap());
    }

    #[test]
    fn lattice_ops() {
        let f = gauss();
        let i1 = factor_rational(&f, &q(5)).unwrap();
        let first = FactoredIdeal::from_prime(PrimeIdeal { p: 5, tag: PrimeTag::SplitFirst }, 1);
        assert_eq!(first.lcm(&first.conj()), i1);
        assert!(FactoredIdeal::one().divides(&i1));
        assert_eq!(FactoredIdeal::one().gcd(&i1), FactoredIdeal::one());
        let r = FactoredIdeal::from_prime(PrimeIdeal { p: 2, tag: PrimeTag::Ramified }, 1);
        assert!(r.divides(&r.pow(3)));
        assert_eq!(i1.mul(&i1.inv()), FactoredIdeal::one());
    }

    #[test]
    fn zbasis_examples() {
        let f = gauss();
        let i = factor_element(&f, &f.el(1, 1)).unwrap();
        let zb = to_zbasis(&f, &i);
        assert_eq!(zb.a(), &q(2));
        assert_eq!(zb.b(), &q(1));
        assert_eq!(zb.c(), &q(1));

        let unit = to_zbasis(&f, &FactoredIdeal::one());
        assert_eq!((unit.a(), unit.b(), unit.c()), (&q(1), &q(0), &q(1)));

        let three = to_zbasis(&f, &factor_rational(&f, &q(3)).unwrap());
        assert_eq!((three.a(), three.b(), three.c()), (&q(3), &q(0), &q(3)));
    }

    #[test]
    fn membership_examples() {
        let f = gauss();
        let onei = to_zbasis(&f, &factor_element(&f, &f.el(1, 1)).unwrap());
        assert!(onei.contains(&f.el(-1, 1))); // i - 1 = i (1 + i)
        let two = to_zbasis(&f, &factor_rational(&f, &q(2)).unwrap());
        assert!(!two.contains(&f.el(-1, 1)));
        assert!(two.contains(&FieldElement::zero()));
    }

    #[test]
    fn euler_phi_examples() {
        let f = gauss();
        let three = factor_rational(&f, &q(3)).unwrap();
        assert_eq!(euler_phi(&three).unwrap(), BigInt::from(8));
        let e = eisenstein();
        let two = factor_rational(&e, &q(2)).unwrap();
        assert_eq!(euler_phi(&two).unwrap(), BigInt::from(3));
        assert_eq!(euler_phi(&FactoredIdeal::one()).unwrap(), BigInt::one());
        assert!(euler_phi(&three.inv()).is_err());
    }

    #[test]
    fn rational_intersection_examples() {
        let f = gauss();
        let r = PrimeIdeal { p: 2, tag: PrimeTag::Ramified };
        for k in 1..=6i64 {
            assert_eq!(
                rational_intersection(&FactoredIdeal::from_prime(r, k)).unwrap(),
                BigInt::from(2).pow((k as u32).div_ceil(2))
            );
        }
        let three = factor_rational(&f, &q(3)).unwrap();
        assert_eq!(rational_intersection(&three).unwrap(), BigInt::from(3));
        let s3 = FactoredIdeal::from_prime(PrimeIdeal { p: 3, tag: PrimeTag::Ramified }, 3);
        assert_eq!(rational_intersection(&s3).unwrap(), BigInt::from(9));
        // non-ambiguous input is rejected
        let half = FactoredIdeal::from_prime(PrimeIdeal { p: 5, tag: PrimeTag::SplitFirst }, 1);
        assert!(rational_intersection(&half).is_err());
    }

    #[test]
    fn unit_residue_index_examples() {
        let e = eisenstein();
        let s = PrimeIdeal { p: 3, tag: PrimeTag::Ramified };
        assert_eq!(
            unit_residue_index(&e, &FactoredIdeal::from_prime(s, 1)).unwrap(),
            2
        );
        let two = factor_rational(&e, &q(2)).unwrap();
        assert_eq!(unit_residue_index(&e, &two).unwrap(), 3);
        let two_s3 = two.mul(&FactoredIdeal::from_prime(s, 1));
        assert_eq!(unit_residue_index(&e, &two_s3).unwrap(), 6);

        let f = gauss();
        let r = PrimeIdeal { p: 2, tag: PrimeTag::Ramified };
        assert_eq!(
            unit_residue_index(&f, &FactoredIdeal::from_prime(r, 1)).unwrap(),
            1
        );
        assert_eq!(
            unit_residue_index(&f, &FactoredIdeal::from_prime(r, 2)).unwrap(),
            2
        );
        assert_eq!(
            unit_residue_index(&f, &FactoredIdeal::from_prime(r, 3)).unwrap(),
            4
        );
        assert_eq!(unit_residue_index(&f, &FactoredIdeal::one()).unwrap(), 1);
    }

    #[test]
    fn abelian_invariants_examples() {
        let s3 = FactoredIdeal::from_prime(PrimeIdeal { p: 3, tag: PrimeTag::Ramified }, 3);
        assert_eq!(
            abelian_invariants(&s3).unwrap(),
            vec![BigInt::from(3), BigInt::from(9)]
        );
        let r5 = FactoredIdeal::from_prime(PrimeIdeal { p: 2, tag: PrimeTag::Ramified }, 5);
        assert_eq!(
            abelian_invariants(&r5).unwrap(),
            vec![BigInt::from(4), BigInt::from(8)]
        );
        assert!(abelian_invariants(&FactoredIdeal::one())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn ray_class_examples() {
        let f = gauss();
        let three = factor_rational(&f, &q(3)).unwrap();
        assert_eq!(ray_class_number(&f, &three).unwrap(), BigInt::from(2));
        assert_eq!(
            ray_class_number(&f, &FactoredIdeal::one()).unwrap(),
            BigInt::from(f.class_number())
        );
        let eis = eisenstein();
        let two = factor_rational(&eis, &q(2)).unwrap();
        assert_eq!(ray_class_number(&eis, &two).unwrap(), BigInt::one());
    }

    #[test]
    fn principality() {
        let f5 = ImQuadField::new(-5).unwrap();
        let above2 = FactoredIdeal::from_prime(PrimeIdeal { p: 2, tag: PrimeTag::Ramified }, 1);
        assert!(is_principal(&f5, &above2).is_none());

        let f = gauss();
        let p5 = FactoredIdeal::from_prime(PrimeIdeal { p: 5, tag: PrimeTag::SplitFirst }, 1);
        let g = is_principal(&f, &p5).expect("norm-5 split prime in Z[i] is principal");
        assert_eq!(factor_element(&f, &g).unwrap(), p5);

        let one = is_principal(&f, &FactoredIdeal::one()).unwrap();
        assert!(one.is_integral() && f.norm(&one).is_one());
    }

    #[test]
    fn galois_action_on_residue_units() {
        let e = eisenstein();
        let s3 = FactoredIdeal::from_prime(PrimeIdeal { p: 3, tag: PrimeTag::Ramified }, 1);
        assert!(residue_units_galois_trivial(&e, &s3, 1 << 20).unwrap());
        assert!(residue_units_galois_trivial(&e, &FactoredIdeal::one(), 1 << 20).unwrap());

        // mu = {+-1} and 7 unramified: the action is not trivial mod (7)
        let f2 = ImQuadField::new(-2).unwrap();
        let seven = factor_rational(&f2, &q(7)).unwrap();
        assert!(!residue_units_galois_trivial(&f2, &seven, 1 << 20).unwrap());

        // bound is enforced, not silently ignored
        assert!(matches!(
            residue_units_galois_trivial(&f2, &seven, 10),
            Err(Error::BoundExceeded(_))
        ));
    }
}
