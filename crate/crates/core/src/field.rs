//! Exact arithmetic in an imaginary quadratic field E = Q(sqrt(d)), d < 0 squarefree.
//!
//! Elements are written over the standard integral basis {1, w} where
//! w = (1 + sqrt(d))/2 if d = 1 mod 4 and w = sqrt(d) otherwise, so that
//! O_E = Z\[w\]. The fundamental discriminant is D = d in the first case and
//! D = 4d in the second. All arithmetic is over arbitrary-precision
//! rationals; no floating point is used anywhere.
//!
//! The class number is computed by counting reduced primitive binary
//! quadratic forms of discriminant D, which is exact and fast at the scale
//! this crate targets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Behaviour of a rational prime in E.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

impl std::fmt::Display for SplittingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplittingType::Split => write!(f, "Split"),
            SplittingType::Inert => write!(f, "Inert"),
            SplittingType::Ramified => write!(f, "Ramified"),
        }
    }
}

/// An element x + y*w of E with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub x: BigRational,
    pub y: BigRational,
}

impl FieldElement {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        FieldElement { x, y }
    }

    /// Element with integer coordinates x + y*w.
    pub fn from_ints(x: i64, y: i64) -> Self {
        FieldElement {
            x: BigRational::from_integer(BigInt::from(x)),
            y: BigRational::from_integer(BigInt::from(y)),
        }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// True when the element lies in Q (y = 0).
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// True when both coordinates are integers, i.e. the element is in O_E.
    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        if self.x.is_zero() {
            return write!(f, "{}*w", self.y);
        }
        if self.y.is_negative() {
            write!(f, "{}-{}*w", self.x, -&self.y)
        } else {
            write!(f, "{}+{}*w", self.x, self.y)
        }
    }
}

/// An imaginary quadratic field with its precomputed invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImQuadField {
    d: i64,
    disc: i64,
    ramified: Vec<u64>,
    mu_order: u32,
    class_number: u64,
}

impl ImQuadField {
    /// Builds the field Q(sqrt(d)) for squarefree d < 0.
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::InvalidField(format!("d = {d} must be negative")));
        }
        if !is_squarefree(-d) {
            return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let mut ramified: Vec<u64> = prime_factors((-disc) as u64);
        ramified.sort_unstable();
        let mu_order = match disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let class_number = reduced_form_class_number(disc);
        Ok(ImQuadField {
            d,
            disc,
            ramified,
            mu_order,
            class_number,
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Fundamental discriminant D.
    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    /// Rational primes dividing the discriminant, sorted.
    pub fn ramified_primes(&self) -> &[u64] {
        &self.ramified
    }

    /// Order of the group of roots of unity in E.
    pub fn mu_order(&self) -> u32 {
        self.mu_order
    }

    /// Class number h, counted via reduced primitive forms.
    pub fn class_number(&self) -> u64 {
        self.class_number
    }

    /// Trace of w: 1 when w = (1 + sqrt(d))/2, else 0.
    pub fn omega_trace(&self) -> i64 {
        if self.d.rem_euclid(4) == 1 {
            1
        } else {
            0
        }
    }

    /// Norm of w: (1 - d)/4 when w = (1 + sqrt(d))/2, else -d.
    pub fn omega_norm(&self) -> i64 {
        if self.d.rem_euclid(4) == 1 {
            (1 - self.d) / 4
        } else {
            -self.d
        }
    }

    /// sqrt(D) as an element of O_E: 2w - Tr(w).
    ///
    /// For d = 1 mod 4 this is 2w - 1 = sqrt(d) = sqrt(D); otherwise it is
    /// 2w = 2 sqrt(d) = sqrt(4d) = sqrt(D). It generates the different ideal.
    pub fn sqrt_disc(&self) -> FieldElement {
        FieldElement::from_ints(-self.omega_trace(), 2)
    }

    pub fn el(&self, x: i64, y: i64) -> FieldElement {
        FieldElement::from_ints(x, y)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(&a.x + &b.x, &a.y + &b.y)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(&a.x - &b.x, &a.y - &b.y)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement::new(-&a.x, -&a.y)
    }

    /// Product, using w^2 = Tr(w) w - N(w).
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let tr = BigRational::from_integer(BigInt::from(self.omega_trace()));
        let nm = BigRational::from_integer(BigInt::from(self.omega_norm()));
        let cross = &a.y * &b.y;
        FieldElement::new(
            &a.x * &b.x - &cross * nm,
            &a.x * &b.y + &a.y * &b.x + cross * tr,
        )
    }

    /// Complex conjugate: x + y Tr(w) - y w.
    pub fn conj(&self, a: &FieldElement) -> FieldElement {
        let tr = BigRational::from_integer(BigInt::from(self.omega_trace()));
        FieldElement::new(&a.x + &a.y * tr, -&a.y)
    }

    /// Norm form x^2 + Tr(w) xy + N(w) y^2; positive except at zero.
    pub fn norm(&self, a: &FieldElement) -> BigRational {
        let tr = BigRational::from_integer(BigInt::from(self.omega_trace()));
        let nm = BigRational::from_integer(BigInt::from(self.omega_norm()));
        &a.x * &a.x + &a.x * &a.y * tr + &a.y * &a.y * nm
    }

    pub fn trace(&self, a: &FieldElement) -> BigRational {
        let tr = BigRational::from_integer(BigInt::from(self.omega_trace()));
        &a.x + &a.x + &a.y * tr
    }

    /// Multiplicative inverse, conj(a)/N(a).
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::Validation("inversion of zero".into()));
        }
        let n = self.norm(a);
        let c = self.conj(a);
        Ok(FieldElement::new(c.x / &n, c.y / &n))
    }

    /// Quotient a/b.
    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        let bi = self.inv(b)?;
        Ok(self.mul(a, &bi))
    }

    /// Scales an element by a rational.
    pub fn scale_el(&self, q: &BigRational, a: &FieldElement) -> FieldElement {
        FieldElement::new(q * &a.x, q * &a.y)
    }

    /// Behaviour of the rational prime p in E, by the Kronecker symbol (D/p).
    pub fn splitting_type(&self, p: u64) -> Result<SplittingType> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if self.ramified.contains(&p) {
            return Ok(SplittingType::Ramified);
        }
        if p == 2 {
            // D odd here; (D/2) = 1 iff D = 1 mod 8.
            return Ok(if self.disc.rem_euclid(8) == 1 {
                SplittingType::Split
            } else {
                SplittingType::Inert
            });
        }
        let r = (self.disc.rem_euclid(p as i64)) as u64;
        Ok(match legendre(r, p) {
            1 => SplittingType::Split,
            -1 => SplittingType::Inert,
            _ => unreachable!("unramified prime with (D/p) = 0"),
        })
    }

    /// All torsion units, closed under multiplication and conjugation.
    pub fn roots_of_unity(&self) -> Vec<FieldElement> {
        match self.disc {
            // powers of i = w
            -4 => vec![
                self.el(1, 0),
                self.el(0, 1),
                self.el(-1, 0),
                self.el(0, -1),
            ],
            // powers of the primitive sixth root w = (1 + sqrt(-3))/2
            -3 => vec![
                self.el(1, 0),
                self.el(0, 1),
                self.el(-1, 1),
                self.el(-1, 0),
                self.el(0, -1),
                self.el(1, -1),
            ],
            _ => vec![self.el(1, 0), self.el(-1, 0)],
        }
    }

    /// Smallest nonnegative root of the minimal polynomial of w modulo p.
    ///
    /// Defined for split and ramified p; this root pins the canonical
    /// labelling of the two primes above a split p.
    pub fn omega_root_mod(&self, p: u64) -> Result<u64> {
        let tr = self.omega_trace().rem_euclid(p as i64) as u64;
        let nm = self.omega_norm().rem_euclid(p as i64) as u64;
        if p == 2 {
            for b in 0..2u64 {
                if (b * b + tr * b + nm).is_multiple_of(2) {
                    return Ok(b);
                }
            }
            return Err(Error::Validation("2 is inert; no root of the minimal polynomial".into()));
        }
        // w = sqrt(d): roots are +-s with s^2 = d mod p;
        // w = (1 + sqrt(d))/2: roots are (1 +- s)/2 mod p
        let dmod = self.d.rem_euclid(p as i64) as u64;
        let s = sqrt_mod(dmod, p).ok_or_else(|| {
            Error::Validation(format!("{p} is inert; no root of the minimal polynomial"))
        })?;
        let (r1, r2) = if tr == 0 {
            (s, (p - s) % p)
        } else {
            let inv2 = mod_pow(2, p - 2, p);
            (mulmod(1 + s, inv2, p), mulmod((1 + p - s) % p, inv2, p))
        };
        Ok(r1.min(r2))
    }
}

/// Number of reduced primitive forms (a, b, c) with b^2 - 4ac = disc,
/// |b| <= a <= c, and b >= 0 whenever |b| = a or a = c.
pub fn reduced_form_class_number(disc: i64) -> u64 {
    assert!(disc < 0 && (disc.rem_euclid(4) == 0 || disc.rem_euclid(4) == 1));
    let mut count = 0u64;
    let mut b = disc.rem_euclid(2);
    while 3 * b * b <= -disc {
        // 4ac = b^2 - disc
        let t = (b * b - disc) / 4;
        let mut a = b.max(1);
        while a * a <= t {
            if t % a == 0 {
                let c = t / a;
                if gcd3(a, b, c) == 1 {
                    // (a, -b, c) is a distinct reduced form unless b = 0,
                    // b = a, or a = c
                    count += if b == 0 || b == a || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    count
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn gcd3(a: i64, b: i64, c: i64) -> u64 {
    gcd(gcd(a.unsigned_abs(), b.unsigned_abs()), c.unsigned_abs())
}

fn is_squarefree(n: i64) -> bool {
    debug_assert!(n > 0);
    let mut m = n;
    let mut p = 2i64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol (a/p) for odd prime p, via Euler's criterion.
fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let e = mod_pow(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Square root mod an odd prime (Tonelli-Shanks); None for non-residues.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};

    #[test]
    fn make_field_examples() {
        let gauss = ImQuadField::new(-1).unwrap();
        assert_eq!(gauss.discriminant(), -4);
        assert_eq!(gauss.mu_order(), 4);
        assert_eq!(gauss.class_number(), 1);
        assert_eq!(gauss.ramified_primes(), &[2]);

        let eis = ImQuadField::new(-3).unwrap();
        assert_eq!(eis.discriminant(), -3);
        assert_eq!(eis.mu_order(), 6);
        assert_eq!(eis.class_number(), 1);
        assert_eq!(eis.ramified_primes(), &[3]);

        let f5 = ImQuadField::new(-5).unwrap();
        assert_eq!(f5.discriminant(), -20);
        assert_eq!(f5.mu_order(), 2);
        assert_eq!(f5.class_number(), 2);
        assert_eq!(f5.ramified_primes(), &[2, 5]);
    }

    #[test]
    fn make_field_rejects_bad_d() {
        assert!(ImQuadField::new(4).is_err());
        assert!(ImQuadField::new(0).is_err());
        assert!(ImQuadField::new(-4).is_err());
        assert!(ImQuadField::new(-12).is_err());
    }

    #[test]
    fn class_numbers_small() {
        // (1,0,1) is the only reduced form of discriminant -4,
        // (1,1,1) the only one of discriminant -3,
        // (1,0,5) and (2,2,3) for discriminant -20.
        assert_eq!(reduced_form_class_number(-4), 1);
        assert_eq!(reduced_form_class_number(-3), 1);
        assert_eq!(reduced_form_class_number(-20), 2);
        assert_eq!(reduced_form_class_number(-23), 3);
        assert_eq!(reduced_form_class_number(-163), 1);
    }

    #[test]
    fn arithmetic_in_gaussian_field() {
        let f = ImQuadField::new(-1).unwrap();
        let e = f.el(1, 1); // 1 + i
        assert_eq!(f.norm(&e).to_integer().to_i64(), Some(2));
        assert_eq!(f.trace(&e).to_integer().to_i64(), Some(2));
        let r = f.el(7, 0);
        assert_eq!(f.conj(&r), r);
    }

    #[test]
    fn omega_in_eisenstein_field() {
        let f = ImQuadField::new(-3).unwrap();
        let w = f.el(0, 1);
        assert!(f.norm(&w).is_one());
        assert!(f.trace(&w).is_one());
        assert_eq!(f.conj(&f.conj(&w)), w);
        // w satisfies x^2 - x + 1
        let sq = f.mul(&w, &w);
        assert_eq!(sq, f.sub(&w, &FieldElement::one()));
    }

    #[test]
    fn inverse_and_zero() {
        let f = ImQuadField::new(-7).unwrap();
        let e = f.el(3, -2);
        let i = f.inv(&e).unwrap();
        assert_eq!(f.mul(&e, &i), FieldElement::one());
        assert!(f.inv(&FieldElement::zero()).is_err());
    }

    #[test]
    fn splitting_examples() {
        let gauss = ImQuadField::new(-1).unwrap();
        assert_eq!(gauss.splitting_type(5).unwrap(), SplittingType::Split);
        assert_eq!(gauss.splitting_type(2).unwrap(), SplittingType::Ramified);
        assert_eq!(gauss.splitting_type(3).unwrap(), SplittingType::Inert);
        let eis = ImQuadField::new(-3).unwrap();
        assert_eq!(eis.splitting_type(2).unwrap(), SplittingType::Inert);
        assert_eq!(eis.splitting_type(7).unwrap(), SplittingType::Split);
        assert!(eis.splitting_type(6).is_err());
    }

    #[test]
    fn splitting_partitions_primes() {
        for d in [-1, -2, -3, -5, -7, -11, -15, -23] {
            let f = ImQuadField::new(d).unwrap();
            for p in 2u64..=100 {
                if !is_prime(p) {
                    continue;
                }
                let t = f.splitting_type(p).unwrap();
                let ram = f.ramified_primes().contains(&p);
                assert_eq!(ram, t == SplittingType::Ramified, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn roots_of_unity_group() {
        for d in [-1, -3, -5] {
            let f = ImQuadField::new(d).unwrap();
            let mu = f.roots_of_unity();
            assert_eq!(mu.len() as u32, f.mu_order());
            // closed under multiplication and conjugation, all of norm 1
            for a in &mu {
                assert!(f.norm(a).is_one());
                assert!(mu.contains(&f.conj(a)));
                for b in &mu {
                    assert!(mu.contains(&f.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn omega_root_canonical() {
        let gauss = ImQuadField::new(-1).unwrap();
        // x^2 + 1 mod 5 has roots 2 and 3
        assert_eq!(gauss.omega_root_mod(5).unwrap(), 2);
        let eis = ImQuadField::new(-3).unwrap();
        // x^2 - x + 1 mod 7 has roots 3 and 5
        assert_eq!(eis.omega_root_mod(7).unwrap(), 3);
    }
}
