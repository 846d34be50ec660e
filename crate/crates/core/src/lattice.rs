//! Ideal lattices (I, alpha) with the trace form Tr(alpha x conj(y)),
//! their duals and level structures.
//!
//! In the imaginary quadratic case the multiplier alpha is a rational
//! (alpha = conj(alpha) forces it), the dual of I is
//! (alpha)^-1 D_E^-1 conj(I)^-1, and a level structure is stored as the
//! fractional ideal J containing the dual. The level ideal I_B = I* J^-1
//! is the integral ideal whose residue ring realises the chosen subgroup.
//!
//! Every dual computed by the ideal formula is cross-checked against the
//! Gram-matrix route in debug builds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, ImQuadField};
use crate::ideal::{factor_element, to_zbasis, FactoredIdeal};

/// Symmetric 2x2 Gram matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    pub entries: [[BigRational; 2]; 2],
}

impl GramMatrix {
    pub fn det(&self) -> BigRational {
        &self.entries[0][0] * &self.entries[1][1] - &self.entries[0][1] * &self.entries[1][0]
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_integer())
    }
}

/// Gram matrix of the form Tr(alpha b_i conj(b_j)) on the canonical
/// Z-basis of I.
pub fn gram(field: &ImQuadField, ideal: &FactoredIdeal, alpha: &BigRational) -> Result<GramMatrix> {
    if alpha.is_zero() {
        return Err(Error::Validation("alpha must be nonzero".into()));
    }
    let zb = to_zbasis(field, ideal);
    let basis = [zb.basis_first(), zb.basis_second()];
    let mut entries = [
        [BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero()],
    ];
    for i in 0..2 {
        for j in 0..2 {
            let prod = field.mul(&basis[i], &field.conj(&basis[j]));
            entries[i][j] = alpha * field.trace(&prod);
        }
    }
    let g = GramMatrix { entries };
    debug_assert_eq!(
        g.det().abs(),
        alpha * alpha
            * BigRational::from_integer(BigInt::from(-field.discriminant()))
            * ideal.norm()
            * ideal.norm()
    );
    Ok(g)
}

/// Integrality of the lattice: (alpha) I conj(I) contained in D_E^-1,
/// tested in factored form and cross-checked against the Gram matrix.
pub fn is_integral_lattice(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
    alpha: &BigRational,
) -> Result<bool> {
    if alpha.is_zero() {
        return Err(Error::Validation("alpha must be nonzero".into()));
    }
    let product = crate::ideal::factor_rational(field, alpha)?
        .mul(ideal)
        .mul(&ideal.conj());
    let inv_different = field.different().inv();
    let by_ideals = inv_different.divides(&product);
    let by_gram = gram(field, ideal, alpha)?.is_integral();
    if by_ideals != by_gram {
        return Err(Error::Internal(
            "integrality routes disagree between ideals and Gram matrix".into(),
        ));
    }
    Ok(by_ideals)
}

/// Dual ideal I* = (alpha)^-1 D_E^-1 conj(I)^-1.
pub fn dual_lattice(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
    alpha: &BigRational,
) -> Result<FactoredIdeal> {
    if alpha.is_zero() {
        return Err(Error::Validation("alpha must be nonzero".into()));
    }
    let dual = crate::ideal::factor_rational(field, alpha)?
        .inv()
        .mul(&field.different().inv())
        .mul(&ideal.conj().inv());
    debug_assert_eq!(dual, dual_via_gram(field, ideal, alpha)?);
    Ok(dual)
}

/// Independent route to the dual: invert the Gram matrix and read off the
/// ideal generated by the dual basis vectors.
pub fn dual_via_gram(
    field: &ImQuadField,
    ideal: &FactoredIdeal,
    alpha: &BigRational,
) -> Result<FactoredIdeal> {
    let g = gram(field, ideal, alpha)?;
    let det = g.det();
    if det.is_zero() {
        return Err(Error::Internal("degenerate trace form".into()));
    }
    let zb = to_zbasis(field, ideal);
    let basis = [zb.basis_first(), zb.basis_second()];
    // columns of G^-1 give the dual basis in terms of the primal one
    let ginv = [
        [&g.entries[1][1] / &det, -&g.entries[0][1] / &det],
        [-&g.entries[1][0] / &det, &g.entries[0][0] / &det],
    ];
    let duals: Vec<FieldElement> = (0..2)
        .map(|col| {
            field.add(
                &field.scale_el(&ginv[0][col], &basis[0]),
                &field.scale_el(&ginv[1][col], &basis[1]),
            )
        })
        .collect();
    // the dual lattice is an O_E-module, so it is the ideal gcd of the
    // principal ideals of its two generators
    let d0 = factor_element(field, &duals[0])?;
    let d1 = factor_element(field, &duals[1])?;
    Ok(d0.gcd(&d1))
}

/// An ideal lattice with level structure (I, alpha, J).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLatticeLS {
    pub ideal: FactoredIdeal,
    pub alpha: BigRational,
    /// The level structure, as the fractional ideal J with I* contained in J.
    pub level: FactoredIdeal,
}

impl IdealLatticeLS {
    /// Validates that the level contains the dual, i.e. that the level
    /// ideal I_B = I* J^-1 is integral.
    pub fn new(
        field: &ImQuadField,
        ideal: FactoredIdeal,
        alpha: BigRational,
        level: FactoredIdeal,
    ) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::Validation("alpha must be nonzero".into()));
        }
        let ls = IdealLatticeLS {
            ideal,
            alpha,
            level,
        };
        if !ls.level_ideal(field)?.is_integral() {
            return Err(Error::Validation(
                "level must contain the dual lattice (I* J^-1 must be integral)".into(),
            ));
        }
        Ok(ls)
    }

    pub fn dual(&self, field: &ImQuadField) -> Result<FactoredIdeal> {
        dual_lattice(field, &self.ideal, &self.alpha)
    }

    /// I_B = I* J^-1.
    pub fn level_ideal(&self, field: &ImQuadField) -> Result<FactoredIdeal> {
        Ok(self.dual(field)?.mul(&self.level.inv()))
    }
}

/// Element scaling e . (I, alpha, J) = (eI, alpha/N(e), eJ).
///
/// The dual scales along (checked in debug builds) and the level ideal is
/// unchanged.
pub fn scale(field: &ImQuadField, e: &FieldElement, ls: &IdealLatticeLS) -> Result<IdealLatticeLS> {
    if e.is_zero() {
        return Err(Error::Validation("cannot scale by zero".into()));
    }
    let principal = factor_element(field, e)?;
    let norm = field.norm(e);
    let scaled = IdealLatticeLS {
        ideal: ls.ideal.mul(&principal),
        alpha: &ls.alpha / norm,
        level: ls.level.mul(&principal),
    };
    #[cfg(debug_assertions)]
    {
        let dual_then_scale = ls.dual(field)?.mul(&principal);
        assert_eq!(dual_then_scale, scaled.dual(field)?);
        assert_eq!(ls.level_ideal(field)?, scaled.level_ideal(field)?);
    }
    Ok(scaled)
}

/// Searches for e with I2 = e I1, alpha1 = N(e) alpha2 and e J1 = J2.
///
/// Candidates are mu(E)-translates of a generator of I2 I1^-1; None means
/// the lattices are inequivalent.
pub fn equivalent(
    field: &ImQuadField,
    a: &IdealLatticeLS,
    b: &IdealLatticeLS,
) -> Option<FieldElement> {
    let t = &a.alpha / &b.alpha;
    if !t.is_positive() {
        return None;
    }
    let quotient = b.ideal.mul(&a.ideal.inv());
    let g = crate::ideal::is_principal(field, &quotient)?;
    if field.norm(&g) != t {
        return None;
    }
    for zeta in field.roots_of_unity() {
        let e = field.mul(&zeta, &g);
        let principal = factor_element(field, &e).expect("nonzero by construction");
        if a.level.mul(&principal) == b.level {
            return Some(e);
        }
    }
    None
}

/// Builds the lattice with the prescribed level ideal: J = I* target^-1.
pub fn level_from_brauer_order(
    field: &ImQuadField,
    ideal: FactoredIdeal,
    alpha: BigRational,
    target: &FactoredIdeal,
) -> Result<IdealLatticeLS> {
    if !target.is_integral() {
        return Err(Error::Validation("the level ideal must be integral".into()));
    }
    let dual = dual_lattice(field, &ideal, &alpha)?;
    let level = dual.mul(&target.inv());
    let ls = IdealLatticeLS::new(field, ideal, alpha, level)?;
    debug_assert_eq!(&ls.level_ideal(field)?, target);
    Ok(ls)
}
