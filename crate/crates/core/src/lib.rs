//! Exact-arithmetic engine for imaginary quadratic CM fields: prime
//! splitting, factored fractional ideals, ray-class and K3-class orders,
//! Brauer-group supersets, and the ideal-lattice calculus with level
//! structures.

pub mod brauer;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod ideal;
pub mod k3;
pub mod lattice;
pub mod literal;

pub use brauer::{BrauerCatalog, CatalogEntry, HilbertEntry, OddDiscCase};
pub use enumerate::{EnumerateOptions, EnumerationReport};
pub use error::{Error, Result};
pub use field::{FieldElement, ImQuadField, SplittingType};
pub use ideal::{FactoredIdeal, PrimeIdeal, PrimeTag, ZBasisIdeal};
pub use k3::{H1Bound, K3OrderEstimate};
pub use lattice::{GramMatrix, IdealLatticeLS};
