//! Exact computational tools for Golod rings and modules over graded
//! connected algebras: polynomials and Gröbner bases, finite graded algebras
//! and modules, minimal resolutions, Koszul homology, Massey products and
//! the Golod verdict engine.

pub mod algebra;
pub mod error;
pub mod field;
pub mod golod;
pub mod groebner;
pub mod koszul;
pub mod linalg;
pub mod poly;
pub mod resolution;
pub mod theorems;

pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use groebner::{GroebnerBasis, MonomialOrder};
pub use poly::{parse_poly, Degree, HomogeneousIdeal, Monomial, Poly, PolyRing};
