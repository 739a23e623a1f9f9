//! Exact q-character combinatorics for quantum affine algebras, with a
//! matrix engine for `U_q(sl2^)`.

pub mod cartan;
pub mod error;
pub mod poly;
pub mod qchar;
pub mod sl2engine;
pub mod sl2theory;
pub mod ylattice;

pub use cartan::{build_cartan, AffineLabel, AffineType, CartanData, Weight};
pub use error::{Error, Result};
pub use qchar::QCharacter;
pub use ylattice::{APosition, Monomial, SpectralPoint, YVar};
