//! Interactive certificates for the minimal polynomial, determinant and
//! characteristic polynomial of sparse matrices over prime fields.
//!
//! The library is organised bottom-up: [`field`] arithmetic, dense
//! [`poly`]nomials, [`blackbox`] operators, the Wiedemann machinery in
//! [`krylov`], and the Prover/Verifier sessions in [`protocol`]. Every party
//! can be given a [`CostMeter`] that counts field operations, black-box
//! applications, random draws and communicated elements.

pub mod blackbox;
pub mod error;
pub mod field;
pub mod krylov;
pub mod meter;
pub mod poly;
pub mod protocol;

pub use error::{Error, Result};
pub use field::{Fe, Field, FieldParams};
pub use meter::{CostMeter, CostReport};
pub use poly::Poly;
