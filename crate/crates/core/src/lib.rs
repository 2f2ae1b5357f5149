//! Finite-section laboratory for operator-valued inner multipliers
//! `Theta(z) = sum_j phi_j(z) P_j` on Hardy spaces over the polydisc, and
//! executable checks of the invariant-subspace characterizations they induce.

pub mod error;
pub mod family;
pub mod inner;
pub mod linalg;
pub mod operators;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
