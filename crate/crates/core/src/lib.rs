//! Exact computations for rotation-invariant, projectively induced
//! Kähler-Einstein metrics on toric manifolds.
//!
//! A Delzant polytope determines a kernel polynomial `K` whose support is the
//! polytope's lattice points; the Einstein condition becomes the polynomial
//! identity `det B(K) = K^sigma`, and the crate either finds positive
//! coefficients satisfying it or produces a replayable refutation.

pub mod catalog;
pub mod certifier;
pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod ma;
pub mod moment;
pub mod poly;
pub mod polytope;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
