//! Exact algebra for deciding when a rational function shares values with its
//! derivative or with a scaled Euler derivative.

pub mod error;
pub mod families;
pub mod invariants;
pub mod field;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod ratfun;
pub mod rational;
pub mod search;
pub mod sharing;
pub mod theorems;

pub use error::{Error, Result};
pub use field::FieldElem;
pub use poly::Poly;
pub use ratfun::RationalFunction;
pub use rational::Rational;
