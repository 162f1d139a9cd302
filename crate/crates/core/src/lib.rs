//! Exact number-field arithmetic, elliptic curves over number fields, and
//! the local machinery for Fermat-type nonexistence arguments.

pub mod arith;
pub mod audit;
pub mod curve;
pub mod error;
pub mod fpx;
pub mod frey;
pub mod kraus;
pub mod localred;
pub mod nf;
pub mod quadform;
pub mod scout;

pub use error::{Error, Result};
