//! Trotter error norms, constant-explicit gate counts and exact dense checks
//! of the concentration inequalities behind them.

pub mod bounds;
pub mod dense;
pub mod error;
pub mod fermion;
pub mod lab;
pub mod models;
pub mod norms;
pub mod pauli;
pub mod suzuki;

pub use error::{Error, Result};
