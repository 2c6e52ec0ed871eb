//! Numerical verification toolkit for semi-stable radial solutions of
//! `-Δu = g(u)` in the unit ball.

pub mod error;
pub mod exec;
pub mod ode;
pub mod radial;
pub mod stability;
pub mod branch;
pub mod closed_form;
pub mod estimates;
pub mod family;
pub mod report;

pub use error::{Error, Result};
pub use exec::Execution;
