//! Time-series toolkit for money-multiplier analysis: multiplier algebra,
//! unit-root tests, VAR/VECM estimation, Johansen cointegration tests and
//! impulse-response dynamics.

pub mod cointegration;
pub mod dynamics;
pub mod error;
pub mod fixture;
pub mod linalg;
pub mod multiplier;
pub mod pipeline;
pub mod regression;
pub mod report;
pub mod series;
pub mod unit_root;
pub mod var;
pub mod vecm;

pub use error::{Error, Result};
