//! Exact q-series, high-precision evaluation, and relation mining for
//! theta-function quotients and singular moduli.

pub mod bigreal;
pub mod catalog;
pub mod config;
pub mod error;
pub mod miner;
pub mod modular;
pub mod numeric;
pub mod recognize;
pub mod series;

pub use bigreal::BigReal;
pub use error::{Error, Result};
pub use series::{PuiseuxSeries, Rat, ThetaSpec};
