//! Optimal single-period hedging for a load-serving entity that sells at a
//! fixed retail tariff and buys at a random wholesale spot price.
//!
//! Three instruments are modelled: a forward contract, a call option and a
//! demand-response reward. [`hedging`] holds the closed-form optima,
//! [`oracle`] evaluates the raw profit expectations numerically as an
//! independent check, [`boundaries`] locates parameters of equal expected
//! profit between instruments, and [`ingestion`] fits demand and price laws
//! from smart-meter and LMP data.

pub mod boundaries;
pub mod distributions;
pub mod error;
pub mod hedging;
pub mod ingestion;
pub mod oracle;
pub mod quadrature;
pub mod solve;

pub use error::{Error, Result};
