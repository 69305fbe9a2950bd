//! Stochastic-geometry model of uplink success probability in multi-gateway
//! LoRa networks with imperfect SF orthogonality, plus a Monte Carlo
//! simulator of the same system.

pub mod analytic;
pub mod cli;
pub mod compare;
pub mod config;
pub mod error;
pub mod figures;
pub mod geometry;
pub mod hypergeometric;
pub mod overlap;
pub mod quadrature;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
