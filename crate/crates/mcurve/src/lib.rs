//! Multi-curve interest-rate library.
//!
//! Builds an OIS discounting curve and per-tenor forwarding curves from
//! linear-instrument quotes, prices FRA/IRS/basis swaps/swaptions/CMS swaps
//! and CMS spread options under single- and multi-curve conventions, and
//! calibrates a Gaussian mixture short-rate model usable in Monte Carlo.

pub mod bootstrap;
pub mod calibration;
pub mod cli;
pub mod cms;
pub mod curves;
pub mod error;
pub mod instruments;
pub mod interpolation;
pub mod marketdata;
pub mod math;
pub mod mmg;
pub mod report;
pub mod timegrid;
pub mod volmodels;

pub use error::{Error, Result};
