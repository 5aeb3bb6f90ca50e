//! Solvers and simulation engine for a transparent training-data market.
//!
//! Buyers choose dataset bundles under a budget, sellers post prices that
//! maximize anticipated profit, and the [`dynamics`] module plays the
//! repeated game in which underpaid sellers leave the market.

pub mod analysis;
pub mod buyer;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod market;
pub mod outcome;
pub mod royalty;
pub mod seller;
pub mod trace;
pub mod valuation;

pub use error::{Error, Result};
pub use market::{Money, PurchaseDecision, UtilityFunction};
