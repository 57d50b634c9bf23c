//! Revenue management for a stochastic knapsack: a fixed stock of units sold
//! over a finite horizon to Poisson streams of orders at several price levels,
//! where each order asks for a random batch that is either filled in full or
//! turned away.
//!
//! The crate provides the exact dynamic program, the switch-over heuristic for
//! unit and batch demand, analytic revenue bounds, demand-driven pricing of
//! the switch-over ladder, and a Monte Carlo simulator for checking them.

pub mod batch;
pub mod bounds;
pub mod config;
pub mod dp;
pub mod error;
pub mod experiments;
pub mod model;
pub mod poisson;
pub mod pricing;
pub mod sim;
pub mod switchover;

pub use error::{Error, Result};
