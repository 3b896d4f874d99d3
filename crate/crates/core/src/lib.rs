//! Secrecy-rate maximization for multi-antenna backscatter (RFID) links with
//! artificial noise.
//!
//! A reader illuminates a tag with a constant carrier and, on the same
//! antennas, transmits artificial noise (AN) that degrades a passive
//! eavesdropper more than the reader itself. The crate provides
//!
//! * the channel model and the achievable rates ([`model`]),
//! * a projected-gradient solver for the AN covariance and carrier power
//!   ([`solver`]) together with the nullspace designs ([`nullspace`]),
//! * a global solver for single-antenna tags ([`single_tag`]),
//! * seeded Monte-Carlo sweeps with CSV output ([`montecarlo`]), and
//! * the `backsec` command line ([`cli`]).
//!
//! Runnable examples live in `examples/`: `secrecy_rate`, `general_an`,
//! `nullspace_an`, `single_antenna_tag`, `projection` and `power_sweep`
//! (`cargo run --example general_an`).
//!
//! ```
//! use backscatter_secrecy::model::{Instance, Solution, SystemParams};
//! use backscatter_secrecy::montecarlo::{generate_channels, GeometryParams};
//! use backscatter_secrecy::schemes::solve_general;
//! use backscatter_secrecy::solver::SolverConfig;
//!
//! let params = SystemParams::default();
//! let channels = generate_channels(&params, &GeometryParams::default(), 7, 0);
//! let inst = Instance::new(channels, params.clone()).unwrap();
//! let no_an = inst.secrecy_rate(&Solution::no_an(params.total_power, inst.m())).unwrap();
//! let out = solve_general(&inst, &SolverConfig::default()).unwrap();
//! assert!(out.report.secrecy_rate() >= no_an - 1e-9);
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod nullspace;
pub mod schemes;
pub mod single_tag;
pub mod solver;
pub mod validate;

pub use error::{Error, Result};
