//! Desk-scale emulation of a quantum-inspired interior point method for
//! linear optimization.
//!
//! The quantum linear-system subroutine is replaced by a contract-equivalent
//! noisy normalized-direction oracle: every solve returns a unit direction
//! within a configured angular error plus a relative norm estimate, and
//! charges a query count modeling the cost of the quantum routine it stands
//! in for. Everything downstream (the short-step dual method, the iterative
//! refinement loop, rounding to an exact vertex) is classical and exact up
//! to the configured scalar backend.

pub mod bench;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod generate;
pub mod ipm;
pub mod ir;
pub mod linalg;
pub mod model;
pub mod mps;
pub mod newton;
pub mod oracle;
pub mod refine;
pub mod regress;
pub mod report;
pub mod scalar;

pub use cli::run_cli;
pub use error::{Error, Result};
