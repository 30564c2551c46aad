//! Emergent-communication games on finite input spaces.
//!
//! Exact and Monte-Carlo loss oracles, closed-form objectives, consistency
//! definitions, protocol search, protocol metrics and the explicit
//! counterexample instances.

pub mod consistency;
pub mod counterexamples;
pub mod error;
pub mod exec;
pub mod games;
pub mod info;
pub mod io;
pub mod metrics;
pub mod model;
pub mod objectives;
pub mod optimize;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Exec;
