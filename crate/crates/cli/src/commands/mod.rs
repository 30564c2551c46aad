pub mod analyze;
pub mod counterexample;
pub mod metrics;
pub mod optimize;
pub mod verify;
