//! Benchmark-only crate; see benches/engine.rs.

pub use k3brauer;
