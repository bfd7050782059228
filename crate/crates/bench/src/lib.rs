//! Benchmark-only crate; see benches/potentials.rs.
