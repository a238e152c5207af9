//! Benchmarks only; see `benches/sweeps.rs`.
