//! Benchmark-only crate; see `benches/semantics.rs`.
