//! Benchmark-only crate; see `benches/signal_path.rs`.
