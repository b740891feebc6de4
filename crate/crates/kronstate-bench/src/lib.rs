//! Criterion benchmarks for the kronstate crate live under `benches/`.
