//! Criterion benchmarks for the counting engine and verification sweeps; see `benches/`.
