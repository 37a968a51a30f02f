//! Criterion benchmarks for the core oracles; see `benches/`.
