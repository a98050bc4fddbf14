//! Criterion benchmarks for laorder-core; see `benches/`.
