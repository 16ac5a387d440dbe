//! Criterion benchmarks for `sdf-core`; see `benches/`.
