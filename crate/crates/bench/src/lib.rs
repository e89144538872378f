//! Criterion benchmarks for the online adaptation engine; see `benches/`.
