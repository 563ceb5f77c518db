//! Criterion benchmarks for csir-core live under `benches/`.
