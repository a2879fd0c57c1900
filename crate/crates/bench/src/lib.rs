//! Criterion benchmarks for the `adlab` kernels live in `benches/`.
