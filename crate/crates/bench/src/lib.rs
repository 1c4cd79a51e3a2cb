//! Criterion benchmarks for the `turnpoint` kernels; see `benches/kernels.rs`.
