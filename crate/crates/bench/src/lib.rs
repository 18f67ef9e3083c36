//! Criterion benchmarks for `nlinterf`; see `benches/kernels.rs`.
