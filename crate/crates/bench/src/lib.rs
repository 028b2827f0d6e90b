//! Criterion benchmarks for `wdnopt`; see `benches/`.
