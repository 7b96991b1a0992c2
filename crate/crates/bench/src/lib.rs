//! Criterion benchmarks for the rsplab algorithms; see `benches/`.
