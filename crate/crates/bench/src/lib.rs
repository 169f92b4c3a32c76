//! Criterion benchmarks for the dimer simulator; see `benches/`.
