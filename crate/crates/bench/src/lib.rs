//! Criterion benchmarks for the simulation and selection hot paths; see `benches/`.
