//! Criterion benchmarks for `geomod-core`; the benchmarks live in `benches/`.
