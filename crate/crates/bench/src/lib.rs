//! Criterion benchmarks for the counting, group-ring and elimination kernels.
//! Run with `cargo bench -p lieshift-bench`.
