//! Benchmarks only; run them with `cargo bench -p localtaylor-bench`.
