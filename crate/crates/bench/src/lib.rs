//! Benchmark-only crate; the measurements live in `benches/`. The library
//! target exists so `cargo test --workspace` has something to compile here.
