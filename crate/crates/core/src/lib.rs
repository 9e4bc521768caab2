//! Software-rounded binary64 interval arithmetic together with an exact
//! rational oracle, a benchmark harness that checks correctness, width and
//! speed of the library against that oracle, and a continuous collision
//! detection client.

pub mod bench_harness;
pub mod ccd;
pub mod cli;
pub mod expr_engine;
pub mod float_kernel;
pub mod interval_core;
pub mod rational_oracle;
pub mod rng;
