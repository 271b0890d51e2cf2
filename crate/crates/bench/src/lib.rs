//! Benchmark harness for the filtering, erosion and classification
//! workloads: checked min-of-N timing and table output.

pub mod cli;
pub mod emit;
pub mod record;
pub mod runner;

pub use emit::{emit, sig6, Format};
pub use record::{
    min_of, row_speedups, speedups, BenchRecord, BenchVariant, CellOutcome, Speedups, Suite, Timing, Workload,
};
pub use runner::{run_benchmark, BenchError, BowParams, ErodeParams, FilterParams, RunOptions, SuiteParams};
