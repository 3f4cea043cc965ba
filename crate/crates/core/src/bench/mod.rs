//! Benchmark kernels, timing, statistics and table emission.

pub mod harness;
pub mod kernels;
pub mod oracles;
pub mod report;
pub mod stats;

pub use harness::{check, emit_tsv, run_benchmark, run_kernel, BenchRun, SampleSet, CONFIDENCE};
pub use kernels::{kernel, BenchError, BenchName, BenchmarkSpec, Kernel, Outcome, Variant};
pub use report::{emit_table, Cell, Column, Format, Measured, ReportError, ReportTable, Results, TableKind};
pub use stats::{ratio, summarize, t_quantile, RatioCell, StatsError, Summary};
