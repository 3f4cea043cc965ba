use std::fmt::Write as _;
use std::time::Instant;

use crate::bridge::HostValue;

use super::kernels::{kernel, BenchError, BenchmarkSpec, Kernel};
use super::stats::{summarize, StatsError, Summary};

pub const CONFIDENCE: f64 = 0.99;

/// Wall-clock seconds of the timed runs, in run order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub times: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn summarize(&self) -> Result<Summary, StatsError> {
        summarize(&self.times, CONFIDENCE)
    }
}

/// Everything one benchmark produced.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub spec: BenchmarkSpec,
    pub samples: SampleSet,
    /// The validated result value, identical in every run.
    pub value: HostValue,
    /// Crossings of one run.
    pub crossings: u64,
    /// Resolution steps of each timed run.
    pub steps: Vec<u64>,
}

impl BenchRun {
    pub fn summary(&self) -> Result<Summary, StatsError> {
        self.samples.summarize()
    }
}

/// Warmups followed by timed runs, each checked against the kernel's
/// expected value. A wrong result aborts with no timings.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchRun, BenchError> {
    let mut k = kernel(spec)?;
    run_kernel(&mut k)
}

pub fn run_kernel(k: &mut Kernel) -> Result<BenchRun, BenchError> {
    let spec = *k.spec();
    for _ in 0..spec.warmups {
        k.run_checked()?;
    }
    let mut times = Vec::with_capacity(spec.iterations);
    let mut steps = Vec::with_capacity(spec.iterations);
    let mut last = None;
    for _ in 0..spec.iterations {
        let start = Instant::now();
        let out = k.run_checked()?;
        // A zero reading would break the positivity of samples.
        times.push(start.elapsed().as_secs_f64().max(1e-9));
        steps.push(out.steps);
        last = Some(out);
    }
    let out = last.expect("iterations >= 1");
    Ok(BenchRun {
        spec,
        samples: SampleSet { times },
        value: out.value,
        crossings: out.crossings,
        steps,
    })
}

/// Result validation only: one checked run per spec.
pub fn check(spec: &BenchmarkSpec) -> Result<HostValue, BenchError> {
    Ok(kernel(spec)?.run_checked()?.value)
}

/// One line per run: name, variant, K, n, mean_s, ci99_s.
pub fn emit_tsv(runs: &[BenchRun]) -> Result<String, BenchError> {
    let mut out = String::from("name\tvariant\tK\tn\tmean_s\tci99_s\n");
    for r in runs {
        let s = r.summary()?;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.9}\t{:.9}",
            r.spec.name, r.spec.variant, r.spec.scale, s.n, s.mean, s.ci_half_width
        );
    }
    Ok(out)
}
