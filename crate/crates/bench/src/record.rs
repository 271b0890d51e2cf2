//! Benchmark variants, workloads and timing records.

use std::fmt;
use std::str::FromStr;

use univec::parallel::PinStatus;
use univec::Variant;

/// The five measured configurations, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchVariant {
    SeqScalar,
    ParScalar,
    SeqVector,
    ParVector,
    Optim,
}

impl BenchVariant {
    pub const ALL: [BenchVariant; 5] =
        [Self::SeqScalar, Self::ParScalar, Self::SeqVector, Self::ParVector, Self::Optim];

    pub fn tag(self) -> &'static str {
        match self {
            Self::SeqScalar => "SeqScalar",
            Self::ParScalar => "ParScalar",
            Self::SeqVector => "SeqVector",
            Self::ParVector => "ParVector",
            Self::Optim => "Optim",
        }
    }

    /// Kernel implementation used by this configuration.
    pub fn kernel(self) -> Variant {
        match self {
            Self::SeqScalar | Self::ParScalar => Variant::Scalar,
            Self::SeqVector | Self::ParVector => Variant::VecNarrow,
            Self::Optim => Variant::VecWide,
        }
    }

    /// Whether the configuration may use more than one worker.
    pub fn parallel(self) -> bool {
        matches!(self, Self::ParScalar | Self::ParVector | Self::Optim)
    }
}

impl fmt::Display for BenchVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variant {0:?} (expected SeqScalar, ParScalar, SeqVector, ParVector or Optim)")]
pub struct UnknownVariant(pub String);

impl FromStr for BenchVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Filter,
    Erode,
    Bow,
}

impl Suite {
    /// Variants measured by default for each suite.
    pub fn default_variants(self) -> Vec<BenchVariant> {
        match self {
            Suite::Filter => vec![BenchVariant::SeqScalar, BenchVariant::SeqVector],
            Suite::Erode => vec![BenchVariant::SeqScalar, BenchVariant::SeqVector, BenchVariant::Optim],
            Suite::Bow => BenchVariant::ALL.to_vec(),
        }
    }

    /// Filtering and erosion are measured sequentially only.
    pub fn offers(self, v: BenchVariant) -> bool {
        self == Suite::Bow || !matches!(v, BenchVariant::ParScalar | BenchVariant::ParVector)
    }

    /// Header of the parameter column.
    pub fn param_header(self) -> &'static str {
        match self {
            Suite::Filter => "Kernel size",
            Suite::Erode => "Filter size",
            Suite::Bow => "SVM step",
        }
    }

    pub fn has_resolution(self) -> bool {
        self != Suite::Bow
    }
}

/// Test-side stages of the classification benchmark.
pub const BOW_STAGES: [&str; 3] = ["keypoint detection", "feature generation", "prediction"];

/// One table row: resolution (if any) and the parameter label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Workload {
    pub suite: Suite,
    pub resolution: Option<(usize, usize)>,
    pub param: String,
}

impl Workload {
    pub fn filter(w: usize, h: usize, kernel: usize) -> Self {
        Self { suite: Suite::Filter, resolution: Some((w, h)), param: format!("{kernel}x{kernel}") }
    }

    pub fn erode(w: usize, h: usize, size: usize) -> Self {
        Self { suite: Suite::Erode, resolution: Some((w, h)), param: size.to_string() }
    }

    pub fn bow(stage: usize) -> Self {
        Self { suite: Suite::Bow, resolution: None, param: BOW_STAGES[stage].to_string() }
    }

    pub fn resolution_label(&self) -> String {
        self.resolution.map(|(w, h)| format!("{w}x{h}")).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    /// Minimum over the repetitions, in seconds, unrounded.
    pub min_time: f64,
    /// Per-repetition times (each averaged over `loops` inner calls).
    pub samples: Vec<f64>,
    pub loops: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Timed(Timing),
    /// Correctness verified, timing skipped on request.
    Checked,
    /// Correctness check failed; the diagnostic names the first difference.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub workload: Workload,
    pub variant: BenchVariant,
    pub repetitions: usize,
    pub outcome: CellOutcome,
    /// The vector backend ran on the scalar reference.
    pub emulated: bool,
    pub pinning: PinStatus,
}

impl BenchRecord {
    pub fn min_time(&self) -> Option<f64> {
        match &self.outcome {
            CellOutcome::Timed(t) => Some(t.min_time),
            _ => None,
        }
    }
}

/// Minimum of the given samples, `None` if there are none.
pub fn min_of(samples: &[f64]) -> Option<f64> {
    samples.iter().copied().reduce(f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Speedups {
    pub vectorization: Option<f64>,
    pub optimization: Option<f64>,
}

/// Speedups for one table row from the variant times present in it.
///
/// Vectorization speedup is scalar over narrow-vector time and optimization
/// speedup is narrow-vector over Optim time. When both parallel columns are
/// present (the classification tables) the parallel pair is the baseline,
/// otherwise the sequential pair is.
pub fn row_speedups(time: impl Fn(BenchVariant) -> Option<f64>) -> Speedups {
    let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    let (scalar, vector) = match (time(BenchVariant::ParScalar), time(BenchVariant::ParVector)) {
        (Some(s), Some(v)) => (Some(s), Some(v)),
        _ => (time(BenchVariant::SeqScalar), time(BenchVariant::SeqVector)),
    };
    Speedups { vectorization: ratio(scalar, vector), optimization: ratio(vector, time(BenchVariant::Optim)) }
}

/// Speedups for every workload, in first-appearance order.
pub fn speedups(records: &[BenchRecord]) -> Vec<(Workload, Speedups)> {
    rows(records)
        .into_iter()
        .map(|w| {
            let s = row_speedups(|v| lookup(records, &w, v));
            (w, s)
        })
        .collect()
}

pub(crate) fn rows(records: &[BenchRecord]) -> Vec<Workload> {
    let mut out: Vec<Workload> = Vec::new();
    for r in records {
        if !out.contains(&r.workload) {
            out.push(r.workload.clone());
        }
    }
    out
}

pub(crate) fn lookup(records: &[BenchRecord], w: &Workload, v: BenchVariant) -> Option<f64> {
    records.iter().find(|r| &r.workload == w && r.variant == v).and_then(BenchRecord::min_time)
}
