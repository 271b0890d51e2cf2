//! Checked, min-of-N timing of every (workload, variant) cell.

use std::hint::black_box;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use univec::bow::pipeline::{detect_all, features_all, gray_images, predict_all};
use univec::bow::{train_model, BowError, PipelineConfig};
use univec::filter::{filter2d, BorderPolicy, FilterError, KernelF32, Sigma};
use univec::image::{read_cifar10, synth_image, CifarRecord, ImageError, ImageU8};
use univec::morphology::{erode, MorphError, StructuringElement};
use univec::parallel;
use univec::vecabi::capabilities;

use crate::record::{min_of, BenchRecord, BenchVariant, CellOutcome, Suite, Timing, Workload};

pub const DEFAULT_REPEATS: usize = 5;
/// Cells faster than this many clock ticks are looped internally.
const TICKS_PER_SAMPLE: u32 = 100;
const MAX_LOOPS: u32 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("repeats must be at least 1")]
    ZeroRepeats,
    #[error("no variants selected")]
    NoVariants,
    #[error("{variant} is not offered for the {suite:?} suite")]
    NotOffered { suite: Suite, variant: BenchVariant },
    #[error("suite parameters select no workloads")]
    NoWorkloads,
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Bow(#[from] BowError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterParams {
    pub resolutions: Vec<(usize, usize)>,
    pub kernels: Vec<usize>,
    pub channels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErodeParams {
    pub resolutions: Vec<(usize, usize)>,
    /// Table "filter size" values, mapped by `StructuringElement::from_filter_size`.
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BowParams {
    pub train: usize,
    pub test: usize,
    pub words: usize,
    pub kmeans_iters: usize,
    pub svm_c: f32,
    pub epochs: usize,
    /// Directory with `data_batch_1.bin` and `test_batch.bin`; the
    /// synthetic surrogate is used when absent.
    pub cifar_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuiteParams {
    Filter(FilterParams),
    Erode(ErodeParams),
    Bow(BowParams),
}

impl SuiteParams {
    pub fn suite(&self) -> Suite {
        match self {
            SuiteParams::Filter(_) => Suite::Filter,
            SuiteParams::Erode(_) => Suite::Erode,
            SuiteParams::Bow(_) => Suite::Bow,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub variants: Vec<BenchVariant>,
    pub repeats: usize,
    pub seed: u64,
    /// Workers for parallel-capable variants.
    pub workers: usize,
    pub check_only: bool,
    /// Test hook: corrupts this variant's output before its check.
    pub fault: Option<BenchVariant>,
}

impl RunOptions {
    pub fn new(variants: Vec<BenchVariant>) -> Self {
        Self {
            variants,
            repeats: DEFAULT_REPEATS,
            seed: 0,
            workers: parallel::worker_count(),
            check_only: false,
            fault: None,
        }
    }
}

/// Smallest observable step of the monotonic clock.
pub fn clock_resolution() -> Duration {
    static RES: OnceLock<Duration> = OnceLock::new();
    *RES.get_or_init(|| {
        let mut best = Duration::from_secs(1);
        for _ in 0..1000 {
            let a = Instant::now();
            let mut b = Instant::now();
            while b == a {
                b = Instant::now();
            }
            best = best.min(b - a);
        }
        best
    })
}

/// One warm-up call, then `repeats` samples of `loops` calls each.
pub fn time_cell<F: FnMut()>(repeats: usize, mut f: F) -> Timing {
    let t = Instant::now();
    f();
    let warm = t.elapsed();
    let target = clock_resolution() * TICKS_PER_SAMPLE;
    let loops = if warm >= target {
        1
    } else {
        let per = warm.max(clock_resolution()).as_secs_f64();
        ((target.as_secs_f64() / per).ceil() as u32).clamp(1, MAX_LOOPS)
    };
    let samples: Vec<f64> = (0..repeats)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..loops {
                f();
            }
            t.elapsed().as_secs_f64() / f64::from(loops)
        })
        .collect();
    Timing { min_time: min_of(&samples).expect("repeats >= 1"), samples, loops }
}

fn emulated(v: BenchVariant) -> bool {
    let caps = capabilities();
    match v {
        BenchVariant::SeqScalar | BenchVariant::ParScalar => false,
        BenchVariant::SeqVector | BenchVariant::ParVector => !caps.native_narrow,
        BenchVariant::Optim => !caps.synth_wide,
    }
}

fn image_diff(expected: &ImageU8, got: &ImageU8) -> Option<String> {
    expected.first_mismatch(got).map(|(x, y, c)| {
        format!("first mismatch at (x={x}, y={y}, c={c}): expected {}, got {}", expected.get(x, y, c), got.get(x, y, c))
    })
}

fn corrupt_image(img: &mut ImageU8) {
    let (x, y) = (img.width() / 2, img.height() / 2);
    let v = img.get(x, y, 0);
    img.set(x, y, 0, v ^ 0x55);
}

struct Cell<'a> {
    workload: Workload,
    variant: BenchVariant,
    opts: &'a RunOptions,
}

impl Cell<'_> {
    fn record(self, outcome: CellOutcome) -> BenchRecord {
        BenchRecord {
            workload: self.workload,
            variant: self.variant,
            repetitions: self.opts.repeats,
            outcome,
            emulated: emulated(self.variant),
            pinning: parallel::pin_status(),
        }
    }
}

fn validate(suite: Suite, opts: &RunOptions) -> Result<(), BenchError> {
    if opts.repeats == 0 {
        return Err(BenchError::ZeroRepeats);
    }
    if opts.variants.is_empty() {
        return Err(BenchError::NoVariants);
    }
    if let Some(&variant) = opts.variants.iter().find(|v| !suite.offers(**v)) {
        return Err(BenchError::NotOffered { suite, variant });
    }
    Ok(())
}

/// Runs every selected cell. Each cell's output is compared with the
/// SeqScalar output before it is timed; a mismatch marks that cell failed
/// and the remaining cells still run.
pub fn run_benchmark(params: &SuiteParams, opts: &RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    validate(params.suite(), opts)?;
    match params {
        SuiteParams::Filter(p) => run_filter(p, opts),
        SuiteParams::Erode(p) => run_erode(p, opts),
        SuiteParams::Bow(p) => run_bow(p, opts),
    }
}

/// A workload's operation, run with the given kernel variant.
type ImageOp<'a> = Box<dyn Fn(univec::Variant) -> Result<ImageU8, BenchError> + 'a>;

fn run_image_suite(workloads: Vec<(Workload, ImageOp<'_>)>, opts: &RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    if workloads.is_empty() {
        return Err(BenchError::NoWorkloads);
    }
    let mut out = Vec::new();
    for (workload, op) in workloads {
        let reference = op(univec::Variant::Scalar)?;
        for &variant in &opts.variants {
            let cell = Cell { workload: workload.clone(), variant, opts };
            let mut got = op(variant.kernel())?;
            if opts.fault == Some(variant) {
                corrupt_image(&mut got);
            }
            let outcome = if let Some(diff) = image_diff(&reference, &got) {
                CellOutcome::Failed(diff)
            } else if opts.check_only {
                CellOutcome::Checked
            } else {
                CellOutcome::Timed(time_cell(opts.repeats, || {
                    black_box(op(black_box(variant.kernel())).expect("checked above"));
                }))
            };
            out.push(cell.record(outcome));
        }
    }
    Ok(out)
}

fn run_filter(p: &FilterParams, opts: &RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    let kernels = p.kernels.iter().map(|&k| KernelF32::gaussian(k, Sigma::Auto)).collect::<Result<Vec<_>, _>>()?;
    let images = p
        .resolutions
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| synth_image(w, h, p.channels, opts.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut workloads: Vec<(Workload, ImageOp<'_>)> = Vec::new();
    for img in &images {
        for kernel in &kernels {
            let op: ImageOp<'_> = Box::new(move |v| Ok(filter2d(img, kernel, BorderPolicy::Reflect101, v)?));
            workloads.push((Workload::filter(img.width(), img.height(), kernel.size()), op));
        }
    }
    run_image_suite(workloads, opts)
}

fn run_erode(p: &ErodeParams, opts: &RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    let elements = p
        .sizes
        .iter()
        .map(|&n| StructuringElement::from_filter_size(n).map(|se| (n, se)))
        .collect::<Result<Vec<_>, _>>()?;
    let images = p
        .resolutions
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| synth_image(w, h, 1, opts.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut workloads: Vec<(Workload, ImageOp<'_>)> = Vec::new();
    for img in &images {
        for &(n, se) in &elements {
            let op: ImageOp<'_> = Box::new(move |v| Ok(erode(img, se, v)?));
            workloads.push((Workload::erode(img.width(), img.height(), n), op));
        }
    }
    run_image_suite(workloads, opts)
}

fn read_file(path: PathBuf) -> Result<Vec<u8>, BenchError> {
    std::fs::read(&path).map_err(|source| BenchError::Io { path, source })
}

/// First `train` and `test` records of a CIFAR-10 binary directory.
pub fn load_cifar_dir(
    dir: &std::path::Path,
    train: usize,
    test: usize,
) -> Result<(Vec<CifarRecord>, Vec<CifarRecord>), BenchError> {
    let mut tr = read_cifar10(&read_file(dir.join("data_batch_1.bin"))?)?;
    let mut te = read_cifar10(&read_file(dir.join("test_batch.bin"))?)?;
    tr.truncate(train);
    te.truncate(test);
    Ok((tr, te))
}

/// Training and test records: the real dataset when configured, otherwise
/// the seeded surrogate.
pub fn bow_data(p: &BowParams, seed: u64) -> Result<(Vec<CifarRecord>, Vec<CifarRecord>), BenchError> {
    match &p.cifar_dir {
        Some(dir) => load_cifar_dir(dir, p.train, p.test),
        None => Ok((
            univec::bow::synthetic_cifar(p.train, seed),
            univec::bow::synthetic_cifar(p.test, seed.wrapping_add(1)),
        )),
    }
}

fn run_bow(p: &BowParams, opts: &RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    let (train, test) = bow_data(p, opts.seed)?;
    let mut config = PipelineConfig::new(p.words, opts.seed);
    config.kmeans_iters = p.kmeans_iters;
    config.svm.c = p.svm_c;
    config.svm.epochs = p.epochs;
    config.variant = univec::Variant::VecWide;
    config.workers = opts.workers;
    let model = train_model(&train, &config)?.model;
    let images = gray_images(&test);
    if images.is_empty() {
        return Err(BenchError::NoWorkloads);
    }

    let full = |v: univec::Variant, w: usize| -> Result<Vec<usize>, BenchError> {
        let kps = detect_all(&images, v, w)?;
        let hists = features_all(&images, &kps, &model, v, w)?;
        Ok(predict_all(&model, &hists, v, w)?)
    };
    let reference = full(univec::Variant::Scalar, 1)?;

    let mut out = Vec::new();
    for &variant in &opts.variants {
        let (v, w) = (variant.kernel(), if variant.parallel() { opts.workers } else { 1 });
        let mut got = full(v, w)?;
        if opts.fault == Some(variant) {
            got[0] = (got[0] + 1) % univec::image::CIFAR_CLASSES;
        }
        let diff = reference.iter().zip(&got).position(|(a, b)| a != b).map(|i| {
            format!("first mismatching prediction at test image {i}: expected {}, got {}", reference[i], got[i])
        });
        if let Some(diff) = diff {
            for stage in 0..3 {
                out.push(
                    Cell { workload: Workload::bow(stage), variant, opts }.record(CellOutcome::Failed(diff.clone())),
                );
            }
            continue;
        }
        if opts.check_only {
            for stage in 0..3 {
                out.push(Cell { workload: Workload::bow(stage), variant, opts }.record(CellOutcome::Checked));
            }
            continue;
        }
        let kps = detect_all(&images, v, w)?;
        let hists = features_all(&images, &kps, &model, v, w)?;
        let timings = [
            time_cell(opts.repeats, || {
                black_box(detect_all(black_box(&images), v, w).expect("checked above"));
            }),
            time_cell(opts.repeats, || {
                black_box(features_all(black_box(&images), &kps, &model, v, w).expect("checked above"));
            }),
            time_cell(opts.repeats, || {
                black_box(predict_all(&model, black_box(&hists), v, w).expect("checked above"));
            }),
        ];
        for (stage, t) in timings.into_iter().enumerate() {
            out.push(Cell { workload: Workload::bow(stage), variant, opts }.record(CellOutcome::Timed(t)));
        }
    }
    // Rows grouped by stage, variants in selection order within each row.
    out.sort_by_key(|r| stage_index(&r.workload));
    Ok(out)
}

fn stage_index(w: &Workload) -> usize {
    crate::record::BOW_STAGES.iter().position(|s| *s == w.param).unwrap_or(usize::MAX)
}
