//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use univec::parallel;
use univec::vecabi::capabilities;

use crate::emit::{emit, Format};
use crate::record::{BenchRecord, BenchVariant, CellOutcome};
use crate::runner::{self, BowParams, ErodeParams, FilterParams, RunOptions, SuiteParams};

pub const CIFAR_ENV: &str = "CIFAR10_DIR";

#[derive(Parser, Debug)]
#[command(name = "bench", about = "Min-of-N benchmarks with correctness checks", version)]
struct Cli {
    #[command(subcommand)]
    suite: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 2D Gaussian filtering.
    Filter {
        /// Kernel side; all of 3,5,...,13 when omitted.
        #[arg(long, value_delimiter = ',')]
        kernel: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        channels: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_resolution, default_value = "1920x1080")]
        resolution: Vec<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Grayscale erosion with a square element.
    Erode {
        /// Element radius ("filter size"); all of 1,2,3 when omitted.
        #[arg(long, value_delimiter = ',')]
        radius: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_resolution, default_value = "1920x1080")]
        resolution: Vec<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Bag-of-words classification stages.
    Bow {
        /// Dictionary size.
        #[arg(long, default_value_t = univec::bow::pipeline::DEFAULT_K)]
        words: usize,
        #[arg(long, default_value_t = 200)]
        train: usize,
        #[arg(long, default_value_t = 50)]
        test: usize,
        #[arg(long, default_value_t = univec::bow::pipeline::DEFAULT_KMEANS_ITERS)]
        kmeans_iters: usize,
        #[arg(long, default_value_t = 1.0)]
        svm_c: f32,
        #[arg(long, default_value_t = 100)]
        epochs: usize,
        /// CIFAR-10 binary directory; a synthetic surrogate is used if unset.
        #[arg(long, env = CIFAR_ENV)]
        cifar: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Comma-separated variant tags; a per-suite default set when omitted.
    #[arg(long, value_delimiter = ',')]
    variants: Vec<BenchVariant>,
    #[arg(long, default_value_t = runner::DEFAULT_REPEATS)]
    repeats: usize,
    /// Worker count for parallel variants (default: environment or cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutFormat::Md)]
    format: OutFormat,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verify every cell but skip timing.
    #[arg(long)]
    check_only: bool,
    /// Pin workers to cores (best effort).
    #[arg(long)]
    pin: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutFormat {
    Csv,
    Md,
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let dim = |v: &str| v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| format!("bad dimension {v:?}"));
    Ok((dim(w)?, dim(h)?))
}

/// What a CLI invocation produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub stderr: String,
    pub code: i32,
}

fn notes(records: &[BenchRecord], workers: usize) -> String {
    let mut s = String::new();
    let caps = capabilities();
    let _ = writeln!(s, "# {}", caps.report().replace('\n', " "));
    let _ = writeln!(
        s,
        "# clock_resolution_ns={} workers={} pinning={:?}",
        runner::clock_resolution().as_nanos(),
        workers,
        parallel::pin_status()
    );
    for r in records {
        let cell = format!("{} {} {}", r.workload.resolution_label(), r.workload.param, r.variant);
        match &r.outcome {
            CellOutcome::Failed(diff) => {
                let _ = writeln!(s, "CHECK FAILED [{}]: {diff}", cell.trim());
            }
            CellOutcome::Timed(t) if t.loops > 1 || r.emulated => {
                let _ = writeln!(s, "# [{}] loops={} emulated={}", cell.trim(), t.loops, r.emulated);
            }
            _ => {}
        }
    }
    s
}

/// Parses `args` (program name first) and runs the selected suite.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text.into_bytes(), stderr: String::new(), code }
            } else {
                Outcome { stdout: Vec::new(), stderr: text, code }
            };
        }
    };
    let (params, common) = match cli.suite {
        Command::Filter { kernel, channels, resolution, common } => {
            let kernels = if kernel.is_empty() { vec![3, 5, 7, 9, 11, 13] } else { kernel };
            (SuiteParams::Filter(FilterParams { resolutions: resolution, kernels, channels }), common)
        }
        Command::Erode { radius, resolution, common } => {
            let sizes = if radius.is_empty() { vec![1, 2, 3] } else { radius };
            (SuiteParams::Erode(ErodeParams { resolutions: resolution, sizes }), common)
        }
        Command::Bow { words, train, test, kmeans_iters, svm_c, epochs, cifar, common } => {
            (SuiteParams::Bow(BowParams { train, test, words, kmeans_iters, svm_c, epochs, cifar_dir: cifar }), common)
        }
    };
    let suite = params.suite();
    if let Some(n) = common.threads {
        if let Err(e) = parallel::set_worker_count(n) {
            return Outcome { stderr: format!("error: {e}\n"), code: 2, ..Outcome::default() };
        }
    }
    parallel::set_pinning(common.pin);
    let workers = parallel::worker_count();
    let opts = RunOptions {
        variants: if common.variants.is_empty() { suite.default_variants() } else { common.variants },
        repeats: common.repeats,
        seed: common.seed,
        workers,
        check_only: common.check_only,
        fault: None,
    };
    let records = match runner::run_benchmark(&params, &opts) {
        Ok(r) => r,
        Err(e) => return Outcome { stderr: format!("error: {e}\n"), code: 2, ..Outcome::default() },
    };
    let format = match common.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Md => Format::Markdown,
    };
    let table = emit(suite, &records, format);
    let failed = records.iter().any(|r| matches!(r.outcome, CellOutcome::Failed(_)));
    let mut outcome = Outcome { stdout: Vec::new(), stderr: notes(&records, workers), code: i32::from(failed) };
    match common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &table) {
                outcome.stderr.push_str(&format!("error: {}: {e}\n", path.display()));
                outcome.code = 2;
            }
        }
        None => outcome.stdout = table,
    }
    outcome
}
