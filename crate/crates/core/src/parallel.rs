//! Deterministic static-chunked parallel loops.
//!
//! A range is cut into fixed `grain`-sized chunks and chunk `i` always goes
//! to worker `i % workers`. Bodies write only to the output partition they
//! are handed, so results never depend on the worker count.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, AtomicU8, AtomicUsize, Ordering};
use std::thread;

/// Environment variable overriding the default worker count.
pub const THREADS_ENV: &str = "UNIVEC_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParallelError {
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("grain must be at least 1")]
    ZeroGrain,
    #[error("range begin {begin} is past end {end}")]
    InvertedRange { begin: usize, end: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeJob {
    begin: usize,
    end: usize,
    grain: usize,
}

impl RangeJob {
    pub fn new(begin: usize, end: usize, grain: usize) -> Result<Self, ParallelError> {
        if begin > end {
            return Err(ParallelError::InvertedRange { begin, end });
        }
        if grain == 0 {
            return Err(ParallelError::ZeroGrain);
        }
        Ok(Self { begin, end, grain })
    }

    pub fn begin(&self) -> usize {
        self.begin
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn grain(&self) -> usize {
        self.grain
    }

    pub fn chunk_count(&self) -> usize {
        (self.end - self.begin).div_ceil(self.grain)
    }

    pub fn chunk(&self, i: usize) -> Range<usize> {
        let start = self.begin + i * self.grain;
        start..(start + self.grain).min(self.end)
    }
}

static WORKERS: AtomicUsize = AtomicUsize::new(0);

fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Worker count used by [`parallel_for`] and [`for_each_chunk_mut`].
pub fn worker_count() -> usize {
    match WORKERS.load(Ordering::Relaxed) {
        0 => {
            let n = default_workers();
            WORKERS.store(n, Ordering::Relaxed);
            n
        }
        n => n,
    }
}

pub fn set_worker_count(n: usize) -> Result<(), ParallelError> {
    if n == 0 {
        return Err(ParallelError::ZeroWorkers);
    }
    WORKERS.store(n, Ordering::Relaxed);
    Ok(())
}

/// Outcome of the most recent attempt to pin workers to cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinStatus {
    Disabled,
    Pinned,
    Failed,
}

static PIN_ENABLED: AtomicBool = AtomicBool::new(false);
static PIN_STATUS: AtomicU8 = AtomicU8::new(0);

/// Requests best-effort core pinning for spawned workers.
pub fn set_pinning(enabled: bool) {
    PIN_ENABLED.store(enabled, Ordering::Relaxed);
    if !enabled {
        PIN_STATUS.store(0, Ordering::Relaxed);
    }
}

pub fn pin_status() -> PinStatus {
    match PIN_STATUS.load(Ordering::Relaxed) {
        1 => PinStatus::Pinned,
        2 => PinStatus::Failed,
        _ => PinStatus::Disabled,
    }
}

fn pin_current_thread(worker: usize) {
    if !PIN_ENABLED.load(Ordering::Relaxed) {
        return;
    }
    let ok = pin_to_core(worker);
    // A single failure marks the whole run as unpinned.
    if ok {
        let _ = PIN_STATUS.compare_exchange(0, 1, Ordering::Relaxed, Ordering::Relaxed);
    } else {
        PIN_STATUS.store(2, Ordering::Relaxed);
    }
}

#[cfg(target_os = "linux")]
fn pin_to_core(worker: usize) -> bool {
    let cores = thread::available_parallelism().map_or(1, |n| n.get());
    // SAFETY: cpu_set_t is plain data; sched_setaffinity(0, ..) targets the
    // calling thread.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(worker % cores, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_to_core(_worker: usize) -> bool {
    false
}

/// Runs `body` over every chunk of `job` using the global worker count.
pub fn parallel_for<F>(job: &RangeJob, body: F)
where
    F: Fn(Range<usize>) + Sync,
{
    parallel_for_with(worker_count(), job, body)
}

/// Like [`parallel_for`] with an explicit worker count. At most one worker
/// per chunk is started; a single worker runs on the calling thread.
pub fn parallel_for_with<F>(workers: usize, job: &RangeJob, body: F)
where
    F: Fn(Range<usize>) + Sync,
{
    let chunks = job.chunk_count();
    let workers = workers.max(1).min(chunks);
    if workers <= 1 {
        for i in 0..chunks {
            body(job.chunk(i));
        }
        return;
    }
    let body = &body;
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    pin_current_thread(w);
                    for i in (w..chunks).step_by(workers) {
                        body(job.chunk(i));
                    }
                })
            })
            .collect();
        join_all(handles);
    });
}

/// Joins every worker, then re-raises the first panic with its payload.
fn join_all(handles: Vec<thread::ScopedJoinHandle<'_, ()>>) {
    let mut first_panic = None;
    for h in handles {
        if let Err(payload) = h.join() {
            first_panic.get_or_insert(payload);
        }
    }
    if let Some(payload) = first_panic {
        std::panic::resume_unwind(payload);
    }
}

/// Splits `out` into `chunk_len`-sized partitions and calls
/// `body(chunk_index, partition)` for each, in parallel.
pub fn for_each_chunk_mut<T, F>(out: &mut [T], chunk_len: usize, body: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    for_each_chunk_mut_with(worker_count(), out, chunk_len, body)
}

pub fn for_each_chunk_mut_with<T, F>(workers: usize, out: &mut [T], chunk_len: usize, body: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    assert!(chunk_len >= 1, "chunk length must be at least 1");
    let chunks = out.len().div_ceil(chunk_len);
    let workers = workers.max(1).min(chunks);
    if workers <= 1 {
        for (i, part) in out.chunks_mut(chunk_len).enumerate() {
            body(i, part);
        }
        return;
    }
    let mut buckets: Vec<Vec<(usize, &mut [T])>> = (0..workers).map(|_| Vec::new()).collect();
    for (i, part) in out.chunks_mut(chunk_len).enumerate() {
        buckets[i % workers].push((i, part));
    }
    let body = &body;
    thread::scope(|s| {
        let handles: Vec<_> = buckets
            .into_iter()
            .enumerate()
            .map(|(w, bucket)| {
                s.spawn(move || {
                    pin_current_thread(w);
                    for (i, part) in bucket {
                        body(i, part);
                    }
                })
            })
            .collect();
        join_all(handles);
    });
}
