//! Lloyd's k-means and nearest-word histograms.

use super::kernels;
use super::sift::Descriptor;
use super::BowError;
use crate::image::SplitMix64;
use crate::parallel;
use crate::Variant;

/// Samples per assignment/update chunk. Fixed so that partial sums are
/// merged in the same order for every worker count.
pub const ASSIGN_GRAIN: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    k: usize,
    dim: usize,
    centroids: Vec<f32>,
}

impl Dictionary {
    pub fn new(k: usize, dim: usize, centroids: Vec<f32>) -> Result<Self, BowError> {
        if k == 0 || dim == 0 {
            return Err(BowError::EmptyDictionary);
        }
        if centroids.len() != k * dim {
            return Err(BowError::DimMismatch { expected: k * dim, got: centroids.len() });
        }
        if centroids.iter().any(|v| !v.is_finite()) {
            return Err(BowError::NonFinite);
        }
        Ok(Self { k, dim, centroids })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroids(&self) -> &[f32] {
        &self.centroids
    }

    pub fn centroid(&self, c: usize) -> &[f32] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }

    /// Nearest word and its squared distance; ties go to the lowest index.
    pub fn nearest(&self, x: &[f32], variant: Variant) -> (usize, f32) {
        kernels::nearest(x, &self.centroids, self.dim, variant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KmeansParams {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub variant: Variant,
    pub workers: usize,
}

impl KmeansParams {
    pub fn new(k: usize, max_iters: usize, seed: u64) -> Self {
        Self { k, max_iters, seed, variant: Variant::Scalar, workers: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct KmeansResult {
    pub dictionary: Dictionary,
    pub assignments: Vec<usize>,
    /// Objective measured at each assignment step.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

/// Draws `k` distinct indices from `0..n` by a partial Fisher-Yates shuffle.
pub fn draw_distinct(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = i + rng.below((n - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(k.min(n));
    idx
}

fn assign(samples: &[f32], dim: usize, dict: &Dictionary, p: &KmeansParams) -> Vec<(usize, f32)> {
    let n = samples.len() / dim;
    let mut out = vec![(0usize, 0.0f32); n];
    parallel::for_each_chunk_mut_with(p.workers, &mut out, ASSIGN_GRAIN, |c, part| {
        for (j, slot) in part.iter_mut().enumerate() {
            let i = c * ASSIGN_GRAIN + j;
            *slot = dict.nearest(&samples[i * dim..(i + 1) * dim], p.variant);
        }
    });
    out
}

/// Per-cluster sums in f64, built per chunk and merged in chunk order.
fn cluster_sums(samples: &[f32], dim: usize, k: usize, labels: &[usize], workers: usize) -> Vec<f64> {
    let n = labels.len();
    let mut partials: Vec<Vec<f64>> = vec![Vec::new(); n.div_ceil(ASSIGN_GRAIN)];
    parallel::for_each_chunk_mut_with(workers, &mut partials, 1, |c, slot| {
        let mut sums = vec![0.0f64; k * dim];
        let start = c * ASSIGN_GRAIN;
        for i in start..(start + ASSIGN_GRAIN).min(n) {
            let row = &mut sums[labels[i] * dim..(labels[i] + 1) * dim];
            for (s, &x) in row.iter_mut().zip(&samples[i * dim..(i + 1) * dim]) {
                *s += f64::from(x);
            }
        }
        slot[0] = sums;
    });
    let mut total = vec![0.0f64; k * dim];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Lloyd iterations from `k` distinct seeded samples (`samples` holds
/// `dim`-wide rows). An empty cluster takes the sample farthest from its
/// centroid among clusters with more than one member.
pub fn kmeans(samples: &[f32], dim: usize, params: &KmeansParams) -> Result<KmeansResult, BowError> {
    let k = params.k;
    if dim == 0 || !samples.len().is_multiple_of(dim) {
        return Err(BowError::DimMismatch { expected: dim, got: samples.len() });
    }
    let n = samples.len() / dim;
    if k == 0 || n < k {
        return Err(BowError::TooFewSamples { samples: n, k });
    }
    let mut centroids = Vec::with_capacity(k * dim);
    for i in draw_distinct(n, k, params.seed) {
        centroids.extend_from_slice(&samples[i * dim..(i + 1) * dim]);
    }
    let mut dict = Dictionary::new(k, dim, centroids)?;
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut converged = false;

    for _ in 0..params.max_iters {
        let nearest = assign(samples, dim, &dict, params);
        trace.push(nearest.iter().map(|&(_, d)| f64::from(d)).sum());
        let fresh: Vec<usize> = nearest.iter().map(|&(c, _)| c).collect();
        if fresh == labels {
            converged = true;
            break;
        }
        labels = fresh;
        let mut dist: Vec<f32> = nearest.iter().map(|&(_, d)| d).collect();
        let mut counts = vec![0usize; k];
        for &c in &labels {
            counts[c] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far: Option<usize> = None;
            for i in 0..n {
                if counts[labels[i]] > 1 && far.is_none_or(|f| dist[i] > dist[f]) {
                    far = Some(i);
                }
            }
            let i = far.expect("n >= k leaves a cluster with a spare member");
            counts[labels[i]] -= 1;
            counts[c] = 1;
            labels[i] = c;
            dist[i] = 0.0;
        }
        let sums = cluster_sums(samples, dim, k, &labels, params.workers);
        let centroids = sums
            .chunks_exact(dim)
            .zip(&counts)
            .flat_map(|(row, &cnt)| row.iter().map(move |s| (s / cnt as f64) as f32))
            .collect();
        dict = Dictionary::new(k, dim, centroids)?;
    }
    Ok(KmeansResult { dictionary: dict, assignments: labels, objective_trace: trace, converged })
}

/// Flattens descriptors into `DESCRIPTOR_LEN`-wide rows.
pub fn stack(descs: &[Descriptor]) -> Vec<f32> {
    descs.iter().flat_map(|d| d.0.iter().copied()).collect()
}

/// L1-normalized word counts; no descriptors gives the zero vector.
pub fn quantize_histogram(descs: &[Descriptor], dict: &Dictionary, variant: Variant) -> Result<Vec<f32>, BowError> {
    if dict.dim() != super::sift::DESCRIPTOR_LEN {
        return Err(BowError::DimMismatch { expected: super::sift::DESCRIPTOR_LEN, got: dict.dim() });
    }
    let mut counts = vec![0u32; dict.k()];
    for d in descs {
        counts[dict.nearest(&d.0, variant).0] += 1;
    }
    let total = descs.len() as f32;
    Ok(counts.iter().map(|&c| if c == 0 { 0.0 } else { c as f32 / total }).collect())
}
