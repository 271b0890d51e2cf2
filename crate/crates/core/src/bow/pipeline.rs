//! Training and test procedure over CIFAR-format records.

use std::time::{Duration, Instant};

use super::kmeans::{kmeans, quantize_histogram, stack, KmeansParams};
use super::model::BowModel;
use super::sift::{self, Descriptor, Keypoint, DESCRIPTOR_LEN};
use super::svm::{svm_predict, svm_train, SvmParams};
use super::BowError;
use crate::image::{cifar_to_gray, CifarRecord, ImageU8};
use crate::parallel;
use crate::Variant;

pub const DEFAULT_K: usize = 50;
/// Dictionary size of the full-scale benchmark configuration.
pub const FULL_SCALE_K: usize = 250;
pub const DEFAULT_KMEANS_ITERS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub k: usize,
    pub kmeans_iters: usize,
    pub svm: SvmParams,
    pub seed: u64,
    pub variant: Variant,
    pub workers: usize,
}

impl PipelineConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            kmeans_iters: DEFAULT_KMEANS_ITERS,
            svm: SvmParams { seed, ..SvmParams::default() },
            seed,
            variant: Variant::Scalar,
            workers: 1,
        }
    }
}

/// Test-side wall times of the three benchmarked stages.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub detection: Duration,
    pub features: Duration,
    pub prediction: Duration,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub accuracy: f64,
    pub predictions: Vec<usize>,
    pub times: StageTimes,
    pub model: BowModel,
    pub kmeans_trace: Vec<f64>,
    pub svm_trace: Vec<f64>,
    pub train_descriptors: usize,
}

pub fn gray_images(records: &[CifarRecord]) -> Vec<ImageU8> {
    records.iter().map(cifar_to_gray).collect()
}

/// Applies `f` to every item in parallel, one item per chunk, keeping order.
fn map_items<T: Sync, R: Send, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>, BowError>
where
    F: Fn(usize, &T) -> Result<R, BowError> + Sync,
{
    let mut slots: Vec<Option<Result<R, BowError>>> = (0..items.len()).map(|_| None).collect();
    parallel::for_each_chunk_mut_with(workers, &mut slots, 1, |i, slot| {
        slot[0] = Some(f(i, &items[i]));
    });
    slots.into_iter().map(|s| s.expect("every slot visited")).collect()
}

/// Stage I: keypoints for every image.
pub fn detect_all(images: &[ImageU8], variant: Variant, workers: usize) -> Result<Vec<Vec<Keypoint>>, BowError> {
    map_items(images, workers, |_, img| sift::detect_keypoints(img, variant))
}

/// Stage II: descriptors at the given keypoints, quantized to histograms.
pub fn features_all(
    images: &[ImageU8],
    keypoints: &[Vec<Keypoint>],
    model: &BowModel,
    variant: Variant,
    workers: usize,
) -> Result<Vec<Vec<f32>>, BowError> {
    if images.len() != keypoints.len() {
        return Err(BowError::DimMismatch { expected: images.len(), got: keypoints.len() });
    }
    map_items(images, workers, |i, img| {
        let descs = sift::compute_descriptors(img, &keypoints[i], variant)?;
        quantize_histogram(&descs, model.dictionary(), variant)
    })
}

/// Stage III: class predictions.
pub fn predict_all(
    model: &BowModel,
    hists: &[Vec<f32>],
    variant: Variant,
    workers: usize,
) -> Result<Vec<usize>, BowError> {
    map_items(hists, workers, |_, h| svm_predict(model.svm(), h, variant))
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub model: BowModel,
    pub kmeans_trace: Vec<f64>,
    pub svm_trace: Vec<f64>,
    /// Descriptors pooled for clustering.
    pub descriptors: usize,
}

/// Training steps: descriptors, dictionary, histograms, classifier.
pub fn train_model(records: &[CifarRecord], config: &PipelineConfig) -> Result<TrainedModel, BowError> {
    if records.is_empty() {
        return Err(BowError::EmptyData);
    }
    let images = gray_images(records);
    let (v, w) = (config.variant, config.workers);
    let per_image: Vec<Vec<Descriptor>> = map_items(&images, w, |_, img| sift::detect_and_describe(img, v))?;
    let all: Vec<Descriptor> = per_image.iter().flatten().cloned().collect();
    let params =
        KmeansParams { k: config.k, max_iters: config.kmeans_iters, seed: config.seed, variant: v, workers: w };
    let km = kmeans(&stack(&all), DESCRIPTOR_LEN, &params)?;
    let hists = map_items(&per_image, w, |_, d| quantize_histogram(d, &km.dictionary, v))?;
    let features: Vec<f32> = hists.concat();
    let labels: Vec<u8> = records.iter().map(|r| r.label).collect();
    let svm = svm_train(&features, config.k, &labels, &config.svm)?;
    Ok(TrainedModel {
        model: BowModel::new(km.dictionary, svm.model)?,
        kmeans_trace: km.objective_trace,
        svm_trace: svm.objective_trace,
        descriptors: all.len(),
    })
}

/// Trains on `train_set`, then classifies `test_set`, timing the three
/// test-side stages.
pub fn run_pipeline(
    train_set: &[CifarRecord],
    test_set: &[CifarRecord],
    config: &PipelineConfig,
) -> Result<PipelineReport, BowError> {
    if train_set.is_empty() || test_set.is_empty() {
        return Err(BowError::EmptyData);
    }
    let trained = train_model(train_set, config)?;
    let (v, w) = (config.variant, config.workers);
    let images = gray_images(test_set);

    let t = Instant::now();
    let keypoints = detect_all(&images, v, w)?;
    let detection = t.elapsed();

    let t = Instant::now();
    let hists = features_all(&images, &keypoints, &trained.model, v, w)?;
    let features = t.elapsed();

    let t = Instant::now();
    let predictions = predict_all(&trained.model, &hists, v, w)?;
    let prediction = t.elapsed();

    let correct = predictions.iter().zip(test_set).filter(|(p, r)| **p == r.label as usize).count();
    Ok(PipelineReport {
        accuracy: correct as f64 / test_set.len() as f64,
        predictions,
        times: StageTimes { detection, features, prediction },
        model: trained.model,
        kmeans_trace: trained.kmeans_trace,
        svm_trace: trained.svm_trace,
        train_descriptors: trained.descriptors,
    })
}
