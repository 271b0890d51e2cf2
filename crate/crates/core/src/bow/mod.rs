//! Bag-of-visual-words image classification: keypoints, descriptors,
//! k-means dictionary, word histograms and one-vs-rest linear SVMs.

pub mod kernels;
pub mod kmeans;
pub mod model;
pub mod pipeline;
pub mod sift;
pub mod svm;
pub mod synthetic;

pub use kmeans::{kmeans, quantize_histogram, Dictionary, KmeansParams, KmeansResult};
pub use model::BowModel;
pub use pipeline::{run_pipeline, train_model, PipelineConfig, PipelineReport, StageTimes, TrainedModel};
pub use sift::{compute_descriptors, detect_keypoints, Descriptor, Keypoint, DESCRIPTOR_LEN};
pub use svm::{svm_predict, svm_train, LinearSvmModel, SvmParams, SvmTraining};
pub use synthetic::synthetic_cifar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BowError {
    #[error("expected a single-channel image, got {0} channels")]
    Channels(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("need at least k={k} samples, got {samples}")]
    TooFewSamples { samples: usize, k: usize },
    #[error("dictionary must have at least one word of non-zero dimension")]
    EmptyDictionary,
    #[error("empty training or test data")]
    EmptyData,
    #[error("label {0} is outside 0..9")]
    BadLabel(u8),
    #[error("regularization constant must be positive and finite, got {0}")]
    BadHyperparameter(f32),
    #[error("non-finite model parameter")]
    NonFinite,
    #[error("model blob: {0}")]
    Blob(String),
}
