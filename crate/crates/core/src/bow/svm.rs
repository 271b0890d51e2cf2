//! One-vs-rest linear SVMs trained with Pegasos-style subgradient steps.
//!
//! The bias is learned as the weight of a constant 1 feature, so it is
//! regularized together with the weights. Each epoch reports the objective
//! of the running average of all iterates so far.

use super::kernels;
use super::BowError;
use crate::image::{SplitMix64, CIFAR_CLASSES};
use crate::Variant;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f32,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, epochs: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    classes: usize,
    dim: usize,
    weights: Vec<f32>,
    bias: Vec<f32>,
    c: f32,
}

impl LinearSvmModel {
    pub fn new(classes: usize, dim: usize, weights: Vec<f32>, bias: Vec<f32>, c: f32) -> Result<Self, BowError> {
        if classes == 0 || dim == 0 {
            return Err(BowError::EmptyData);
        }
        if weights.len() != classes * dim {
            return Err(BowError::DimMismatch { expected: classes * dim, got: weights.len() });
        }
        if bias.len() != classes {
            return Err(BowError::DimMismatch { expected: classes, got: bias.len() });
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(BowError::NonFinite);
        }
        Ok(Self { classes, dim, weights, bias, c })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self) -> f32 {
        self.c
    }

    pub fn weights(&self, class: usize) -> &[f32] {
        &self.weights[class * self.dim..(class + 1) * self.dim]
    }

    pub fn bias(&self, class: usize) -> f32 {
        self.bias[class]
    }

    pub fn score(&self, class: usize, h: &[f32], variant: Variant) -> f32 {
        kernels::dot(self.weights(class), h, variant) + self.bias[class]
    }
}

#[derive(Debug, Clone)]
pub struct SvmTraining {
    pub model: LinearSvmModel,
    /// Best objective seen up to each epoch, summed over classes.
    pub objective_trace: Vec<f64>,
    /// Objective of each epoch's averaged iterate.
    pub raw_trace: Vec<f64>,
}

fn shuffled(m: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}

fn dot_aug(w: &[f64], x: &[f32]) -> f64 {
    let (b, w) = w.split_last().expect("augmented weights");
    w.iter().zip(x).map(|(w, &x)| w * f64::from(x)).sum::<f64>() + b
}

fn objective(w: &[f64], features: &[f32], dim: usize, y: &[f64], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = features.chunks_exact(dim).zip(y).map(|(x, &y)| (1.0 - y * dot_aug(w, x)).max(0.0)).sum();
    reg + hinge / y.len() as f64
}

struct ClassRun {
    best: Vec<f64>,
    best_obj: Vec<f64>,
    raw_obj: Vec<f64>,
}

fn train_class(features: &[f32], dim: usize, y: &[f64], order: &[usize], lambda: f64, epochs: usize) -> ClassRun {
    let mut w = vec![0.0f64; dim + 1];
    let mut avg = vec![0.0f64; dim + 1];
    let mut best = avg.clone();
    let mut best_val = f64::INFINITY;
    let (mut best_obj, mut raw_obj) = (Vec::with_capacity(epochs), Vec::with_capacity(epochs));
    let mut t = 0u64;
    for _ in 0..epochs {
        for &i in order {
            t += 1;
            let x = &features[i * dim..(i + 1) * dim];
            let eta = 1.0 / (lambda * t as f64);
            let margin = y[i] * dot_aug(&w, x);
            let shrink = 1.0 - 1.0 / t as f64;
            for v in w.iter_mut() {
                *v *= shrink;
            }
            if margin < 1.0 {
                for (v, &xj) in w.iter_mut().zip(x) {
                    *v += eta * y[i] * f64::from(xj);
                }
                w[dim] += eta * y[i];
            }
            let inv = 1.0 / t as f64;
            for (a, v) in avg.iter_mut().zip(&w) {
                *a += (v - *a) * inv;
            }
        }
        let val = objective(&avg, features, dim, y, lambda);
        raw_obj.push(val);
        if val < best_val {
            best_val = val;
            best.copy_from_slice(&avg);
        }
        best_obj.push(best_val);
    }
    ClassRun { best, best_obj, raw_obj }
}

/// Trains one binary SVM per class on `dim`-wide feature rows.
pub fn svm_train(features: &[f32], dim: usize, labels: &[u8], params: &SvmParams) -> Result<SvmTraining, BowError> {
    let m = labels.len();
    if m == 0 || dim == 0 || params.epochs == 0 {
        return Err(BowError::EmptyData);
    }
    if features.len() != m * dim {
        return Err(BowError::DimMismatch { expected: m * dim, got: features.len() });
    }
    if let Some(&l) = labels.iter().find(|&&l| l as usize >= CIFAR_CLASSES) {
        return Err(BowError::BadLabel(l));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(BowError::BadHyperparameter(params.c));
    }
    let lambda = 1.0 / (f64::from(params.c) * m as f64);
    let order = shuffled(m, params.seed);
    let mut weights = Vec::with_capacity(CIFAR_CLASSES * dim);
    let mut bias = Vec::with_capacity(CIFAR_CLASSES);
    let mut objective_trace = vec![0.0; params.epochs];
    let mut raw_trace = vec![0.0; params.epochs];
    for class in 0..CIFAR_CLASSES {
        let y: Vec<f64> = labels.iter().map(|&l| if l as usize == class { 1.0 } else { -1.0 }).collect();
        let run = train_class(features, dim, &y, &order, lambda, params.epochs);
        weights.extend(run.best[..dim].iter().map(|&v| v as f32));
        bias.push(run.best[dim] as f32);
        for (t, v) in objective_trace.iter_mut().zip(&run.best_obj) {
            *t += v;
        }
        for (t, v) in raw_trace.iter_mut().zip(&run.raw_obj) {
            *t += v;
        }
    }
    let model = LinearSvmModel::new(CIFAR_CLASSES, dim, weights, bias, params.c)?;
    Ok(SvmTraining { model, objective_trace, raw_trace })
}

/// Highest-scoring class; ties go to the lowest class id.
pub fn svm_predict(model: &LinearSvmModel, h: &[f32], variant: Variant) -> Result<usize, BowError> {
    if h.len() != model.dim {
        return Err(BowError::DimMismatch { expected: model.dim, got: h.len() });
    }
    let mut best = (0, f32::NEG_INFINITY);
    for c in 0..model.classes {
        let s = model.score(c, h, variant);
        if s > best.1 {
            best = (c, s);
        }
    }
    Ok(best.0)
}
