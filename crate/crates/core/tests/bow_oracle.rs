mod common;

use common::oracles;
use univec::bow::{
    compute_descriptors, detect_keypoints, kmeans, quantize_histogram, run_pipeline, svm_predict, synthetic_cifar,
    Descriptor, Dictionary, Keypoint, KmeansParams, LinearSvmModel, PipelineConfig, DESCRIPTOR_LEN,
};
use univec::image::{CifarRecord, ImageU8, SplitMix64};
use univec::Variant;

fn blob(side: usize, cx: f32, cy: f32, sigma: f32) -> ImageU8 {
    let mut data = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            let d2 = (x as f32 - cx).powi(2) + (y as f32 - cy).powi(2);
            data.push((20.0 + 200.0 * (-d2 / (2.0 * sigma * sigma)).exp()).round() as u8);
        }
    }
    ImageU8::new(side, side, 1, data).unwrap()
}

#[test]
fn blob_yields_central_keypoint() {
    let img = blob(64, 32.0, 32.0, 3.0);
    for v in Variant::ALL {
        let kps = detect_keypoints(&img, v).unwrap();
        assert!(kps.iter().any(|k| (k.x - 32.0).abs() <= 2.0 && (k.y - 32.0).abs() <= 2.0), "{v:?}: {kps:?}");
        for k in &kps {
            assert!(k.x >= 0.0 && k.x < 64.0 && k.y >= 0.0 && k.y < 64.0 && k.scale > 0.0);
            assert!((0.0..std::f32::consts::TAU).contains(&k.orientation));
        }
    }
}

#[test]
fn detection_order_is_sorted_and_variant_independent() {
    let rec = &synthetic_cifar(30, 3)[..];
    for r in rec {
        let img = univec::image::cifar_to_gray(r);
        let base = detect_keypoints(&img, Variant::Scalar).unwrap();
        assert!(base.windows(2).all(|w| (w[0].y, w[0].x, w[0].scale) <= (w[1].y, w[1].x, w[1].scale)));
        assert_eq!(base, detect_keypoints(&img, Variant::VecWide).unwrap());
        assert_eq!(base, detect_keypoints(&img, Variant::VecNarrow).unwrap());
    }
}

/// Smooth random texture: box-blurred noise.
fn texture(side: usize, seed: u64) -> ImageU8 {
    let mut rng = SplitMix64::new(seed);
    let noise: Vec<f32> = (0..side * side).map(|_| rng.unit_f32()).collect();
    let r = 3isize;
    let mut data = Vec::with_capacity(side * side);
    for y in 0..side as isize {
        for x in 0..side as isize {
            let mut acc = 0.0;
            let mut n = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (sx, sy) = (x + dx, y + dy);
                    if sx >= 0 && sy >= 0 && sx < side as isize && sy < side as isize {
                        acc += noise[sy as usize * side + sx as usize];
                        n += 1.0;
                    }
                }
            }
            data.push((255.0 * acc / n).round() as u8);
        }
    }
    ImageU8::new(side, side, 1, data).unwrap()
}

/// Pixel `(x, y)` moves to `(side - 1 - y, x)`: a +90 degree turn in image
/// coordinates about the centre.
fn rotate90(img: &ImageU8) -> ImageU8 {
    let s = img.width();
    let mut out = ImageU8::filled(s, s, 1, 0).unwrap();
    for y in 0..s {
        for x in 0..s {
            out.set(s - 1 - y, x, 0, img.get(x, y, 0));
        }
    }
    out
}

fn l2(a: &Descriptor, b: &Descriptor) -> f32 {
    a.0.iter().zip(&b.0).map(|(x, y)| (x - y) * (x - y)).sum::<f32>().sqrt()
}

#[test]
fn descriptor_invariant_under_grid_rotation() {
    for seed in 0..5 {
        let img = texture(64, seed);
        let rot = rotate90(&img);
        for theta in [0.0f32, 0.3, 2.0] {
            let kp = Keypoint { x: 31.5, y: 31.5, scale: 1.5, orientation: theta };
            let kr = Keypoint { orientation: (theta + std::f32::consts::FRAC_PI_2) % std::f32::consts::TAU, ..kp };
            let a = compute_descriptors(&img, &[kp], Variant::VecWide).unwrap();
            let b = compute_descriptors(&rot, &[kr], Variant::VecWide).unwrap();
            let d = l2(&a[0], &b[0]);
            assert!(d < 0.05, "seed {seed} theta {theta}: distance {d}");
        }
    }
}

#[test]
fn descriptors_are_unit_and_non_negative() {
    for r in synthetic_cifar(20, 8) {
        let img = univec::image::cifar_to_gray(&r);
        let kps = detect_keypoints(&img, Variant::Scalar).unwrap();
        for d in compute_descriptors(&img, &kps, Variant::Scalar).unwrap() {
            assert!((d.norm() - 1.0).abs() <= 1e-5);
            assert!(d.0.iter().all(|&v| v >= 0.0));
        }
    }
}

fn random_rows(rng: &mut SplitMix64, n: usize, dim: usize) -> Vec<Vec<f32>> {
    (0..n).map(|_| (0..dim).map(|_| rng.unit_f32() * 4.0 - 2.0).collect()).collect()
}

#[test]
fn kmeans_matches_lloyd_oracle() {
    let mut rng = SplitMix64::new(11);
    for run in 0..40u64 {
        let n = 4 + (run as usize % 29);
        let k = 1 + (run as usize % 4);
        let dim = [2, 3, 8, 128][run as usize % 4];
        let rows = random_rows(&mut rng, n, dim);
        let flat: Vec<f32> = rows.concat();
        for v in Variant::ALL {
            let params = KmeansParams { k, max_iters: 50, seed: run, variant: v, workers: 1 };
            let got = kmeans(&flat, dim, &params).unwrap();
            let want = oracles::lloyd(&rows, k, 50, run);
            assert_eq!(got.assignments, want.labels, "run {run} {v:?}");
            for c in 0..k {
                assert_eq!(got.dictionary.centroid(c), &want.centroids[c][..], "run {run} centroid {c}");
            }
            assert_eq!(got.objective_trace.len(), want.trace.len());
            for (a, b) in got.objective_trace.iter().zip(&want.trace) {
                assert!((a - b).abs() <= 1e-4 * b.max(1.0), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn kmeans_objective_monotone_and_worker_independent() {
    let mut rng = SplitMix64::new(12);
    for seed in 0..10u64 {
        let rows = random_rows(&mut rng, 700, 16);
        let flat: Vec<f32> = rows.concat();
        let p1 = KmeansParams { k: 12, max_iters: 40, seed, variant: Variant::VecNarrow, workers: 1 };
        let a = kmeans(&flat, 16, &p1).unwrap();
        assert!(a.objective_trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", a.objective_trace);
        let b = kmeans(&flat, 16, &KmeansParams { workers: 3, ..p1 }).unwrap();
        assert_eq!(a.dictionary, b.dictionary);
        assert_eq!(a.objective_trace, b.objective_trace);
    }
}

#[test]
fn quantize_matches_brute_force() {
    let mut rng = SplitMix64::new(13);
    let words = random_rows(&mut rng, 20, DESCRIPTOR_LEN);
    let dict = Dictionary::new(20, DESCRIPTOR_LEN, words.concat()).unwrap();
    let descs: Vec<Descriptor> =
        random_rows(&mut rng, 300, DESCRIPTOR_LEN).into_iter().map(|r| Descriptor(r.try_into().unwrap())).collect();
    let mut counts = vec![0usize; 20];
    for d in &descs {
        let want = oracles::brute_nearest(&d.0, &words);
        for v in Variant::ALL {
            assert_eq!(dict.nearest(&d.0, v).0, want);
        }
        counts[want] += 1;
    }
    for v in Variant::ALL {
        let h = quantize_histogram(&descs, &dict, v).unwrap();
        assert!((h.iter().sum::<f32>() - 1.0).abs() <= 1e-6);
        for (hv, &c) in h.iter().zip(&counts) {
            assert_eq!(*hv, c as f32 / 300.0);
        }
    }
}

#[test]
fn predict_matches_scalar_argmax() {
    let mut rng = SplitMix64::new(14);
    for case in 0..1000 {
        let dim = 1 + case % 70;
        let weights = random_rows(&mut rng, 10, dim);
        let bias: Vec<f32> = (0..10).map(|_| rng.unit_f32() - 0.5).collect();
        let h: Vec<f32> = (0..dim).map(|_| rng.unit_f32()).collect();
        let model = LinearSvmModel::new(10, dim, weights.concat(), bias.clone(), 1.0).unwrap();
        let want = oracles::scalar_argmax(&weights, &bias, &h);
        for v in Variant::ALL {
            assert_eq!(svm_predict(&model, &h, v).unwrap(), want, "case {case}");
        }
    }
}

#[test]
fn pipeline_memorizes_small_set() {
    let data = synthetic_cifar(10, 21);
    let mut cfg = PipelineConfig::new(8, 1);
    cfg.variant = Variant::VecWide;
    let r = run_pipeline(&data, &data, &cfg).unwrap();
    assert!(r.accuracy >= 0.5, "accuracy {}", r.accuracy);
}

#[test]
fn pipeline_handles_keypointless_images_and_is_deterministic() {
    let mut train = synthetic_cifar(60, 22);
    let flat = CifarRecord { label: 3, pixels: Box::new([128; 3072]) };
    train.push(flat.clone());
    let test = vec![flat, synthetic_cifar(5, 23).remove(0)];
    let mut cfg = PipelineConfig::new(10, 4);
    let a = run_pipeline(&train, &test, &cfg).unwrap();
    cfg.workers = 4;
    cfg.variant = Variant::VecNarrow;
    let b = run_pipeline(&train, &test, &cfg).unwrap();
    assert_eq!(a.predictions, b.predictions);
    assert_eq!(a.model.to_bytes(), b.model.to_bytes());
}
