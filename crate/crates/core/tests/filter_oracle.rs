mod common;

use common::oracles::{gauss5_sigma1, naive_filter};
use proptest::prelude::*;
use univec::filter::{filter2d, filter2d_float_plane, BorderPolicy, KernelF32, Sigma};
use univec::image::{synth_image, ImageU8, SplitMix64};
use univec::Variant;

#[test]
fn gaussian_5_sigma_1_matches_high_precision() {
    let k = KernelF32::gaussian(5, Sigma::Explicit(1.0)).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let got = k.at(i, j) as f64;
            assert!((got - gauss5_sigma1(i, j)).abs() <= 1e-7, "({i},{j}) {got}");
        }
    }
}

#[test]
fn gaussian_sum_and_symmetry() {
    for size in (1..=13).step_by(2) {
        for sigma in [Sigma::Auto, Sigma::Explicit(0.5), Sigma::Explicit(1.0), Sigma::Explicit(4.0)] {
            let k = KernelF32::gaussian(size, sigma).unwrap();
            let sum: f64 = k.coeffs().iter().map(|&c| c as f64).sum();
            assert!((sum - 1.0).abs() <= 1e-6, "k={size} {sigma:?} sum={sum}");
            let n = size - 1;
            for i in 0..size {
                for j in 0..size {
                    let v = k.at(i, j);
                    for (a, b) in [(j, i), (n - i, j), (i, n - j), (n - j, n - i)] {
                        assert_eq!(v, k.at(a, b));
                    }
                }
            }
        }
    }
}

#[test]
fn random_images_match_naive_oracle() {
    let mut rng = SplitMix64::new(77);
    for size in (3..=13).step_by(2) {
        for ch in [1, 3] {
            let w = 16 + rng.below(17) as usize;
            let h = 16 + rng.below(17) as usize;
            let img = synth_image(w, h, ch, rng.next_u64()).unwrap();
            let k = KernelF32::gaussian(size, Sigma::Auto).unwrap();
            for (border, reflect) in [(BorderPolicy::Reflect101, true), (BorderPolicy::Replicate, false)] {
                let want = naive_filter(&img, size, k.coeffs(), reflect);
                for v in Variant::ALL {
                    let got = filter2d(&img, &k, border, v).unwrap();
                    assert_eq!(got.data(), &want[..], "k={size} ch={ch} {border:?} {v:?}");
                }
            }
        }
    }
}

#[test]
fn arbitrary_kernels_saturate_identically() {
    // Negative and large coefficients push accumulators far outside [0, 255].
    let mut rng = SplitMix64::new(5);
    for _ in 0..20 {
        let coeffs: Vec<f32> = (0..25).map(|_| rng.unit_f32() * 4.0 - 2.0).collect();
        let k = KernelF32::new(5, coeffs.clone()).unwrap();
        let img = synth_image(21, 19, 1, rng.next_u64()).unwrap();
        let want = naive_filter(&img, 5, &coeffs, true);
        for v in Variant::ALL {
            assert_eq!(filter2d(&img, &k, BorderPolicy::Reflect101, v).unwrap().data(), &want[..]);
        }
    }
}

#[test]
fn unsupported_channels_rejected() {
    // ImageU8 cannot hold 2 channels, so the error path is only reachable
    // through the constructor.
    assert!(ImageU8::new(2, 2, 2, vec![0; 8]).is_err());
}

#[test]
fn linearity_at_float_stage() {
    let img = synth_image(40, 30, 1, 3).unwrap();
    let k = KernelF32::gaussian(5, Sigma::Auto).unwrap();
    let base = filter2d_float_plane(&img, &k, BorderPolicy::Reflect101, Variant::Scalar).unwrap();
    // Power-of-two scaling is exact in binary floating point.
    for a in [0.5f32, 2.0, 8.0] {
        let scaled = filter2d_float_plane(&img, &k.scaled(a), BorderPolicy::Reflect101, Variant::VecWide).unwrap();
        for (s, b) in scaled.iter().zip(&base) {
            assert_eq!(*s, a * b);
        }
    }
    // General scale factors agree to float rounding.
    let scaled = filter2d_float_plane(&img, &k.scaled(0.3), BorderPolicy::Reflect101, Variant::VecNarrow).unwrap();
    for (s, b) in scaled.iter().zip(&base) {
        assert!((s - 0.3 * b).abs() <= 1e-4 * b.abs().max(1.0));
    }
}

#[test]
fn shift_covariance_on_interior() {
    let img = synth_image(48, 40, 1, 12).unwrap();
    let k = KernelF32::gaussian(7, Sigma::Auto).unwrap();
    let (dx, dy) = (3, 2);
    let mut shifted = ImageU8::filled(48, 40, 1, 0).unwrap();
    for y in 0..40 - dy {
        for x in 0..48 - dx {
            shifted.set(x + dx, y + dy, 0, img.get(x, y, 0));
        }
    }
    let a = filter2d(&img, &k, BorderPolicy::Reflect101, Variant::VecWide).unwrap();
    let b = filter2d(&shifted, &k, BorderPolicy::Reflect101, Variant::VecWide).unwrap();
    let r = 3;
    for y in r..40 - dy - r {
        for x in r..48 - dx - r {
            assert_eq!(a.get(x, y, 0), b.get(x + dx, y + dy, 0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variants_agree(w in 1usize..40, h in 1usize..20, ch in prop::sample::select(vec![1usize, 3]),
                      half in 0usize..5, seed: u64, replicate: bool) {
        let img = synth_image(w, h, ch, seed).unwrap();
        let k = KernelF32::gaussian(2 * half + 1, Sigma::Auto).unwrap();
        let border = if replicate { BorderPolicy::Replicate } else { BorderPolicy::Reflect101 };
        let s = filter2d(&img, &k, border, Variant::Scalar).unwrap();
        prop_assert_eq!(&s, &filter2d(&img, &k, border, Variant::VecNarrow).unwrap());
        prop_assert_eq!(&s, &filter2d(&img, &k, border, Variant::VecWide).unwrap());
    }
}
