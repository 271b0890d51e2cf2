//! Deterministic CIFAR-format surrogate with class-dependent textures, for
//! running the pipeline where the real dataset is not available.

use std::f32::consts::TAU;

use crate::image::{CifarRecord, SplitMix64, CIFAR_CLASSES, CIFAR_PIXELS, CIFAR_SIDE};

fn pattern(class: usize, rng: &mut SplitMix64) -> Vec<f32> {
    let side = CIFAR_SIDE as f32;
    let mut u = || rng.unit_f32();
    let angle = u() * TAU;
    let (sin, cos) = angle.sin_cos();
    let (ox, oy) = (8.0 + 16.0 * u(), 8.0 + 16.0 * u());
    let phase = u() * TAU;
    let mut extra: Vec<(f32, f32, f32)> = Vec::new();
    let count = match class {
        1 => 4 + (u() * 3.0) as usize,
        9 => 3,
        _ => 0,
    };
    for _ in 0..count {
        extra.push((3.0 + u() * (side - 6.0), 3.0 + u() * (side - 6.0), if u() < 0.5 { -1.0 } else { 1.0 }));
    }
    let half = 4.0 + 6.0 * u();
    let mut out = Vec::with_capacity(CIFAR_PIXELS);
    for y in 0..CIFAR_SIDE {
        for x in 0..CIFAR_SIDE {
            let (dx, dy) = (x as f32 - ox, y as f32 - oy);
            let along = cos * dx + sin * dy;
            let across = -sin * dx + cos * dy;
            let r = (dx * dx + dy * dy).sqrt();
            let v = match class {
                0 => (-(r * r) / (2.0 * 16.0)).exp(),
                1 => {
                    1.0 - extra
                        .iter()
                        .map(|&(bx, by, _)| {
                            let d2 = (x as f32 - bx).powi(2) + (y as f32 - by).powi(2);
                            (-d2 / 3.0).exp()
                        })
                        .fold(0.0, f32::max)
                }
                2 => 0.5 + 0.5 * (along * TAU / 4.0 + phase).sin(),
                3 => 0.5 + 0.5 * (along * TAU / 11.0 + phase).sin(),
                4 => (((along / 3.0).floor() + (across / 3.0).floor()) as i32 & 1) as f32,
                5 => (((along / 8.0).floor() + (across / 8.0).floor()) as i32 & 1) as f32,
                6 => 0.5 + 0.5 * (r * TAU / 6.0 + phase).sin(),
                7 => {
                    let m = along.abs().max(across.abs());
                    if (m - half).abs() < 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                8 => {
                    if along.abs() < 2.0 || across.abs() < 2.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => {
                    0.5 + 0.5
                        * extra
                            .iter()
                            .map(|&(bx, by, s)| {
                                let d2 = (x as f32 - bx).powi(2) + (y as f32 - by).powi(2);
                                s * (-d2 / 40.0).exp()
                            })
                            .sum::<f32>()
                }
            };
            out.push(v);
        }
    }
    out
}

/// `n` records with labels `i % 10`; pixel content depends only on the
/// label and the seeded generator.
pub fn synthetic_cifar(n: usize, seed: u64) -> Vec<CifarRecord> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|i| {
            let label = i % CIFAR_CLASSES;
            let base = pattern(label, &mut rng);
            let lo = 20.0 + 60.0 * rng.unit_f32();
            let hi = 170.0 + 80.0 * rng.unit_f32();
            let tint = [0.7 + 0.3 * rng.unit_f32(), 0.7 + 0.3 * rng.unit_f32(), 0.7 + 0.3 * rng.unit_f32()];
            let mut pixels = Box::new([0u8; 3 * CIFAR_PIXELS]);
            for (c, &t) in tint.iter().enumerate() {
                for (p, &v) in base.iter().enumerate() {
                    let noise = (rng.unit_f32() - 0.5) * 16.0;
                    let value = (lo + (hi - lo) * v) * t + noise;
                    pixels[c * CIFAR_PIXELS + p] = value.round().clamp(0.0, 255.0) as u8;
                }
            }
            CifarRecord { label: label as u8, pixels }
        })
        .collect()
}
