//! Simplified SIFT: DoG extrema without sub-pixel refinement, nearest-bin
//! orientation, 4x4x8 descriptors.
//!
//! The input is first doubled with half-pixel-centred bilinear
//! interpolation. Octave `o` then samples the image at spacing `2^(o-1)`,
//! and its pixel `X` sits at image coordinate `2^(o-1) * X - 0.25`.

use std::f32::consts::TAU;

use super::BowError;
use crate::image::ImageU8;
use crate::vecabi::{narrow, wide, FloatWord};
use crate::Variant;

pub const SIGMA0: f32 = 1.6;
/// Detection levels per octave; each octave holds `INTERVALS + 3` blurs.
pub const INTERVALS: usize = 3;
pub const CONTRAST_THRESHOLD: f32 = 0.03;
pub const EDGE_RATIO: f32 = 10.0;
/// Images (and octaves) with a side below this are not searched.
pub const MIN_SIDE: usize = 16;
pub const DESCRIPTOR_LEN: usize = 128;

const ASSUMED_BLUR: f32 = 0.5;
const ORI_BINS: usize = 36;
const DESC_SAMPLES: usize = 16;
const DESC_CELLS: usize = 4;
const DESC_ORI_BINS: usize = 8;
/// Descriptor sample spacing in units of the level sigma.
const SAMPLE_SPACING: f32 = 0.75;
const CLAMP: f32 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f32,
    pub y: f32,
    pub scale: f32,
    pub orientation: f32,
}

#[derive(Clone, PartialEq)]
pub struct Descriptor(pub [f32; DESCRIPTOR_LEN]);

impl std::fmt::Debug for Descriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Descriptor(|v|={:.6})", self.norm())
    }
}

impl Descriptor {
    pub fn as_slice(&self) -> &[f32] {
        &self.0
    }

    pub fn norm(&self) -> f32 {
        self.0.iter().map(|v| v * v).sum::<f32>().sqrt()
    }
}

#[derive(Clone)]
struct Plane {
    w: usize,
    h: usize,
    v: Vec<f32>,
}

impl Plane {
    #[inline]
    fn at(&self, x: usize, y: usize) -> f32 {
        self.v[y * self.w + x]
    }

    /// 2x bilinear upsampling with half-pixel-centred samples and clamped
    /// borders, so the result stays symmetric under flips and transposes.
    fn upsample(&self) -> Plane {
        let up = |src: &[f32], n: usize, at: &dyn Fn(usize) -> usize, out: &mut Vec<f32>| {
            for x in 0..n {
                let l = src[at(x.saturating_sub(1))];
                let c = src[at(x)];
                let r = src[at((x + 1).min(n - 1))];
                out.push(0.75 * c + 0.25 * l);
                out.push(0.75 * c + 0.25 * r);
            }
        };
        let (w, h) = (self.w, self.h);
        let mut rows = Vec::with_capacity(2 * w * h);
        for y in 0..h {
            up(&self.v[y * w..(y + 1) * w], w, &|x| x, &mut rows);
        }
        let w2 = 2 * w;
        let mut cols = vec![0.0f32; w2 * 2 * h];
        let mut column = Vec::with_capacity(2 * h);
        for x in 0..w2 {
            column.clear();
            up(&rows, h, &|y| y * w2 + x, &mut column);
            for (y, v) in column.iter().enumerate() {
                cols[y * w2 + x] = *v;
            }
        }
        Plane { w: w2, h: 2 * h, v: cols }
    }

    fn downsample(&self) -> Plane {
        let (w, h) = (self.w / 2, self.h / 2);
        let mut v = Vec::with_capacity(w * h);
        for y in 0..h {
            v.extend((0..w).map(|x| self.at(2 * x, 2 * y)));
        }
        Plane { w, h, v }
    }
}

fn gauss_1d(sigma: f32) -> Vec<f32> {
    let r = (3.0 * sigma).ceil().max(1.0) as isize;
    let s2 = 2.0 * f64::from(sigma) * f64::from(sigma);
    let raw: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / s2).exp()).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|v| (v / sum) as f32).collect()
}

fn reflect(i: isize, n: usize) -> usize {
    crate::filter::BorderPolicy::Reflect101.resolve(i, n)
}

/// `out[x] = sum_j k[j] * src[j][x]`, taps accumulated in order.
fn taps_scalar(srcs: &[&[f32]], k: &[f32], out: &mut [f32], from: usize) {
    for x in from..out.len() {
        let mut acc = 0.0f32;
        for (c, s) in k.iter().zip(srcs) {
            acc += c * s[x];
        }
        out[x] = acc;
    }
}

fn taps_vector<V: FloatWord<Elem = f32>>(srcs: &[&[f32]], k: &[f32], out: &mut [f32]) {
    let n = out.len();
    let mut x = 0;
    while x + V::LANES <= n {
        let mut acc = V::splat(0.0);
        for (c, s) in k.iter().zip(srcs) {
            acc = acc.add(V::splat(*c).mul(V::from_slice(&s[x..])));
        }
        acc.write_to(&mut out[x..]);
        x += V::LANES;
    }
    taps_scalar(srcs, k, out, x);
}

fn taps(srcs: &[&[f32]], k: &[f32], out: &mut [f32], variant: Variant) {
    match variant {
        Variant::Scalar => taps_scalar(srcs, k, out, 0),
        Variant::VecNarrow => taps_vector::<narrow::F32x4>(srcs, k, out),
        Variant::VecWide => taps_vector::<wide::F32x16>(srcs, k, out),
    }
}

/// Separable Gaussian blur with reflect-101 borders.
fn blur(p: &Plane, sigma: f32, variant: Variant) -> Plane {
    let k = gauss_1d(sigma);
    let r = (k.len() / 2) as isize;
    let (w, h) = (p.w, p.h);
    let mut tmp = vec![0.0f32; w * h];
    let mut padded = vec![0.0f32; w + 2 * r as usize];
    for y in 0..h {
        let row = &p.v[y * w..(y + 1) * w];
        for (i, v) in padded.iter_mut().enumerate() {
            *v = row[reflect(i as isize - r, w)];
        }
        let srcs: Vec<&[f32]> = (0..k.len()).map(|j| &padded[j..j + w]).collect();
        taps(&srcs, &k, &mut tmp[y * w..(y + 1) * w], variant);
    }
    let mut v = vec![0.0f32; w * h];
    for y in 0..h {
        let srcs: Vec<&[f32]> = (0..k.len())
            .map(|j| {
                let yy = reflect(y as isize + j as isize - r, h);
                &tmp[yy * w..(yy + 1) * w]
            })
            .collect();
        taps(&srcs, &k, &mut v[y * w..(y + 1) * w], variant);
    }
    Plane { w, h, v }
}

struct Octave {
    gauss: Vec<Plane>,
    dog: Vec<Plane>,
}

fn level_sigma(s: usize) -> f32 {
    SIGMA0 * 2f32.powf(s as f32 / INTERVALS as f32)
}

/// Image coordinate of pixel `p` in octave `o`.
fn to_image(p: usize, o: usize) -> f32 {
    p as f32 * octave_step(o) - 0.25
}

fn to_octave(c: f32, o: usize) -> f32 {
    (c + 0.25) / octave_step(o)
}

fn octave_step(o: usize) -> f32 {
    (1u32 << o) as f32 / 2.0
}

fn scale_space(img: &ImageU8, variant: Variant) -> Vec<Octave> {
    if img.width().min(img.height()) < MIN_SIDE {
        return Vec::new();
    }
    let base = Plane { w: img.width(), h: img.height(), v: img.data().iter().map(|&p| f32::from(p) / 255.0).collect() }
        .upsample();
    let assumed = 2.0 * ASSUMED_BLUR;
    let mut base = blur(&base, (SIGMA0 * SIGMA0 - assumed * assumed).sqrt(), variant);
    let mut octaves = Vec::new();
    while base.w.min(base.h) >= MIN_SIDE {
        let mut gauss = vec![base];
        for s in 1..INTERVALS + 3 {
            let (a, b) = (level_sigma(s - 1), level_sigma(s));
            gauss.push(blur(&gauss[s - 1], (b * b - a * a).sqrt(), variant));
        }
        let dog = gauss
            .windows(2)
            .map(|g| Plane { w: g[0].w, h: g[0].h, v: g[1].v.iter().zip(&g[0].v).map(|(b, a)| b - a).collect() })
            .collect();
        base = gauss[INTERVALS].downsample();
        octaves.push(Octave { gauss, dog });
    }
    octaves
}

fn is_extremum(dog: &[Plane], s: usize, x: usize, y: usize) -> bool {
    let v = dog[s].at(x, y);
    let (mut is_max, mut is_min) = (true, true);
    for plane in &dog[s - 1..=s + 1] {
        for yy in y - 1..=y + 1 {
            for xx in x - 1..=x + 1 {
                if std::ptr::eq(plane, &dog[s]) && xx == x && yy == y {
                    continue;
                }
                let n = plane.at(xx, yy);
                is_max &= v > n;
                is_min &= v < n;
            }
        }
        if !is_max && !is_min {
            return false;
        }
    }
    true
}

fn passes_edge_test(d: &Plane, x: usize, y: usize) -> bool {
    let v = d.at(x, y);
    let dxx = d.at(x + 1, y) + d.at(x - 1, y) - 2.0 * v;
    let dyy = d.at(x, y + 1) + d.at(x, y - 1) - 2.0 * v;
    let dxy = (d.at(x + 1, y + 1) - d.at(x - 1, y + 1) - d.at(x + 1, y - 1) + d.at(x - 1, y - 1)) / 4.0;
    let tr = dxx + dyy;
    let det = dxx * dyy - dxy * dxy;
    det > 0.0 && tr * tr * EDGE_RATIO < (EDGE_RATIO + 1.0) * (EDGE_RATIO + 1.0) * det
}

/// Central-difference gradient, zero on the outermost ring and outside.
#[inline]
fn gradient(g: &Plane, x: isize, y: isize) -> (f32, f32) {
    if x < 1 || y < 1 || x >= g.w as isize - 1 || y >= g.h as isize - 1 {
        return (0.0, 0.0);
    }
    let (x, y) = (x as usize, y as usize);
    (g.at(x + 1, y) - g.at(x - 1, y), g.at(x, y + 1) - g.at(x, y - 1))
}

fn wrap_angle(a: f32) -> f32 {
    let a = a.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn dominant_orientation(g: &Plane, x: usize, y: usize, sigma: f32) -> f32 {
    let sigma = 1.5 * sigma;
    let r = (3.0 * sigma).round() as isize;
    let mut hist = [0.0f32; ORI_BINS];
    for dy in -r..=r {
        for dx in -r..=r {
            let (gx, gy) = gradient(g, x as isize + dx, y as isize + dy);
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let weight = (-((dx * dx + dy * dy) as f32) / (2.0 * sigma * sigma)).exp();
            let bin = (wrap_angle(gy.atan2(gx)) * ORI_BINS as f32 / TAU).round() as usize % ORI_BINS;
            hist[bin] += weight * mag;
        }
    }
    let mut best = 0;
    for (i, &v) in hist.iter().enumerate() {
        if v > hist[best] {
            best = i;
        }
    }
    best as f32 * TAU / ORI_BINS as f32
}

fn check_gray(img: &ImageU8) -> Result<(), BowError> {
    if img.channels() != 1 {
        return Err(BowError::Channels(img.channels()));
    }
    Ok(())
}

fn detect_in(octaves: &[Octave]) -> Vec<Keypoint> {
    let mut out = Vec::new();
    for (o, oct) in octaves.iter().enumerate() {
        let (w, h) = (oct.dog[0].w, oct.dog[0].h);
        for s in 1..=INTERVALS {
            let d = &oct.dog[s];
            for y in 1..h - 1 {
                for x in 1..w - 1 {
                    if d.at(x, y).abs() < CONTRAST_THRESHOLD
                        || !is_extremum(&oct.dog, s, x, y)
                        || !passes_edge_test(d, x, y)
                    {
                        continue;
                    }
                    let sigma = level_sigma(s);
                    out.push(Keypoint {
                        x: to_image(x, o),
                        y: to_image(y, o),
                        scale: sigma * octave_step(o),
                        orientation: dominant_orientation(&oct.gauss[s], x, y, sigma),
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)).then(a.scale.total_cmp(&b.scale)));
    out
}

/// Detects keypoints sorted by `(y, x, scale)`. Images smaller than
/// `MIN_SIDE` on either side yield no keypoints.
pub fn detect_keypoints(img: &ImageU8, variant: Variant) -> Result<Vec<Keypoint>, BowError> {
    check_gray(img)?;
    Ok(detect_in(&scale_space(img, variant)))
}

/// Bilinear gradient sample; neighbours outside the image contribute zero.
fn gradient_at(g: &Plane, px: f32, py: f32) -> (f32, f32) {
    let (x0, y0) = (px.floor(), py.floor());
    let (fx, fy) = (px - x0, py - y0);
    let (x0, y0) = (x0 as isize, y0 as isize);
    let mut acc = (0.0, 0.0);
    for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
        for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
            let w = wx * wy;
            if w == 0.0 {
                continue;
            }
            let (gx, gy) = gradient(g, x0 + dx, y0 + dy);
            acc.0 += w * gx;
            acc.1 += w * gy;
        }
    }
    acc
}

fn normalize(v: &mut [f32]) -> bool {
    let n = v.iter().map(|x| f64::from(*x) * f64::from(*x)).sum::<f64>().sqrt();
    if n == 0.0 {
        return false;
    }
    for x in v.iter_mut() {
        *x = (f64::from(*x) / n) as f32;
    }
    true
}

fn describe(octaves: &[Octave], kp: &Keypoint) -> Option<Descriptor> {
    // Level index counted from the first octave; a level shared by two
    // octaves is read from the finer one.
    let idx = ((2.0 * kp.scale / SIGMA0).log2() * INTERVALS as f32).round().max(0.0) as usize;
    let o = (idx.saturating_sub(1) / INTERVALS).min(octaves.len() - 1);
    let s = (idx - o * INTERVALS).min(INTERVALS + 2);
    let g = &octaves[o].gauss[s];
    let (cx, cy) = (to_octave(kp.x, o), to_octave(kp.y, o));
    let spacing = SAMPLE_SPACING * level_sigma(s);
    let (sin, cos) = kp.orientation.sin_cos();
    let half = DESC_SAMPLES as f32 / 2.0;
    let cell = (DESC_SAMPLES / DESC_CELLS) as f32;

    let mut hist = [0.0f32; DESCRIPTOR_LEN];
    for a in 0..DESC_SAMPLES {
        for b in 0..DESC_SAMPLES {
            let u = b as f32 + 0.5 - half;
            let v = a as f32 + 0.5 - half;
            let px = cx + spacing * (cos * u - sin * v);
            let py = cy + spacing * (sin * u + cos * v);
            let (gx, gy) = gradient_at(g, px, py);
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let rel = wrap_angle(gy.atan2(gx) - kp.orientation);
            let obin = (rel * DESC_ORI_BINS as f32 / TAU).round() as usize % DESC_ORI_BINS;
            let weight = mag * (-(u * u + v * v) / (2.0 * half * half)).exp();
            // Continuous cell coordinates, centred on cell centres.
            let fx = (u + half) / cell - 0.5;
            let fy = (v + half) / cell - 0.5;
            let (x0, y0) = (fx.floor(), fy.floor());
            let (tx, ty) = (fx - x0, fy - y0);
            for (cy_, wy) in [(y0 as isize, 1.0 - ty), (y0 as isize + 1, ty)] {
                for (cx_, wx) in [(x0 as isize, 1.0 - tx), (x0 as isize + 1, tx)] {
                    if !(0..DESC_CELLS as isize).contains(&cx_) || !(0..DESC_CELLS as isize).contains(&cy_) {
                        continue;
                    }
                    let i = (cy_ as usize * DESC_CELLS + cx_ as usize) * DESC_ORI_BINS + obin;
                    hist[i] += weight * wx * wy;
                }
            }
        }
    }
    if !normalize(&mut hist) {
        return None;
    }
    for v in hist.iter_mut() {
        *v = v.min(CLAMP);
    }
    normalize(&mut hist);
    Some(Descriptor(hist))
}

/// Descriptors for `keypoints`; keypoints whose patch has no gradient are
/// dropped, so the result may be shorter than the input.
pub fn compute_descriptors(
    img: &ImageU8,
    keypoints: &[Keypoint],
    variant: Variant,
) -> Result<Vec<Descriptor>, BowError> {
    check_gray(img)?;
    if keypoints.is_empty() {
        return Ok(Vec::new());
    }
    let octaves = scale_space(img, variant);
    if octaves.is_empty() {
        return Ok(Vec::new());
    }
    Ok(keypoints.iter().filter_map(|kp| describe(&octaves, kp)).collect())
}

/// Detection followed by description on a single scale space.
pub fn detect_and_describe(img: &ImageU8, variant: Variant) -> Result<Vec<Descriptor>, BowError> {
    check_gray(img)?;
    let octaves = scale_space(img, variant);
    Ok(detect_in(&octaves).iter().filter_map(|kp| describe(&octaves, kp)).collect())
}
