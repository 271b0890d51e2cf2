//! Brute-force reference implementations shared by the integration and
//! acceptance suites. They share no code with the library paths they check.

#![allow(dead_code)]

use univec::image::ImageU8;

pub fn reflect101(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    // Period of the mirrored sequence is 2n - 2.
    let period = 2 * n - 2;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - m }) as usize
}

pub fn replicate(i: isize, n: usize) -> usize {
    if i < 0 {
        0
    } else if i as usize >= n {
        n - 1
    } else {
        i as usize
    }
}

/// Naive correlation: f32 accumulation in row-major tap order, then
/// round-half-even and saturate.
pub fn naive_filter(img: &ImageU8, k: usize, coeffs: &[f32], reflect: bool) -> Vec<u8> {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let c = (k / 2) as isize;
    let resolve = |i: isize, n: usize| if reflect { reflect101(i, n) } else { replicate(i, n) };
    let mut out = vec![0u8; w * h * ch];
    for y in 0..h {
        for x in 0..w {
            for chan in 0..ch {
                let mut acc = 0.0f32;
                for i in 0..k {
                    for j in 0..k {
                        let sy = resolve(y as isize + i as isize - c, h);
                        let sx = resolve(x as isize + j as isize - c, w);
                        acc += coeffs[i * k + j] * img.data()[(sy * w + sx) * ch + chan] as f32;
                    }
                }
                let v = acc.round_ties_even();
                out[(y * w + x) * ch + chan] = if v.is_nan() || v < 0.0 {
                    0
                } else if v > 255.0 {
                    255
                } else {
                    v as u8
                };
            }
        }
    }
    out
}

/// Direct (2r+1)^2 window minimum with out-of-image samples valued 255.
pub fn naive_erode(img: &ImageU8, r: usize) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let r = r as isize;
    let mut out = vec![0u8; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut m = 255u8;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (sx, sy) = (x + dx, y + dy);
                    if sx >= 0 && sy >= 0 && (sx as usize) < w && (sy as usize) < h {
                        m = m.min(img.data()[sy as usize * w + sx as usize]);
                    }
                }
            }
            out[y as usize * w + x as usize] = m;
        }
    }
    out
}

/// Upper-left quadrant of the normalized 5x5 Gaussian with sigma 1, from a
/// 40-digit mpmath evaluation. Other entries follow by mirror symmetry.
#[allow(clippy::excessive_precision)]
pub const GAUSS5_SIGMA1: [[f64; 3]; 3] = [
    [0.00296901674395049709855291, 0.01330620989101365158649745, 0.02193823127971464130360216],
    [0.01330620989101365158649745, 0.05963429543618013502230501, 0.09832033134884576491510395],
    [0.02193823127971464130360216, 0.09832033134884576491510395, 0.1621028216371266339497643],
];

pub fn gauss5_sigma1(i: usize, j: usize) -> f64 {
    let fold = |v: usize| if v > 2 { 4 - v } else { v };
    GAUSS5_SIGMA1[fold(i)][fold(j)]
}

/// Squared L2 distance in f64.
pub fn sq_dist(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum()
}

/// Reference splitmix64 step, written out from the published constants.
pub fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub struct LloydOutcome {
    pub centroids: Vec<Vec<f32>>,
    pub labels: Vec<usize>,
    pub trace: Vec<f64>,
}

/// Textbook Lloyd iteration with f64 distances. Initial centroids are the
/// first `k` entries of a partial Fisher-Yates shuffle; ties pick the lower
/// centroid; an empty cluster steals the sample farthest from its centroid
/// among clusters that have more than one member.
pub fn lloyd(samples: &[Vec<f32>], k: usize, max_iters: usize, seed: u64) -> LloydOutcome {
    let n = samples.len();
    let mut state = seed;
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + (splitmix_next(&mut state) % (n - i) as u64) as usize;
        order.swap(i, j);
    }
    let mut centroids: Vec<Vec<f32>> = order[..k].iter().map(|&i| samples[i].clone()).collect();
    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut trace = Vec::new();
    for _ in 0..max_iters {
        let mut fresh = Vec::with_capacity(n);
        let mut dist = Vec::with_capacity(n);
        for s in samples {
            let mut best = 0;
            for c in 1..k {
                if sq_dist(s, &centroids[c]) < sq_dist(s, &centroids[best]) {
                    best = c;
                }
            }
            fresh.push(best);
            dist.push(sq_dist(s, &centroids[best]));
        }
        trace.push(dist.iter().sum());
        if fresh == labels {
            break;
        }
        labels = fresh;
        for c in 0..k {
            let count = |labels: &[usize], c: usize| labels.iter().filter(|&&l| l == c).count();
            if count(&labels, c) > 0 {
                continue;
            }
            let mut far: Option<usize> = None;
            for i in 0..n {
                if count(&labels, labels[i]) > 1 && far.is_none_or(|f| dist[i] > dist[f]) {
                    far = Some(i);
                }
            }
            let i = far.unwrap();
            labels[i] = c;
            dist[i] = 0.0;
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f32>> =
                samples.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(s, _)| s).collect();
            for (d, v) in centroid.iter_mut().enumerate() {
                let sum: f64 = members.iter().map(|m| m[d] as f64).sum();
                *v = (sum / members.len() as f64) as f32;
            }
        }
    }
    LloydOutcome { centroids, labels, trace }
}

/// Index of the nearest row by exhaustive f64 search, lowest index on ties.
pub fn brute_nearest(x: &[f32], rows: &[Vec<f32>]) -> usize {
    let d: Vec<f64> = rows.iter().map(|r| sq_dist(x, r)).collect();
    (0..d.len()).fold(0, |b, i| if d[i] < d[b] { i } else { b })
}

/// Argmax of `w_c . h + b_c` computed in f64, lowest class on ties.
pub fn scalar_argmax(weights: &[Vec<f32>], bias: &[f32], h: &[f32]) -> usize {
    let scores: Vec<f64> = weights
        .iter()
        .zip(bias)
        .map(|(w, &b)| w.iter().zip(h).map(|(&w, &x)| w as f64 * x as f64).sum::<f64>() + b as f64)
        .collect();
    (0..scores.len()).fold(0, |b, i| if scores[i] > scores[b] { i } else { b })
}
