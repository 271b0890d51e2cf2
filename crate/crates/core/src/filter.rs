//! 2D correlation with square kernels (Gaussian by default).
//!
//! Every output pixel is `round_half_even(sum_ij k[i][j] * in(x+j-c, y+i-c))`
//! accumulated in `f32` in row-major tap order, then saturated to `u8`. The
//! vector variants only parallelize across `x`, never across taps, so all
//! variants produce identical bytes.

use crate::image::ImageU8;
use crate::parallel;
use crate::vecabi::scalar::round_u8;
use crate::vecabi::{narrow, wide, FloatWord, VecWord};
use crate::Variant;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("kernel size {0} is not odd and positive")]
    BadKernelSize(usize),
    #[error("kernel of size {size} needs {expected} coefficients, got {got}")]
    BadCoefficients { size: usize, expected: usize, got: usize },
    #[error("sigma {0} must be positive and finite")]
    BadSigma(f32),
    #[error("unsupported channel count {0}")]
    Channels(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    /// `gfedcb|abcdefgh|gfedcba`: mirror without repeating the edge.
    #[default]
    Reflect101,
    /// `aaaaaa|abcdefgh|hhhhhhh`
    Replicate,
}

impl BorderPolicy {
    /// Maps a possibly out-of-range coordinate into `0..n`.
    pub fn resolve(self, i: isize, n: usize) -> usize {
        let n = n as isize;
        match self {
            BorderPolicy::Replicate => i.clamp(0, n - 1) as usize,
            BorderPolicy::Reflect101 => {
                if n == 1 {
                    return 0;
                }
                let mut i = i;
                while i < 0 || i >= n {
                    i = if i < 0 { -i } else { 2 * n - 2 - i };
                }
                i as usize
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Sigma {
    /// `0.3 * ((k - 1) * 0.5 - 1) + 0.8`
    #[default]
    Auto,
    Explicit(f32),
}

impl Sigma {
    pub fn value(self, size: usize) -> f64 {
        match self {
            Sigma::Auto => 0.3 * ((size as f64 - 1.0) * 0.5 - 1.0) + 0.8,
            Sigma::Explicit(s) => s as f64,
        }
    }
}

/// Odd-sized square kernel, row-major, anchored at its center.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelF32 {
    size: usize,
    coeffs: Vec<f32>,
}

impl KernelF32 {
    pub fn new(size: usize, coeffs: Vec<f32>) -> Result<Self, FilterError> {
        if size.is_multiple_of(2) {
            return Err(FilterError::BadKernelSize(size));
        }
        if coeffs.len() != size * size {
            return Err(FilterError::BadCoefficients { size, expected: size * size, got: coeffs.len() });
        }
        Ok(Self { size, coeffs })
    }

    /// Normalized Gaussian evaluated in `f64` and rounded once to `f32`.
    pub fn gaussian(size: usize, sigma: Sigma) -> Result<Self, FilterError> {
        if size.is_multiple_of(2) {
            return Err(FilterError::BadKernelSize(size));
        }
        let s = sigma.value(size);
        if !(s.is_finite() && s > 0.0) {
            return Err(FilterError::BadSigma(s as f32));
        }
        let c = (size / 2) as f64;
        let denom = 2.0 * s * s;
        let raw: Vec<f64> = (0..size * size)
            .map(|idx| {
                let di = (idx / size) as f64 - c;
                let dj = (idx % size) as f64 - c;
                (-(di * di + dj * dj) / denom).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let coeffs = raw.iter().map(|v| (v / total) as f32).collect();
        Ok(Self { size, coeffs })
    }

    /// Identity kernel.
    pub fn delta(size: usize) -> Result<Self, FilterError> {
        let mut coeffs = vec![0.0; size * size];
        if size % 2 == 1 {
            coeffs[size * size / 2] = 1.0;
        }
        Self::new(size, coeffs)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn coeffs(&self) -> &[f32] {
        &self.coeffs
    }

    pub fn at(&self, i: usize, j: usize) -> f32 {
        self.coeffs[i * self.size + j]
    }

    pub fn scaled(&self, a: f32) -> Self {
        Self { size: self.size, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }
}

/// One channel converted to `f32` with a border of `radius` resolved pixels.
struct Padded {
    data: Vec<f32>,
    stride: usize,
}

fn pad_channel(img: &ImageU8, channel: usize, radius: usize, border: BorderPolicy) -> Padded {
    let (w, h) = (img.width(), img.height());
    let stride = w + 2 * radius;
    let cols: Vec<usize> = (0..stride).map(|x| border.resolve(x as isize - radius as isize, w)).collect();
    let mut data = Vec::with_capacity(stride * (h + 2 * radius));
    for py in 0..h + 2 * radius {
        let y = border.resolve(py as isize - radius as isize, h);
        let row = img.row(y);
        data.extend(cols.iter().map(|&x| row[x * img.channels() + channel] as f32));
    }
    Padded { data, stride }
}

/// Float accumulators for output row `y`, pixel by pixel.
fn row_scalar(pad: &Padded, kernel: &KernelF32, y: usize, out: &mut [f32], from: usize) {
    let k = kernel.size;
    for (x, o) in out.iter_mut().enumerate().skip(from) {
        let mut acc = 0.0f32;
        for i in 0..k {
            let row = &pad.data[(y + i) * pad.stride + x..][..k];
            let taps = &kernel.coeffs[i * k..(i + 1) * k];
            for (&c, &p) in taps.iter().zip(row) {
                acc += c * p;
            }
        }
        *o = acc;
    }
}

/// Float accumulators for output row `y`, `V::LANES` pixels at a time.
fn row_vector<V: FloatWord>(pad: &Padded, kernel: &KernelF32, taps: &[V], y: usize, out: &mut [f32]) {
    let k = kernel.size;
    let w = out.len();
    let mut x = 0;
    while x + V::LANES <= w {
        let mut acc = V::splat(0.0);
        for i in 0..k {
            let row = &pad.data[(y + i) * pad.stride + x..];
            for (j, &tap) in taps[i * k..(i + 1) * k].iter().enumerate() {
                acc = acc.add(tap.mul(V::from_slice(&row[j..])));
            }
        }
        acc.write_to(&mut out[x..]);
        x += V::LANES;
    }
    row_scalar(pad, kernel, y, out, x);
}

fn quantize_row<V: FloatWord>(acc: &[f32], out: &mut [u8]) {
    let mut x = 0;
    while x + V::LANES <= acc.len() {
        V::from_slice(&acc[x..]).store_round_u8(&mut out[x..]);
        x += V::LANES;
    }
    for (o, &a) in out[x..].iter_mut().zip(&acc[x..]) {
        *o = round_u8(a);
    }
}

enum Taps {
    Scalar,
    Narrow(Vec<narrow::F32x4>),
    Wide(Vec<wide::F32x16>),
}

impl Taps {
    fn new(kernel: &KernelF32, variant: Variant) -> Self {
        match variant {
            Variant::Scalar => Taps::Scalar,
            Variant::VecNarrow => Taps::Narrow(kernel.coeffs.iter().map(|&c| VecWord::splat(c)).collect()),
            Variant::VecWide => Taps::Wide(kernel.coeffs.iter().map(|&c| VecWord::splat(c)).collect()),
        }
    }

    fn row(&self, pad: &Padded, kernel: &KernelF32, y: usize, acc: &mut [f32]) {
        match self {
            Taps::Scalar => row_scalar(pad, kernel, y, acc, 0),
            Taps::Narrow(t) => row_vector(pad, kernel, t, y, acc),
            Taps::Wide(t) => row_vector(pad, kernel, t, y, acc),
        }
    }

    fn quantize(&self, acc: &[f32], out: &mut [u8]) {
        match self {
            Taps::Scalar => {
                for (o, &a) in out.iter_mut().zip(acc) {
                    *o = round_u8(a);
                }
            }
            Taps::Narrow(_) => quantize_row::<narrow::F32x4>(acc, out),
            Taps::Wide(_) => quantize_row::<wide::F32x16>(acc, out),
        }
    }
}

struct Prepared<'a> {
    img: &'a ImageU8,
    kernel: &'a KernelF32,
    planes: Vec<Padded>,
    taps: Taps,
}

impl<'a> Prepared<'a> {
    fn new(
        img: &'a ImageU8,
        kernel: &'a KernelF32,
        border: BorderPolicy,
        variant: Variant,
    ) -> Result<Self, FilterError> {
        if !matches!(img.channels(), 1 | 3) {
            return Err(FilterError::Channels(img.channels()));
        }
        let planes = (0..img.channels()).map(|c| pad_channel(img, c, kernel.radius(), border)).collect();
        Ok(Self { img, kernel, planes, taps: Taps::new(kernel, variant) })
    }

    /// Fills `out` (a whole number of interleaved rows starting at `y0`).
    fn rows(&self, y0: usize, out: &mut [u8]) {
        let w = self.img.width();
        let ch = self.img.channels();
        let mut acc = vec![0.0f32; w];
        let mut bytes = vec![0u8; if ch == 1 { 0 } else { w }];
        for (dy, out_row) in out.chunks_mut(w * ch).enumerate() {
            for (c, pad) in self.planes.iter().enumerate() {
                self.taps.row(pad, self.kernel, y0 + dy, &mut acc);
                if ch == 1 {
                    self.taps.quantize(&acc, out_row);
                } else {
                    self.taps.quantize(&acc, &mut bytes);
                    for (x, &b) in bytes.iter().enumerate() {
                        out_row[x * ch + c] = b;
                    }
                }
            }
        }
    }
}

pub fn filter2d(
    img: &ImageU8,
    kernel: &KernelF32,
    border: BorderPolicy,
    variant: Variant,
) -> Result<ImageU8, FilterError> {
    let prep = Prepared::new(img, kernel, border, variant)?;
    let mut out = vec![0u8; img.data().len()];
    prep.rows(0, &mut out);
    Ok(ImageU8::new(img.width(), img.height(), img.channels(), out).expect("same shape as input"))
}

/// Row-banded parallel [`filter2d`]; bands of `band_rows` rows are written
/// by independent workers.
pub fn filter2d_parallel(
    img: &ImageU8,
    kernel: &KernelF32,
    border: BorderPolicy,
    variant: Variant,
    workers: usize,
    band_rows: usize,
) -> Result<ImageU8, FilterError> {
    let prep = Prepared::new(img, kernel, border, variant)?;
    let mut out = vec![0u8; img.data().len()];
    let band = band_rows.max(1) * img.row_len();
    parallel::for_each_chunk_mut_with(workers, &mut out, band, |i, part| {
        prep.rows(i * band_rows.max(1), part);
    });
    Ok(ImageU8::new(img.width(), img.height(), img.channels(), out).expect("same shape as input"))
}

/// Pre-quantization accumulators, interleaved like the image.
pub fn filter2d_float_plane(
    img: &ImageU8,
    kernel: &KernelF32,
    border: BorderPolicy,
    variant: Variant,
) -> Result<Vec<f32>, FilterError> {
    let prep = Prepared::new(img, kernel, border, variant)?;
    let (w, ch) = (img.width(), img.channels());
    let mut plane = vec![0.0f32; img.data().len()];
    let mut acc = vec![0.0f32; w];
    for y in 0..img.height() {
        for (c, pad) in prep.planes.iter().enumerate() {
            prep.taps.row(pad, kernel, y, &mut acc);
            for (x, &a) in acc.iter().enumerate() {
                plane[(y * w + x) * ch + c] = a;
            }
        }
    }
    Ok(plane)
}
