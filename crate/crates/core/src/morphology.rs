//! Grayscale erosion with a centered rectangular structuring element.
//!
//! Samples outside the image count as 255, the identity of `min`. The
//! window minimum is computed separably: a vertical pass into an
//! intermediate plane, then a horizontal pass over a 255-padded row.

use crate::image::ImageU8;
use crate::parallel;
use crate::vecabi::{narrow, wide, VecWord};
use crate::Variant;

/// Benchmark "filter size" `n` denotes a `(2n+1) x (2n+1)` element.
pub const FILTER_SIZE_IS_RADIUS: bool = true;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphError {
    #[error("erosion needs a single-channel image, got {0} channels")]
    Channels(usize),
    #[error("structuring element radius must be at least 1")]
    ZeroRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    radius: usize,
}

impl StructuringElement {
    pub fn new(radius: usize) -> Result<Self, MorphError> {
        if radius == 0 {
            return Err(MorphError::ZeroRadius);
        }
        Ok(Self { radius })
    }

    /// Element for a benchmark table "filter size".
    pub fn from_filter_size(n: usize) -> Result<Self, MorphError> {
        if FILTER_SIZE_IS_RADIUS {
            Self::new(n)
        } else {
            Self::new(n / 2)
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }
}

fn min_rows_scalar(acc: &mut [u8], row: &[u8]) {
    for (a, &b) in acc.iter_mut().zip(row) {
        *a = (*a).min(b);
    }
}

fn min_rows<V: VecWord<Elem = u8>>(acc: &mut [u8], row: &[u8]) {
    let n = acc.len();
    let mut x = 0;
    while x + V::LANES <= n {
        V::from_slice(&acc[x..]).min(V::from_slice(&row[x..])).write_to(&mut acc[x..]);
        x += V::LANES;
    }
    min_rows_scalar(&mut acc[x..], &row[x..]);
}

fn window_min_scalar(padded: &[u8], side: usize, out: &mut [u8], from: usize) {
    for (x, o) in out.iter_mut().enumerate().skip(from) {
        *o = padded[x..x + side].iter().copied().min().expect("non-empty window");
    }
}

fn window_min<V: VecWord<Elem = u8>>(padded: &[u8], side: usize, out: &mut [u8]) {
    let n = out.len();
    let mut x = 0;
    while x + V::LANES <= n {
        let mut m = V::from_slice(&padded[x..]);
        for j in 1..side {
            m = m.min(V::from_slice(&padded[x + j..]));
        }
        m.write_to(&mut out[x..]);
        x += V::LANES;
    }
    window_min_scalar(padded, side, out, x);
}

/// Erodes output rows `y0..y0 + out.len() / width`.
fn erode_rows(img: &ImageU8, radius: usize, variant: Variant, y0: usize, out: &mut [u8]) {
    let (w, h) = (img.width(), img.height());
    let side = 2 * radius + 1;
    let mut padded = vec![255u8; w + 2 * radius];
    for (dy, out_row) in out.chunks_mut(w).enumerate() {
        let y = y0 + dy;
        let lo = y.saturating_sub(radius);
        let hi = (y + radius).min(h - 1);
        let column = &mut padded[radius..radius + w];
        column.copy_from_slice(img.row(lo));
        for yy in lo + 1..=hi {
            match variant {
                Variant::Scalar => min_rows_scalar(column, img.row(yy)),
                Variant::VecNarrow => min_rows::<narrow::U8x16>(column, img.row(yy)),
                Variant::VecWide => min_rows::<wide::U8x64>(column, img.row(yy)),
            }
        }
        match variant {
            Variant::Scalar => window_min_scalar(&padded, side, out_row, 0),
            Variant::VecNarrow => window_min::<narrow::U8x16>(&padded, side, out_row),
            Variant::VecWide => window_min::<wide::U8x64>(&padded, side, out_row),
        }
    }
}

pub fn erode(img: &ImageU8, se: StructuringElement, variant: Variant) -> Result<ImageU8, MorphError> {
    if img.channels() != 1 {
        return Err(MorphError::Channels(img.channels()));
    }
    let mut out = vec![0u8; img.data().len()];
    erode_rows(img, se.radius, variant, 0, &mut out);
    Ok(ImageU8::new(img.width(), img.height(), 1, out).expect("same shape as input"))
}

/// Row-banded parallel [`erode`].
pub fn erode_parallel(
    img: &ImageU8,
    se: StructuringElement,
    variant: Variant,
    workers: usize,
    band_rows: usize,
) -> Result<ImageU8, MorphError> {
    if img.channels() != 1 {
        return Err(MorphError::Channels(img.channels()));
    }
    let band_rows = band_rows.max(1);
    let mut out = vec![0u8; img.data().len()];
    parallel::for_each_chunk_mut_with(workers, &mut out, band_rows * img.width(), |i, part| {
        erode_rows(img, se.radius, variant, i * band_rows, part);
    });
    Ok(ImageU8::new(img.width(), img.height(), 1, out).expect("same shape as input"))
}
