//! 8-bit images, binary PNM and CIFAR-10 record I/O, and deterministic
//! synthetic inputs.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageError {
    #[error("invalid image shape {width}x{height}x{channels}")]
    BadShape { width: usize, height: usize, channels: usize },
    #[error("pixel buffer holds {got} bytes, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },
}

fn format_err(offset: usize, reason: impl Into<String>) -> ImageError {
    ImageError::Format { offset, reason: reason.into() }
}

/// Row-major image with interleaved channels (1 or 3).
#[derive(Clone, PartialEq, Eq)]
pub struct ImageU8 {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImageU8 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ImageU8({}x{}x{})", self.width, self.height, self.channels)
    }
}

impl ImageU8 {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || !matches!(channels, 1 | 3) {
            return Err(ImageError::BadShape { width, height, channels });
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::BadLength { expected, got: data.len() });
        }
        Ok(Self { width, height, channels, data })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn row_len(&self) -> usize {
        self.width * self.channels
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let n = self.row_len();
        &self.data[y * n..(y + 1) * n]
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn set(&mut self, x: usize, y: usize, c: usize, v: u8) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Index of the first differing byte, if any, as `(x, y, channel)`.
    pub fn first_mismatch(&self, other: &ImageU8) -> Option<(usize, usize, usize)> {
        if self.width != other.width || self.height != other.height || self.channels != other.channels {
            return Some((0, 0, 0));
        }
        let i = self.data.iter().zip(&other.data).position(|(a, b)| a != b)?;
        let c = i % self.channels;
        let p = i / self.channels;
        Some((p % self.width, p / self.width, c))
    }
}

/// Parses binary PGM (`P5`) or PPM (`P6`) with maxval 255.
pub fn read_pnm(bytes: &[u8]) -> Result<ImageU8, ImageError> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(format_err(0, "expected magic P5 or P6")),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (slot, name) in fields.iter_mut().zip(["width", "height", "maxval"]) {
        pos = skip_space_and_comments(bytes, pos);
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(pos, format!("expected {name}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *slot = text.parse().map_err(|_| format_err(start, format!("{name} out of range")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(format_err(pos, format!("maxval {maxval} is not 255")));
    }
    if width == 0 || height == 0 {
        return Err(format_err(pos, "zero image dimension"));
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(format_err(pos, "expected whitespace before raster")),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| format_err(pos, "image too large"))?;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(format_err(bytes.len(), format!("truncated raster: {} of {expected} bytes", payload.len())));
    }
    ImageU8::new(width, height, channels, payload[..expected].to_vec())
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        match bytes.get(pos) {
            Some(b) if b.is_ascii_whitespace() => pos += 1,
            Some(b'#') => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            _ => return pos,
        }
    }
}

pub fn write_pnm(img: &ImageU8) -> Vec<u8> {
    let mut header = String::new();
    let magic = if img.channels == 1 { "P5" } else { "P6" };
    let _ = write!(header, "{magic}\n{} {}\n255\n", img.width, img.height);
    let mut out = header.into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub const CIFAR_SIDE: usize = 32;
pub const CIFAR_PIXELS: usize = CIFAR_SIDE * CIFAR_SIDE;
pub const CIFAR_RECORD_LEN: usize = 1 + 3 * CIFAR_PIXELS;
pub const CIFAR_CLASSES: usize = 10;

/// One CIFAR-10 binary record: label byte then planar R, G, B.
#[derive(Clone, PartialEq, Eq)]
pub struct CifarRecord {
    pub label: u8,
    pub pixels: Box<[u8; 3 * CIFAR_PIXELS]>,
}

impl std::fmt::Debug for CifarRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CifarRecord(label={})", self.label)
    }
}

impl CifarRecord {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(CIFAR_RECORD_LEN);
        out.push(self.label);
        out.extend_from_slice(&self.pixels[..]);
        out
    }
}

pub fn read_cifar10(bytes: &[u8]) -> Result<Vec<CifarRecord>, ImageError> {
    if !bytes.len().is_multiple_of(CIFAR_RECORD_LEN) {
        return Err(format_err(
            bytes.len() - bytes.len() % CIFAR_RECORD_LEN,
            format!("length {} is not a multiple of {CIFAR_RECORD_LEN}", bytes.len()),
        ));
    }
    bytes
        .chunks_exact(CIFAR_RECORD_LEN)
        .enumerate()
        .map(|(i, rec)| {
            let label = rec[0];
            if label as usize >= CIFAR_CLASSES {
                return Err(format_err(i * CIFAR_RECORD_LEN, format!("label {label} exceeds 9")));
            }
            let mut pixels = Box::new([0u8; 3 * CIFAR_PIXELS]);
            pixels.copy_from_slice(&rec[1..]);
            Ok(CifarRecord { label, pixels })
        })
        .collect()
}

/// Integer luma: `(77 R + 150 G + 29 B) >> 8`.
pub fn cifar_to_gray(rec: &CifarRecord) -> ImageU8 {
    let (r, rest) = rec.pixels.split_at(CIFAR_PIXELS);
    let (g, b) = rest.split_at(CIFAR_PIXELS);
    let data = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| {
            let y = (77 * r as u32 + 150 * g as u32 + 29 * b as u32) >> 8;
            y.min(255) as u8
        })
        .collect();
    ImageU8::new(CIFAR_SIDE, CIFAR_SIDE, 1, data).expect("fixed CIFAR shape")
}

/// splitmix64 generator; also the crate's seeded source of randomness.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer in `0..n` by modulo reduction.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform float in `[0, 1)` from the top 24 bits.
    pub fn unit_f32(&mut self) -> f32 {
        (self.next_u64() >> 40) as f32 / (1u64 << 24) as f32
    }
}

/// Image whose bytes are the low bytes of successive generator outputs.
pub fn synth_image(width: usize, height: usize, channels: usize, seed: u64) -> Result<ImageU8, ImageError> {
    let mut rng = SplitMix64::new(seed);
    let n = width * height * channels;
    let data = (0..n).map(|_| rng.next_u64() as u8).collect();
    ImageU8::new(width, height, channels, data)
}
