//! Width-agnostic vector words.
//!
//! Every algorithm in this crate is written once against [`VecWord`] and
//! instantiated with one of three backends:
//!
//! * [`scalar`]: plain per-lane loops over `[T; N]`. Always available and
//!   used as the oracle for the other two.
//! * [`narrow`]: 128-bit native registers (SSE2 on x86-64). On hosts without
//!   a native implementation the narrow types alias the scalar ones and
//!   [`Capabilities::native_narrow`] reports `false`.
//! * [`wide`]: 512-bit words synthesized as a group of four narrow words that
//!   are always operated on back to back, the software analogue of grouping
//!   four consecutive vector registers.
//!
//! Integer arithmetic wraps (two's complement for signed kinds, modulo 2^w
//! for unsigned ones). Saturation happens only at algorithm boundaries, e.g.
//! [`FloatWord::store_round_u8`].
//!
//! `fma` is evaluated as an unfused multiply followed by an add on every
//! backend, so all three backends round identically.

mod element;
pub mod narrow;
pub mod scalar;
pub mod wide;

use std::fmt;
use std::sync::OnceLock;

pub use element::Element;

/// Lane element kind, the `<data set>` part of an intrinsic name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    U8,
    U16,
    I16,
    I32,
    F32,
}

impl ElementKind {
    pub const ALL: [ElementKind; 5] = [Self::U8, Self::U16, Self::I16, Self::I32, Self::F32];

    pub const fn bits(self) -> usize {
        match self {
            Self::U8 => 8,
            Self::U16 | Self::I16 => 16,
            Self::I32 | Self::F32 => 32,
        }
    }

    pub const fn lane_count(self, class: WidthClass) -> usize {
        class.bits() / self.bits()
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::U8 => "u8",
            Self::U16 => "u16",
            Self::I16 => "i16",
            Self::I32 => "i32",
            Self::F32 => "f32",
        }
    }
}

/// Register width class. A wide word is exactly four narrow words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WidthClass {
    Narrow,
    Wide,
}

/// Number of narrow registers grouped into one wide word.
pub const GROUP: usize = 4;

impl WidthClass {
    pub const fn bits(self) -> usize {
        match self {
            Self::Narrow => 128,
            Self::Wide => 128 * GROUP,
        }
    }

    /// Register count, as in the `m<regs>` suffix of grouped intrinsics.
    pub const fn registers(self) -> usize {
        match self {
            Self::Narrow => 1,
            Self::Wide => GROUP,
        }
    }

    pub(crate) const fn from_bits(bits: usize) -> Self {
        match bits {
            128 => Self::Narrow,
            512 => Self::Wide,
            _ => panic!("vector words are either 128 or 512 bits wide"),
        }
    }
}

/// Intrinsic-style name of an operation on a word class, e.g. `vfmadd_f32m4`.
pub fn intrinsic_name(op: &str, kind: ElementKind, class: WidthClass) -> String {
    format!("{op}_{}m{}", kind.name(), class.registers())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    ScalarRef,
    NativeNarrow,
    SynthWide,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::ScalarRef => "scalar_ref",
            Backend::NativeNarrow => "native_narrow",
            Backend::SynthWide => "synth_wide",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VecError {
    #[error("span of {len} elements cannot hold {lanes} lanes at offset {offset}")]
    OutOfRange { offset: usize, lanes: usize, len: usize },
}

fn check_span(offset: usize, lanes: usize, len: usize) -> Result<(), VecError> {
    match offset.checked_add(lanes) {
        Some(end) if end <= len => Ok(()),
        _ => Err(VecError::OutOfRange { offset, lanes, len }),
    }
}

/// A fixed-lane vector value.
///
/// Implementations are plain `Copy` values; every operation is pure.
pub trait VecWord: Copy + fmt::Debug + Send + Sync + 'static {
    type Elem: Element;
    const LANES: usize;
    const CLASS: WidthClass;
    const BACKEND: Backend;

    fn splat(x: Self::Elem) -> Self;

    /// Loads the first `LANES` elements of `buf`.
    ///
    /// Panics if `buf` is shorter than `LANES`.
    fn from_slice(buf: &[Self::Elem]) -> Self;

    /// Stores into the first `LANES` elements of `buf`.
    ///
    /// Panics if `buf` is shorter than `LANES`.
    fn write_to(self, buf: &mut [Self::Elem]);

    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;

    fn load(buf: &[Self::Elem], offset: usize) -> Result<Self, VecError> {
        check_span(offset, Self::LANES, buf.len())?;
        Ok(Self::from_slice(&buf[offset..]))
    }

    fn store(self, buf: &mut [Self::Elem], offset: usize) -> Result<(), VecError> {
        check_span(offset, Self::LANES, buf.len())?;
        self.write_to(&mut buf[offset..]);
        Ok(())
    }

    fn to_vec(self) -> Vec<Self::Elem> {
        let mut out = vec![Self::Elem::default(); Self::LANES];
        self.write_to(&mut out);
        out
    }

    /// Sum of all lanes into the widened accumulator, ascending lane order.
    fn reduce_sum(self) -> <Self::Elem as Element>::Acc {
        let mut lanes = [Self::Elem::default(); MAX_LANES];
        self.write_to(&mut lanes);
        lanes[..Self::LANES]
            .iter()
            .fold(<Self::Elem as Element>::Acc::default(), |acc, &x| Self::Elem::accumulate(acc, x))
    }

    fn reduce_min(self) -> Self::Elem {
        let mut lanes = [Self::Elem::default(); MAX_LANES];
        self.write_to(&mut lanes);
        lanes[1..Self::LANES].iter().fold(lanes[0], |m, &x| Element::min(m, x))
    }
}

/// Largest lane count of any word (64 x u8 in the wide class).
pub const MAX_LANES: usize = 64;

/// Operations specific to `f32` words.
pub trait FloatWord: VecWord<Elem = f32> {
    /// `c + a * b`, unfused.
    fn fma(self, b: Self, c: Self) -> Self {
        c.add(self.mul(b))
    }

    /// Clamps every lane to `[0, 255]`, rounds half to even and writes the
    /// first `LANES` bytes of `out`.
    fn store_round_u8(self, out: &mut [u8]);
}

/// Lane widening to the double-width kind (`u8 -> u16`, `i16 -> i32`).
pub trait Widen: VecWord {
    type Wider: VecWord;

    /// Lanes `0..LANES/2`, zero- or sign-extended.
    fn widen_lo(self) -> Self::Wider;
    /// Lanes `LANES/2..LANES`, zero- or sign-extended.
    fn widen_hi(self) -> Self::Wider;
    /// Inverse of the widening pair; each wide lane is truncated.
    fn narrow(lo: Self::Wider, hi: Self::Wider) -> Self;
}

/// A word made of [`GROUP`] narrow parts in ascending lane order.
pub trait RegisterGroup: VecWord {
    type Part: VecWord<Elem = Self::Elem>;

    fn from_parts(parts: [Self::Part; GROUP]) -> Self;
    fn parts(self) -> [Self::Part; GROUP];
}

/// Which backends run natively on this host.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub native_narrow: bool,
    pub synth_wide: bool,
}

impl Capabilities {
    pub fn available(&self, backend: Backend) -> bool {
        match backend {
            Backend::ScalarRef => true,
            Backend::NativeNarrow => self.native_narrow,
            Backend::SynthWide => self.synth_wide,
        }
    }

    /// `key=value` lines describing the probe result.
    pub fn report(&self) -> String {
        let yn = |b: bool| if b { "available" } else { "emulated" };
        format!(
            "arch={}\nscalar_ref=available\nnative_narrow={}\nsynth_wide={}\nnarrow_bits={}\nwide_bits={}\nwide_registers={}\n",
            std::env::consts::ARCH,
            yn(self.native_narrow),
            yn(self.synth_wide),
            WidthClass::Narrow.bits(),
            WidthClass::Wide.bits(),
            GROUP,
        )
    }
}

/// Probes the host once and caches the result.
pub fn capabilities() -> Capabilities {
    static CAPS: OnceLock<Capabilities> = OnceLock::new();
    *CAPS.get_or_init(|| {
        let native_narrow = narrow::native_available();
        Capabilities { native_narrow, synth_wide: native_narrow }
    })
}
