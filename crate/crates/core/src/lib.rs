//! Portable vector words and the image and classification kernels built on
//! top of them.
//!
//! Each algorithm comes in three code paths selected by [`Variant`]: a plain
//! scalar loop, 128-bit narrow words, and 512-bit register-grouped wide
//! words. All three produce identical results.

pub mod bow;
pub mod filter;
pub mod image;
pub mod morphology;
pub mod parallel;
pub mod vecabi;

/// Which vector width an algorithm runs with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Scalar,
    VecNarrow,
    VecWide,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Scalar, Variant::VecNarrow, Variant::VecWide];
}
