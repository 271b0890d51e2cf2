//! 128-bit native words.
//!
//! On x86-64 these wrap SSE2 registers (part of the x86-64 baseline, so no
//! runtime dispatch is needed). Elsewhere they alias the scalar reference
//! types and [`native_available`] returns `false`.

#[cfg(target_arch = "x86_64")]
pub use sse2::{F32x4, I16x8, I32x4, U16x8, U8x16};

#[cfg(not(target_arch = "x86_64"))]
pub use super::scalar::{F32x4, I16x8, I32x4, U16x8, U8x16};

pub(crate) fn native_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("sse2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

#[cfg(target_arch = "x86_64")]
mod sse2 {
    use std::arch::x86_64::*;
    use std::fmt;

    use crate::vecabi::{Backend, FloatWord, VecWord, Widen, WidthClass};

    macro_rules! int_word {
        ($name:ident, $t:ty, $n:literal) => {
            #[derive(Clone, Copy)]
            #[repr(transparent)]
            pub struct $name(__m128i);

            impl fmt::Debug for $name {
                fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                    f.debug_tuple(stringify!($name)).field(&self.to_vec()).finish()
                }
            }

            impl PartialEq for $name {
                fn eq(&self, other: &Self) -> bool {
                    self.to_vec() == other.to_vec()
                }
            }

            impl $name {
                #[inline(always)]
                fn raw_load(buf: &[$t]) -> __m128i {
                    assert!(buf.len() >= $n);
                    // SAFETY: length checked above; unaligned load.
                    unsafe { _mm_loadu_si128(buf.as_ptr() as *const __m128i) }
                }
                #[inline(always)]
                fn raw_store(v: __m128i, buf: &mut [$t]) {
                    assert!(buf.len() >= $n);
                    // SAFETY: length checked above; unaligned store.
                    unsafe { _mm_storeu_si128(buf.as_mut_ptr() as *mut __m128i, v) }
                }
            }
        };
    }

    int_word!(U8x16, u8, 16);
    int_word!(U16x8, u16, 8);
    int_word!(I16x8, i16, 8);
    int_word!(I32x4, i32, 4);

    #[derive(Clone, Copy)]
    #[repr(transparent)]
    pub struct F32x4(__m128);

    impl fmt::Debug for F32x4 {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.debug_tuple("F32x4").field(&self.to_vec()).finish()
        }
    }

    impl PartialEq for F32x4 {
        fn eq(&self, other: &Self) -> bool {
            self.to_vec() == other.to_vec()
        }
    }

    // SAFETY (all intrinsic calls below): SSE2 is part of the x86-64
    // baseline, and every memory access goes through a length-checked
    // `raw_load`/`raw_store` or `from_slice`/`write_to`.

    macro_rules! common {
        ($t:ty, $n:literal) => {
            type Elem = $t;
            const LANES: usize = $n;
            const CLASS: WidthClass = WidthClass::Narrow;
            const BACKEND: Backend = Backend::NativeNarrow;

            #[inline(always)]
            fn from_slice(buf: &[$t]) -> Self {
                Self(Self::raw_load(buf))
            }
            #[inline(always)]
            fn write_to(self, buf: &mut [$t]) {
                Self::raw_store(self.0, buf)
            }
        };
    }

    impl VecWord for U8x16 {
        common!(u8, 16);

        #[inline(always)]
        fn splat(x: u8) -> Self {
            unsafe { Self(_mm_set1_epi8(x as i8)) }
        }
        #[inline(always)]
        fn add(self, o: Self) -> Self {
            unsafe { Self(_mm_add_epi8(self.0, o.0)) }
        }
        #[inline(always)]
        fn sub(self, o: Self) -> Self {
            unsafe { Self(_mm_sub_epi8(self.0, o.0)) }
        }
        #[inline(always)]
        fn mul(self, o: Self) -> Self {
            // Multiply even and odd bytes in 16-bit lanes, keep low bytes.
            unsafe {
                let even = _mm_mullo_epi16(self.0, o.0);
                let odd = _mm_mullo_epi16(_mm_srli_epi16(self.0, 8), _mm_srli_epi16(o.0, 8));
                let low = _mm_set1_epi16(0x00ff);
                Self(_mm_or_si128(_mm_and_si128(even, low), _mm_slli_epi16(odd, 8)))
            }
        }
        #[inline(always)]
        fn min(self, o: Self) -> Self {
            unsafe { Self(_mm_min_epu8(self.0, o.0)) }
        }
        #[inline(always)]
        fn max(self, o: Self) -> Self {
            unsafe { Self(_mm_max_epu8(self.0, o.0)) }
        }
    }

    impl VecWord for U16x8 {
        common!(u16, 8);

        #[inline(always)]
        fn splat(x: u16) -> Self {
            unsafe { Self(_mm_set1_epi16(x as i16)) }
        }
        #[inline(always)]
        fn add(self, o: Self) -> Self {
            unsafe { Self(_mm_add_epi16(self.0, o.0)) }
        }
        #[inline(always)]
        fn sub(self, o: Self) -> Self {
            unsafe { Self(_mm_sub_epi16(self.0, o.0)) }
        }
        #[inline(always)]
        fn mul(self, o: Self) -> Self {
            unsafe { Self(_mm_mullo_epi16(self.0, o.0)) }
        }
        // No unsigned 16-bit min/max before SSE4.1: use the saturating
        // difference d = max(a - b, 0).
        #[inline(always)]
        fn min(self, o: Self) -> Self {
            unsafe { Self(_mm_sub_epi16(self.0, _mm_subs_epu16(self.0, o.0))) }
        }
        #[inline(always)]
        fn max(self, o: Self) -> Self {
            unsafe { Self(_mm_add_epi16(o.0, _mm_subs_epu16(self.0, o.0))) }
        }
    }

    impl VecWord for I16x8 {
        common!(i16, 8);

        #[inline(always)]
        fn splat(x: i16) -> Self {
            unsafe { Self(_mm_set1_epi16(x)) }
        }
        #[inline(always)]
        fn add(self, o: Self) -> Self {
            unsafe { Self(_mm_add_epi16(self.0, o.0)) }
        }
        #[inline(always)]
        fn sub(self, o: Self) -> Self {
            unsafe { Self(_mm_sub_epi16(self.0, o.0)) }
        }
        #[inline(always)]
        fn mul(self, o: Self) -> Self {
            unsafe { Self(_mm_mullo_epi16(self.0, o.0)) }
        }
        #[inline(always)]
        fn min(self, o: Self) -> Self {
            unsafe { Self(_mm_min_epi16(self.0, o.0)) }
        }
        #[inline(always)]
        fn max(self, o: Self) -> Self {
            unsafe { Self(_mm_max_epi16(self.0, o.0)) }
        }
    }

    impl VecWord for I32x4 {
        common!(i32, 4);

        #[inline(always)]
        fn splat(x: i32) -> Self {
            unsafe { Self(_mm_set1_epi32(x)) }
        }
        #[inline(always)]
        fn add(self, o: Self) -> Self {
            unsafe { Self(_mm_add_epi32(self.0, o.0)) }
        }
        #[inline(always)]
        fn sub(self, o: Self) -> Self {
            unsafe { Self(_mm_sub_epi32(self.0, o.0)) }
        }
        #[inline(always)]
        fn mul(self, o: Self) -> Self {
            // Lanes 0/2 and 1/3 through the 32x32->64 multiplier.
            unsafe {
                let even = _mm_mul_epu32(self.0, o.0);
                let odd = _mm_mul_epu32(_mm_srli_si128(self.0, 4), _mm_srli_si128(o.0, 4));
                Self(_mm_unpacklo_epi32(_mm_shuffle_epi32(even, 0b00_00_10_00), _mm_shuffle_epi32(odd, 0b00_00_10_00)))
            }
        }
        #[inline(always)]
        fn min(self, o: Self) -> Self {
            unsafe {
                let gt = _mm_cmpgt_epi32(self.0, o.0);
                Self(_mm_or_si128(_mm_and_si128(gt, o.0), _mm_andnot_si128(gt, self.0)))
            }
        }
        #[inline(always)]
        fn max(self, o: Self) -> Self {
            unsafe {
                let gt = _mm_cmpgt_epi32(self.0, o.0);
                Self(_mm_or_si128(_mm_and_si128(gt, self.0), _mm_andnot_si128(gt, o.0)))
            }
        }
    }

    impl VecWord for F32x4 {
        type Elem = f32;
        const LANES: usize = 4;
        const CLASS: WidthClass = WidthClass::Narrow;
        const BACKEND: Backend = Backend::NativeNarrow;

        #[inline(always)]
        fn splat(x: f32) -> Self {
            unsafe { Self(_mm_set1_ps(x)) }
        }
        #[inline(always)]
        fn from_slice(buf: &[f32]) -> Self {
            assert!(buf.len() >= 4);
            unsafe { Self(_mm_loadu_ps(buf.as_ptr())) }
        }
        #[inline(always)]
        fn write_to(self, buf: &mut [f32]) {
            assert!(buf.len() >= 4);
            unsafe { _mm_storeu_ps(buf.as_mut_ptr(), self.0) }
        }
        #[inline(always)]
        fn add(self, o: Self) -> Self {
            unsafe { Self(_mm_add_ps(self.0, o.0)) }
        }
        #[inline(always)]
        fn sub(self, o: Self) -> Self {
            unsafe { Self(_mm_sub_ps(self.0, o.0)) }
        }
        #[inline(always)]
        fn mul(self, o: Self) -> Self {
            unsafe { Self(_mm_mul_ps(self.0, o.0)) }
        }
        #[inline(always)]
        fn min(self, o: Self) -> Self {
            unsafe { Self(_mm_min_ps(self.0, o.0)) }
        }
        #[inline(always)]
        fn max(self, o: Self) -> Self {
            unsafe { Self(_mm_max_ps(self.0, o.0)) }
        }
    }

    impl FloatWord for F32x4 {
        #[inline(always)]
        fn store_round_u8(self, out: &mut [u8]) {
            assert!(out.len() >= 4);
            unsafe {
                let clamped = _mm_min_ps(_mm_max_ps(self.0, _mm_setzero_ps()), _mm_set1_ps(255.0));
                // MXCSR default rounding is round-half-to-even.
                let ints = _mm_cvtps_epi32(clamped);
                let words = _mm_packs_epi32(ints, ints);
                let bytes = _mm_packus_epi16(words, words);
                let packed = (_mm_cvtsi128_si32(bytes) as u32).to_le_bytes();
                out[..4].copy_from_slice(&packed);
            }
        }
    }

    impl Widen for U8x16 {
        type Wider = U16x8;

        #[inline(always)]
        fn widen_lo(self) -> U16x8 {
            unsafe { U16x8(_mm_unpacklo_epi8(self.0, _mm_setzero_si128())) }
        }
        #[inline(always)]
        fn widen_hi(self) -> U16x8 {
            unsafe { U16x8(_mm_unpackhi_epi8(self.0, _mm_setzero_si128())) }
        }
        #[inline(always)]
        fn narrow(lo: U16x8, hi: U16x8) -> Self {
            unsafe {
                let mask = _mm_set1_epi16(0x00ff);
                Self(_mm_packus_epi16(_mm_and_si128(lo.0, mask), _mm_and_si128(hi.0, mask)))
            }
        }
    }

    impl Widen for I16x8 {
        type Wider = I32x4;

        #[inline(always)]
        fn widen_lo(self) -> I32x4 {
            unsafe { I32x4(_mm_srai_epi32(_mm_unpacklo_epi16(self.0, self.0), 16)) }
        }
        #[inline(always)]
        fn widen_hi(self) -> I32x4 {
            unsafe { I32x4(_mm_srai_epi32(_mm_unpackhi_epi16(self.0, self.0), 16)) }
        }
        #[inline(always)]
        fn narrow(lo: I32x4, hi: I32x4) -> Self {
            unsafe {
                let lo = _mm_srai_epi32(_mm_slli_epi32(lo.0, 16), 16);
                let hi = _mm_srai_epi32(_mm_slli_epi32(hi.0, 16), 16);
                Self(_mm_packs_epi32(lo, hi))
            }
        }
    }
}
