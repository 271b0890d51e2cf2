//! Reference backend: one loop iteration per lane.

use super::{Backend, Element, FloatWord, RegisterGroup, VecWord, Widen, WidthClass, GROUP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lanes<T: Element, const N: usize>(pub [T; N]);

impl<T: Element, const N: usize> Lanes<T, N> {
    #[inline(always)]
    fn zip(self, other: Self, f: impl Fn(T, T) -> T) -> Self {
        let mut out = self.0;
        for (o, b) in out.iter_mut().zip(other.0) {
            *o = f(*o, b);
        }
        Lanes(out)
    }
}

impl<T: Element, const N: usize> VecWord for Lanes<T, N> {
    type Elem = T;
    const LANES: usize = N;
    const CLASS: WidthClass = WidthClass::from_bits(N * T::KIND.bits());
    const BACKEND: Backend = Backend::ScalarRef;

    #[inline(always)]
    fn splat(x: T) -> Self {
        Lanes([x; N])
    }

    #[inline(always)]
    fn from_slice(buf: &[T]) -> Self {
        let mut out = [T::default(); N];
        out.copy_from_slice(&buf[..N]);
        Lanes(out)
    }

    #[inline(always)]
    fn write_to(self, buf: &mut [T]) {
        buf[..N].copy_from_slice(&self.0);
    }

    #[inline(always)]
    fn add(self, other: Self) -> Self {
        self.zip(other, T::lane_add)
    }
    #[inline(always)]
    fn sub(self, other: Self) -> Self {
        self.zip(other, T::lane_sub)
    }
    #[inline(always)]
    fn mul(self, other: Self) -> Self {
        self.zip(other, T::lane_mul)
    }
    #[inline(always)]
    fn min(self, other: Self) -> Self {
        self.zip(other, T::min)
    }
    #[inline(always)]
    fn max(self, other: Self) -> Self {
        self.zip(other, T::max)
    }
}

impl<const N: usize> FloatWord for Lanes<f32, N> {
    fn store_round_u8(self, out: &mut [u8]) {
        for (o, x) in out[..N].iter_mut().zip(self.0) {
            *o = round_u8(x);
        }
    }
}

/// Scalar saturating quantizer shared by every non-SIMD path.
#[inline(always)]
pub fn round_u8(x: f32) -> u8 {
    let clamped = Element::min(Element::max(x, 0.0), 255.0);
    clamped.round_ties_even() as u8
}

macro_rules! widen_impl {
    ($src:ty, $dst:ty, $n:literal, $half:literal) => {
        impl Widen for Lanes<$src, $n> {
            type Wider = Lanes<$dst, $half>;

            fn widen_lo(self) -> Self::Wider {
                Lanes(std::array::from_fn(|i| <$dst>::from(self.0[i])))
            }
            fn widen_hi(self) -> Self::Wider {
                Lanes(std::array::from_fn(|i| <$dst>::from(self.0[$half + i])))
            }
            fn narrow(lo: Self::Wider, hi: Self::Wider) -> Self {
                Lanes(std::array::from_fn(|i| if i < $half { lo.0[i] as $src } else { hi.0[i - $half] as $src }))
            }
        }
    };
}

widen_impl!(u8, u16, 16, 8);
widen_impl!(u8, u16, 64, 32);
widen_impl!(i16, i32, 8, 4);
widen_impl!(i16, i32, 32, 16);

macro_rules! group_impl {
    ($t:ty, $part:literal, $whole:literal) => {
        impl RegisterGroup for Lanes<$t, $whole> {
            type Part = Lanes<$t, $part>;

            fn from_parts(parts: [Self::Part; GROUP]) -> Self {
                Lanes(std::array::from_fn(|i| parts[i / $part].0[i % $part]))
            }
            fn parts(self) -> [Self::Part; GROUP] {
                std::array::from_fn(|p| Lanes::from_slice(&self.0[p * $part..]))
            }
        }
    };
}

group_impl!(u8, 16, 64);
group_impl!(u16, 8, 32);
group_impl!(i16, 8, 32);
group_impl!(i32, 4, 16);
group_impl!(f32, 4, 16);

pub type U8x16 = Lanes<u8, 16>;
pub type U16x8 = Lanes<u16, 8>;
pub type I16x8 = Lanes<i16, 8>;
pub type I32x4 = Lanes<i32, 4>;
pub type F32x4 = Lanes<f32, 4>;

pub type U8x64 = Lanes<u8, 64>;
pub type U16x32 = Lanes<u16, 32>;
pub type I16x32 = Lanes<i16, 32>;
pub type I32x16 = Lanes<i32, 16>;
pub type F32x16 = Lanes<f32, 16>;
