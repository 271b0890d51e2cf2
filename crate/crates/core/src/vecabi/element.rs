use std::fmt::Debug;

use super::ElementKind;

/// Scalar lane type. The lane operations here define the semantics every
/// backend must reproduce bit for bit.
pub trait Element: Copy + Default + PartialEq + PartialOrd + Debug + Send + Sync + 'static {
    const KIND: ElementKind;

    /// Accumulator used by horizontal sums; wide enough for 64 lanes.
    type Acc: Copy + Default + PartialEq + Debug;

    fn lane_add(self, other: Self) -> Self;
    fn lane_sub(self, other: Self) -> Self;
    fn lane_mul(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn accumulate(acc: Self::Acc, x: Self) -> Self::Acc;
}

macro_rules! int_element {
    ($t:ty, $kind:ident, $acc:ty) => {
        impl Element for $t {
            const KIND: ElementKind = ElementKind::$kind;
            type Acc = $acc;

            #[inline(always)]
            fn lane_add(self, other: Self) -> Self {
                self.wrapping_add(other)
            }
            #[inline(always)]
            fn lane_sub(self, other: Self) -> Self {
                self.wrapping_sub(other)
            }
            #[inline(always)]
            fn lane_mul(self, other: Self) -> Self {
                self.wrapping_mul(other)
            }
            #[inline(always)]
            fn min(self, other: Self) -> Self {
                Ord::min(self, other)
            }
            #[inline(always)]
            fn max(self, other: Self) -> Self {
                Ord::max(self, other)
            }
            #[inline(always)]
            fn accumulate(acc: $acc, x: Self) -> $acc {
                acc + <$acc>::from(x)
            }
        }
    };
}

int_element!(u8, U8, u32);
int_element!(u16, U16, u32);
int_element!(i16, I16, i64);
int_element!(i32, I32, i64);

impl Element for f32 {
    const KIND: ElementKind = ElementKind::F32;
    type Acc = f32;

    #[inline(always)]
    fn lane_add(self, other: Self) -> Self {
        self + other
    }
    #[inline(always)]
    fn lane_sub(self, other: Self) -> Self {
        self - other
    }
    #[inline(always)]
    fn lane_mul(self, other: Self) -> Self {
        self * other
    }
    // Same selection rule as the SSE min/max instructions: the second
    // operand wins unless the first compares strictly smaller (larger).
    #[inline(always)]
    fn min(self, other: Self) -> Self {
        if self < other {
            self
        } else {
            other
        }
    }
    #[inline(always)]
    fn max(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }
    #[inline(always)]
    fn accumulate(acc: f32, x: f32) -> f32 {
        acc + x
    }
}
