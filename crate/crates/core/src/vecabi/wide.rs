//! 512-bit words as a group of four narrow registers.
//!
//! Every operation is issued as four independent narrow operations in part
//! order, so a wide loop iteration behaves like a narrow loop unrolled four
//! times. Widening a wide word goes through its narrow parts, the same
//! regrouping a compiler without direct group-to-group conversions needs.

use super::{narrow, Backend, FloatWord, RegisterGroup, VecWord, Widen, WidthClass, GROUP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wide<P>(pub [P; GROUP]);

impl<P: VecWord> Wide<P> {
    #[inline(always)]
    fn map2(self, other: Self, f: impl Fn(P, P) -> P) -> Self {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = other.0;
        Wide([f(a0, b0), f(a1, b1), f(a2, b2), f(a3, b3)])
    }
}

impl<P: VecWord> VecWord for Wide<P> {
    type Elem = P::Elem;
    const LANES: usize = P::LANES * GROUP;
    const CLASS: WidthClass = WidthClass::Wide;
    const BACKEND: Backend = match P::BACKEND {
        Backend::NativeNarrow => Backend::SynthWide,
        other => other,
    };

    #[inline(always)]
    fn splat(x: Self::Elem) -> Self {
        let p = P::splat(x);
        Wide([p; GROUP])
    }

    /// Four independent narrow loads at consecutive offsets.
    #[inline(always)]
    fn from_slice(buf: &[Self::Elem]) -> Self {
        let buf = &buf[..Self::LANES];
        let n = P::LANES;
        Wide([
            P::from_slice(&buf[..n]),
            P::from_slice(&buf[n..2 * n]),
            P::from_slice(&buf[2 * n..3 * n]),
            P::from_slice(&buf[3 * n..]),
        ])
    }

    #[inline(always)]
    fn write_to(self, buf: &mut [Self::Elem]) {
        let buf = &mut buf[..Self::LANES];
        for (part, chunk) in self.0.into_iter().zip(buf.chunks_exact_mut(P::LANES)) {
            part.write_to(chunk);
        }
    }

    #[inline(always)]
    fn add(self, o: Self) -> Self {
        self.map2(o, P::add)
    }
    #[inline(always)]
    fn sub(self, o: Self) -> Self {
        self.map2(o, P::sub)
    }
    #[inline(always)]
    fn mul(self, o: Self) -> Self {
        self.map2(o, P::mul)
    }
    #[inline(always)]
    fn min(self, o: Self) -> Self {
        self.map2(o, P::min)
    }
    #[inline(always)]
    fn max(self, o: Self) -> Self {
        self.map2(o, P::max)
    }
}

impl<P: FloatWord> FloatWord for Wide<P> {
    #[inline(always)]
    fn store_round_u8(self, out: &mut [u8]) {
        let out = &mut out[..Self::LANES];
        for (part, chunk) in self.0.into_iter().zip(out.chunks_exact_mut(P::LANES)) {
            part.store_round_u8(chunk);
        }
    }
}

impl<P: Widen> Widen for Wide<P>
where
    P::Wider: VecWord,
{
    type Wider = Wide<P::Wider>;

    fn widen_lo(self) -> Self::Wider {
        let [p0, p1, _, _] = self.0;
        Wide([p0.widen_lo(), p0.widen_hi(), p1.widen_lo(), p1.widen_hi()])
    }

    fn widen_hi(self) -> Self::Wider {
        let [_, _, p2, p3] = self.0;
        Wide([p2.widen_lo(), p2.widen_hi(), p3.widen_lo(), p3.widen_hi()])
    }

    fn narrow(lo: Self::Wider, hi: Self::Wider) -> Self {
        let [l0, l1, l2, l3] = lo.0;
        let [h0, h1, h2, h3] = hi.0;
        Wide([P::narrow(l0, l1), P::narrow(l2, l3), P::narrow(h0, h1), P::narrow(h2, h3)])
    }
}

impl<P: VecWord> RegisterGroup for Wide<P> {
    type Part = P;

    fn from_parts(parts: [P; GROUP]) -> Self {
        Wide(parts)
    }

    fn parts(self) -> [P; GROUP] {
        self.0
    }
}

pub type U8x64 = Wide<narrow::U8x16>;
pub type U16x32 = Wide<narrow::U16x8>;
pub type I16x32 = Wide<narrow::I16x8>;
pub type I32x16 = Wide<narrow::I32x4>;
pub type F32x16 = Wide<narrow::F32x4>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_lane_order() {
        let w = U8x64::from_parts(std::array::from_fn(|i| narrow::U8x16::splat(i as u8)));
        let lanes = w.to_vec();
        for (j, &v) in lanes.iter().enumerate() {
            assert_eq!(v as usize, j / 16);
        }
        assert_eq!(w.reduce_sum(), 16 * (1 + 2 + 3));
        assert_eq!(U8x64::splat(1).reduce_sum(), 64);
    }

    #[test]
    fn wide_load_is_four_narrow_loads() {
        let buf: Vec<u8> = (0..64).collect();
        let w = U8x64::load(&buf, 0).unwrap();
        for (p, part) in w.parts().into_iter().enumerate() {
            assert_eq!(part, narrow::U8x16::load(&buf, 16 * p).unwrap());
        }
    }
}
