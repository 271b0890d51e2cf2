//! Squared-distance and dot-product kernels.
//!
//! Element `i` is accumulated into stripe `i % STRIPES`; the stripes are then
//! summed in ascending order. A wide word covers exactly the stripes, and a
//! narrow path keeps four narrow accumulators, so every variant performs the
//! same roundings in the same order and the results are bit-identical.

use crate::vecabi::{narrow, wide, FloatWord, RegisterGroup, VecWord};
use crate::Variant;

/// Number of interleaved partial sums.
pub const STRIPES: usize = 16;

#[derive(Clone, Copy)]
enum Op {
    SqDist,
    Dot,
}

#[inline(always)]
fn term(op: Op, a: f32, b: f32) -> f32 {
    match op {
        Op::SqDist => {
            let d = a - b;
            d * d
        }
        Op::Dot => a * b,
    }
}

#[inline(always)]
fn term_v<V: FloatWord>(op: Op, a: V, b: V) -> V {
    match op {
        Op::SqDist => {
            let d = a.sub(b);
            d.mul(d)
        }
        Op::Dot => a.mul(b),
    }
}

#[inline(always)]
fn finish(mut stripes: [f32; STRIPES], a: &[f32], b: &[f32], from: usize, op: Op) -> f32 {
    for i in from..a.len() {
        stripes[i % STRIPES] += term(op, a[i], b[i]);
    }
    stripes.iter().fold(0.0, |s, &x| s + x)
}

fn scalar(op: Op, a: &[f32], b: &[f32]) -> f32 {
    finish([0.0; STRIPES], a, b, 0, op)
}

fn grouped<G>(op: Op, a: &[f32], b: &[f32]) -> f32
where
    G: FloatWord + RegisterGroup,
    G::Part: FloatWord,
{
    debug_assert_eq!(G::LANES, STRIPES);
    let n = a.len() - a.len() % STRIPES;
    let mut acc = G::splat(0.0);
    let mut i = 0;
    while i < n {
        acc = acc.add(term_v(op, G::from_slice(&a[i..]), G::from_slice(&b[i..])));
        i += STRIPES;
    }
    let mut stripes = [0.0f32; STRIPES];
    acc.write_to(&mut stripes);
    finish(stripes, a, b, n, op)
}

/// Narrow path: four independent narrow accumulators, one per stripe group.
fn narrow_path(op: Op, a: &[f32], b: &[f32]) -> f32 {
    type N = narrow::F32x4;
    let n = a.len() - a.len() % STRIPES;
    let mut acc = [N::splat(0.0); 4];
    let mut i = 0;
    while i < n {
        for (p, slot) in acc.iter_mut().enumerate() {
            let o = i + p * N::LANES;
            *slot = slot.add(term_v(op, N::from_slice(&a[o..]), N::from_slice(&b[o..])));
        }
        i += STRIPES;
    }
    let mut stripes = [0.0f32; STRIPES];
    for (p, slot) in acc.iter().enumerate() {
        slot.write_to(&mut stripes[p * N::LANES..]);
    }
    finish(stripes, a, b, n, op)
}

fn dispatch(op: Op, a: &[f32], b: &[f32], variant: Variant) -> f32 {
    assert_eq!(a.len(), b.len(), "operand lengths differ");
    match variant {
        Variant::Scalar => scalar(op, a, b),
        Variant::VecNarrow => narrow_path(op, a, b),
        Variant::VecWide => grouped::<wide::F32x16>(op, a, b),
    }
}

/// `sum (a_i - b_i)^2` in stripe order.
pub fn sq_dist(a: &[f32], b: &[f32], variant: Variant) -> f32 {
    dispatch(Op::SqDist, a, b, variant)
}

/// `sum a_i * b_i` in stripe order.
pub fn dot(a: &[f32], b: &[f32], variant: Variant) -> f32 {
    dispatch(Op::Dot, a, b, variant)
}

/// Index and squared distance of the nearest row of `centroids`
/// (`dim`-wide rows). Ties go to the lowest index.
pub fn nearest(x: &[f32], centroids: &[f32], dim: usize, variant: Variant) -> (usize, f32) {
    let mut best = (0, f32::INFINITY);
    for (c, row) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(x, row, variant);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}
