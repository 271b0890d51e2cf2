//! Randomized backend checks: native narrow and synthesized wide words
//! against the scalar reference, plus the wide = 4 x narrow coherence law.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use univec::vecabi::{narrow, scalar, wide, Element, FloatWord, RegisterGroup, VecWord, Widen, GROUP};

pub const TRIALS: usize = 10_000;

pub trait Sample: Element {
    fn sample(rng: &mut StdRng) -> Self;
}

macro_rules! sample_int {
    ($($t:ty),*) => {$(
        impl Sample for $t {
            fn sample(rng: &mut StdRng) -> Self {
                rng.random()
            }
        }
    )*};
}
sample_int!(u8, u16, i16, i32);

impl Sample for f32 {
    fn sample(rng: &mut StdRng) -> Self {
        // Mix of magnitudes, signs and exact zeros.
        match rng.random_range(0..8) {
            0 => 0.0,
            1 => -0.0,
            _ => {
                let mag: f32 = rng.random_range(-20.0..20.0);
                rng.random_range(-1.0f32..1.0) * mag.exp2()
            }
        }
    }
}

fn random_lanes<T: Sample>(rng: &mut StdRng, n: usize) -> Vec<T> {
    (0..n).map(|_| T::sample(rng)).collect()
}

pub fn ulp_distance(a: f32, b: f32) -> u32 {
    if a == b {
        return 0;
    }
    let key = |x: f32| {
        let bits = x.to_bits() as i32;
        if bits < 0 {
            i32::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

fn assert_lanes_eq<T: Element>(got: &[T], want: &[T], what: &str) {
    if T::KIND == univec::vecabi::ElementKind::F32 {
        // Compare through the f32 view for ulp distance.
        let got: Vec<f32> = got.iter().map(|x| as_f32(*x)).collect();
        let want: Vec<f32> = want.iter().map(|x| as_f32(*x)).collect();
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!(ulp_distance(*g, *w) <= 1, "{what}: lane {i}: {g} vs {w}");
        }
    } else {
        assert_eq!(got, want, "{what}");
    }
}

fn as_f32<T: Element>(x: T) -> f32 {
    // Only called for f32 elements.
    let any: &dyn std::any::Any = &x;
    *any.downcast_ref::<f32>().unwrap()
}

type BinOp<W> = fn(W, W) -> W;

fn ops<W: VecWord>() -> [(&'static str, BinOp<W>); 5] {
    [("add", W::add), ("sub", W::sub), ("mul", W::mul), ("min", W::min), ("max", W::max)]
}

/// Every binary op, splat, load/store and both reductions of `W` match the
/// reference `R` on random inputs.
pub fn check_equivalent<W, R>(seed: u64)
where
    W: VecWord,
    R: VecWord<Elem = W::Elem>,
    W::Elem: Sample,
{
    assert_eq!(W::LANES, R::LANES);
    let mut rng = StdRng::seed_from_u64(seed);
    for (name, op) in ops::<W>() {
        let ref_op = ops::<R>().into_iter().find(|(n, _)| *n == name).unwrap().1;
        for _ in 0..TRIALS {
            let a = random_lanes::<W::Elem>(&mut rng, W::LANES);
            let b = random_lanes::<W::Elem>(&mut rng, W::LANES);
            let got = op(W::from_slice(&a), W::from_slice(&b)).to_vec();
            let want = ref_op(R::from_slice(&a), R::from_slice(&b)).to_vec();
            assert_lanes_eq(&got, &want, name);
        }
    }
    for _ in 0..TRIALS {
        let a = random_lanes::<W::Elem>(&mut rng, W::LANES + 3);
        let offset = rng.random_range(0..=3);
        let w = W::load(&a, offset).unwrap();
        let r = R::load(&a, offset).unwrap();
        assert_eq!(w.to_vec(), r.to_vec());
        assert_eq!(w.to_vec(), &a[offset..offset + W::LANES]);
        let mut out = vec![W::Elem::default(); W::LANES + 3];
        w.store(&mut out, offset).unwrap();
        assert_eq!(&out[offset..offset + W::LANES], &a[offset..offset + W::LANES]);
        assert_eq!(w.reduce_sum(), r.reduce_sum(), "reduce_sum");
        assert_eq!(w.reduce_min(), r.reduce_min(), "reduce_min");
        let x = a[0];
        assert_eq!(W::splat(x).to_vec(), R::splat(x).to_vec());
    }
}

/// `f(wide) == from_parts(map f over parts)` for every binary op.
pub fn check_coherent<G>(seed: u64)
where
    G: RegisterGroup,
    G::Elem: Sample,
{
    let mut rng = StdRng::seed_from_u64(seed);
    for ((name, op), (_, part_op)) in ops::<G>().into_iter().zip(ops::<G::Part>()) {
        for _ in 0..TRIALS {
            let a = G::from_slice(&random_lanes::<G::Elem>(&mut rng, G::LANES));
            let b = G::from_slice(&random_lanes::<G::Elem>(&mut rng, G::LANES));
            let pa = a.parts();
            let pb = b.parts();
            let parts: [G::Part; GROUP] = std::array::from_fn(|i| part_op(pa[i], pb[i]));
            let got = op(a, b).to_vec();
            let want = G::from_parts(parts).to_vec();
            assert_lanes_eq(&got, &want, name);
        }
    }
    for _ in 0..TRIALS {
        let a = G::from_slice(&random_lanes::<G::Elem>(&mut rng, G::LANES));
        let back = G::from_parts(a.parts());
        assert_eq!(back.to_vec(), a.to_vec(), "parts round trip");
    }
}

pub fn check_fma<W: FloatWord>(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..TRIALS {
        let a = random_lanes::<f32>(&mut rng, W::LANES);
        let b = random_lanes::<f32>(&mut rng, W::LANES);
        let c = random_lanes::<f32>(&mut rng, W::LANES);
        let got = W::from_slice(&a).fma(W::from_slice(&b), W::from_slice(&c)).to_vec();
        for i in 0..W::LANES {
            let want = c[i] + a[i] * b[i];
            assert!(ulp_distance(got[i], want) <= 1, "fma lane {i}");
        }
    }
    let seven = W::splat(2.0).fma(W::splat(3.0), W::splat(1.0));
    assert_eq!(seven.to_vec(), vec![7.0; W::LANES]);
    let c = W::from_slice(&random_lanes::<f32>(&mut rng, W::LANES));
    let a = W::from_slice(&random_lanes::<f32>(&mut rng, W::LANES));
    assert_eq!(a.fma(W::splat(0.0), c).to_vec(), c.to_vec());
}

pub fn check_round<W: FloatWord, R: FloatWord>(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..TRIALS {
        let a: Vec<f32> = (0..W::LANES)
            .map(|_| match rng.random_range(0..4) {
                0 => rng.random_range(-300..600) as f32 + 0.5,
                _ => rng.random_range(-300.0f32..600.0),
            })
            .collect();
        let mut got = vec![0u8; W::LANES];
        let mut want = vec![0u8; W::LANES];
        W::from_slice(&a).store_round_u8(&mut got);
        R::from_slice(&a).store_round_u8(&mut want);
        assert_eq!(got, want, "{a:?}");
    }
}

pub fn check_widen<W, R>(seed: u64)
where
    W: Widen,
    R: Widen<Elem = W::Elem>,
    W::Elem: Sample,
    <W::Wider as VecWord>::Elem: PartialEq,
    R::Wider: VecWord<Elem = <W::Wider as VecWord>::Elem>,
{
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..TRIALS {
        let a = random_lanes::<W::Elem>(&mut rng, W::LANES);
        let w = W::from_slice(&a);
        let r = R::from_slice(&a);
        let (lo, hi) = (w.widen_lo(), w.widen_hi());
        assert_eq!(lo.to_vec(), r.widen_lo().to_vec(), "widen_lo");
        assert_eq!(hi.to_vec(), r.widen_hi().to_vec(), "widen_hi");
        assert_eq!(W::narrow(lo, hi).to_vec(), a, "narrow round trip");
        // Narrowing arbitrary wide lanes truncates.
        let wl = W::Wider::from_slice(&random_lanes_wider::<W>(&mut rng));
        let wh = W::Wider::from_slice(&random_lanes_wider::<W>(&mut rng));
        let rl = R::Wider::from_slice(&wl.to_vec());
        let rh = R::Wider::from_slice(&wh.to_vec());
        assert_eq!(W::narrow(wl, wh).to_vec(), R::narrow(rl, rh).to_vec(), "narrow");
    }
}

fn random_lanes_wider<W: Widen>(rng: &mut StdRng) -> Vec<<W::Wider as VecWord>::Elem>
where
    W::Elem: Sample,
{
    // Build wider lanes through a reference word so we stay generic: widen
    // random words and scramble with wrapping arithmetic.
    let a = W::from_slice(&random_lanes::<W::Elem>(rng, W::LANES));
    let b = W::from_slice(&random_lanes::<W::Elem>(rng, W::LANES));
    let x = a.widen_lo().mul(b.widen_hi()).add(b.widen_lo().mul(b.widen_lo()));
    x.to_vec()
}

/// Every check above over every backend and element kind.
pub fn full_suite(seed: u64) {
    check_equivalent::<narrow::U8x16, scalar::U8x16>(seed);
    check_equivalent::<narrow::U16x8, scalar::U16x8>(seed + 1);
    check_equivalent::<narrow::I16x8, scalar::I16x8>(seed + 2);
    check_equivalent::<narrow::I32x4, scalar::I32x4>(seed + 3);
    check_equivalent::<narrow::F32x4, scalar::F32x4>(seed + 4);
    check_equivalent::<wide::U8x64, scalar::U8x64>(seed + 5);
    check_equivalent::<wide::U16x32, scalar::U16x32>(seed + 6);
    check_equivalent::<wide::I16x32, scalar::I16x32>(seed + 7);
    check_equivalent::<wide::I32x16, scalar::I32x16>(seed + 8);
    check_equivalent::<wide::F32x16, scalar::F32x16>(seed + 9);
    check_coherent::<wide::U8x64>(seed + 10);
    check_coherent::<wide::U16x32>(seed + 11);
    check_coherent::<wide::I16x32>(seed + 12);
    check_coherent::<wide::I32x16>(seed + 13);
    check_coherent::<wide::F32x16>(seed + 14);
    check_fma::<scalar::F32x4>(seed + 15);
    check_fma::<narrow::F32x4>(seed + 16);
    check_fma::<wide::F32x16>(seed + 17);
    check_round::<narrow::F32x4, scalar::F32x4>(seed + 18);
    check_round::<wide::F32x16, scalar::F32x16>(seed + 19);
    check_widen::<narrow::U8x16, scalar::U8x16>(seed + 20);
    check_widen::<narrow::I16x8, scalar::I16x8>(seed + 21);
    check_widen::<wide::U8x64, scalar::U8x64>(seed + 22);
    check_widen::<wide::I16x32, scalar::I16x32>(seed + 23);
}
