//! Seeded generators for randomized suites.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! results do not depend on thread scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::majorization::hlp_violation;
use crate::operators::{OperatorExpr, SignedPermutation};
use crate::procp::compute_regions;
use crate::scalar::Scalar;
use crate::seq::Seq;
use crate::step::StepFn;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `n/d` with `|n| ≤ max_num` and `1 ≤ d ≤ max_den`.
pub fn small_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn random_seq<R: Rng>(rng: &mut R, len: usize, exact: bool) -> Seq {
    if exact {
        Seq::new((0..len).map(|_| small_rational(rng, 20, 4)).collect())
    } else {
        Seq::from_f64s(&(0..len).map(|_| rng.gen_range(-10.0..10.0)).collect::<Vec<_>>())
    }
}

pub fn random_signed_permutation<R: Rng>(rng: &mut R, dim: usize) -> SignedPermutation {
    let mut sources: Vec<usize> = (0..dim).collect();
    sources.shuffle(rng);
    let map = sources
        .into_iter()
        .map(|s| Some((s, if rng.gen_bool(0.5) { 1 } else { -1 })))
        .collect();
    SignedPermutation::new(map).expect("a shuffle is a bijection")
}

/// Positive weights summing to one.
fn random_weights<R: Rng>(rng: &mut R, k: usize, exact: bool) -> Vec<Scalar> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter()
        .map(|w| {
            let s = Scalar::ratio(w, total);
            if exact {
                s
            } else {
                s.to_float()
            }
        })
        .collect()
}

/// A product of averaged signed permutations, diagonal contractions and
/// truncations on `dim` coordinates. Each factor has norm at most one on `ℓ¹`
/// and `ℓ∞`, hence on every `ℓ^r`.
pub fn random_contraction<R: Rng>(rng: &mut R, dim: usize, exact: bool) -> OperatorExpr {
    let dim = dim.max(1);
    let factors = rng.gen_range(1..=3);
    let mut out = Vec::with_capacity(factors);
    for _ in 0..factors {
        let op = match rng.gen_range(0..4) {
            0 | 1 => {
                let k = rng.gen_range(1..=3);
                let weights = random_weights(rng, k, exact);
                let terms = weights
                    .into_iter()
                    .map(|w| (w, random_signed_permutation(rng, dim)))
                    .collect();
                OperatorExpr::convex_combo(terms).expect("weights sum to one")
            }
            2 => {
                let entries = (0..dim)
                    .map(|_| {
                        let s = small_rational(rng, 4, 4);
                        let s = if s.abs() > Scalar::one() { Scalar::one() } else { s };
                        if exact {
                            s
                        } else {
                            s.to_float()
                        }
                    })
                    .collect();
                OperatorExpr::diagonal(entries).expect("entries within [-1, 1]")
            }
            _ => OperatorExpr::Truncation(rng.gen_range(0..=dim)),
        };
        out.push(op);
    }
    OperatorExpr::Composition(out)
}

/// `(x, T x, T)` with `T` a random contraction: `K(t, Tx) ≤ K(t, x)` for both
/// `(ℓ¹, ℓ∞)` and `(ℓ¹, ℓ^q)`.
pub fn k_dominated_pair<R: Rng>(rng: &mut R, max_len: usize, exact: bool) -> (Seq, Seq, OperatorExpr) {
    let len = rng.gen_range(1..=max_len.max(1));
    let x = random_seq(rng, len, exact);
    let op = random_contraction(rng, len, exact);
    let y = op.apply(&x).expect("operator acts on the block of x");
    (x, y, op)
}

/// Exact pair with `Σ_{n≤m} y*_n ≤ Σ_{n≤m} x*_n` for every `m`. Mixes contraction
/// images, truncations, and independent draws scaled down until the head sums fit,
/// which produces tight prefixes.
pub fn hlp_pair<R: Rng>(rng: &mut R, max_dim: usize) -> (Seq, Seq) {
    let len = rng.gen_range(1..=max_dim.max(1));
    let x = random_seq(rng, len, true);
    if x.is_zero() {
        return (x, Seq::zeros(len));
    }
    let y = match rng.gen_range(0..3) {
        0 => random_contraction(rng, len, true)
            .apply(&x)
            .expect("operator acts on the block of x"),
        1 => x.truncate_to(rng.gen_range(0..=len)),
        _ => {
            let len_y = rng.gen_range(1..=len);
            let y = random_seq(rng, len_y, true);
            let (hx, hy) = (x.rearrange(), y.rearrange());
            let mut worst = Scalar::zero();
            let (mut sx, mut sy) = (Scalar::zero(), Scalar::zero());
            for m in 0..len {
                sx = sx + hx.get(m);
                sy = sy + hy.get(m);
                // x ≠ 0, so every head sum of x* is positive.
                worst = worst.max(&sy / &sx);
            }
            if worst > Scalar::one() {
                y.scale(&(Scalar::one() / worst))
            } else {
                y
            }
        }
    };
    debug_assert!(hlp_violation(&x, &y).is_none());
    (x, y)
}

/// Nonincreasing exact step function with at most `max_len` cells made of up to
/// four plateaus with levels in `1..=top`.
fn random_profile<R: Rng>(rng: &mut R, max_len: usize, top: i64) -> StepFn {
    let len = rng.gen_range(1..=max_len.max(1));
    let plateaus = rng.gen_range(1..=4.min(len.max(1)));
    let mut levels: Vec<i64> = (0..plateaus).map(|_| rng.gen_range(1..=top)).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    let mut cells = Vec::with_capacity(len);
    for (i, level) in levels.iter().enumerate() {
        let remaining = len - cells.len();
        let width = if i + 1 == plateaus {
            remaining
        } else {
            rng.gen_range(1..=remaining - (plateaus - 1 - i))
        };
        cells.extend(std::iter::repeat(Scalar::int(*level)).take(width));
    }
    StepFn::new(cells)
}

/// `f` drops from a high plateau to a long low one while `g` stays at a middle
/// level in between, so the head integrals cross and the head region splits.
fn crossing_profiles<R: Rng>(rng: &mut R, max_support: usize) -> (StepFn, StepFn) {
    let n = max_support.max(4);
    let low = rng.gen_range(1..=2);
    let mid = rng.gen_range(low + 1..=low + 2);
    let high = rng.gen_range(mid + 1..=mid + 8);
    let high_len = rng.gen_range(1..=3.min(n / 4).max(1));
    let f_len = rng.gen_range(n / 2..=n).max(high_len + 1);
    let mid_len = rng.gen_range(1..=f_len / 2);
    let mut f = vec![Scalar::int(high); high_len];
    f.resize(f_len, Scalar::int(low));
    let mut g = vec![Scalar::int(mid); mid_len];
    if rng.gen_bool(0.5) {
        let extra = rng.gen_range(0..=f_len - mid_len);
        g.resize(mid_len + extra, Scalar::int(rng.gen_range(1..=low)));
    }
    (StepFn::new(f), StepFn::new(g))
}

/// Exact nonincreasing `(f, g)` with support at most `max_support` whose head and
/// tail regions cover `[0, ∞)`, by rejection sampling from a mixture of plateau
/// profiles, crossing profiles, and scaled prefixes of `f`.
pub fn procp_pair<R: Rng>(rng: &mut R, max_support: usize, q: u32) -> (StepFn, StepFn) {
    let q = Scalar::int(i64::from(q));
    let n = max_support.max(1);
    loop {
        let (f, g) = match rng.gen_range(0..5) {
            0 | 1 => crossing_profiles(rng, n),
            2 | 3 => {
                let f = random_profile(rng, n, 12);
                let g = random_profile(rng, n, 12);
                (f, g)
            }
            _ => {
                let f = random_profile(rng, n, 12);
                let len_g = rng.gen_range(0..=f.len());
                let shrink = Scalar::ratio(rng.gen_range(1..=7), 8);
                let g = StepFn::new(f.cells()[..len_g].iter().map(|v| v * &shrink).collect());
                (f, g)
            }
        };
        if compute_regions(&f, &g, &q).is_ok() {
            return (f, g);
        }
    }
}
