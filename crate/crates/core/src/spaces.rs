//! Concrete rearrangement-invariant sequence norms, a truncation probe for the
//! weak Fatou property, and a randomized search for counterexamples to the
//! `q`-power head-domination transfer property.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::trial_rng;
use crate::majorization::check_sq_premise;
use crate::scalar::Scalar;
use crate::seq::Seq;

/// A norm on finitely supported sequences. Test fixtures implement this directly;
/// [`SpaceSpec`] is the registry of exactly computable norms.
pub trait SequenceNorm: Sync {
    fn label(&self) -> String;
    fn norm(&self, x: &Seq) -> Scalar;
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    /// `ℓ^p`, `p ≥ 1`.
    Lp(Scalar),
    /// `ℓ^{p,∞}` with norm `sup_m m^{1/p−1} Σ_{n≤m} x*_n`, `p > 1`.
    WeakLp(Scalar),
    /// The closure of finite sequences in `ℓ^{p,∞}`: same norm, plus the requirement
    /// that `m^{1/p−1} Σ_{n≤m} x*_n → 0`.
    WeakLpSeparable(Scalar),
}

impl SpaceSpec {
    pub fn exponent(&self) -> &Scalar {
        match self {
            SpaceSpec::Lp(p) | SpaceSpec::WeakLp(p) | SpaceSpec::WeakLpSeparable(p) => p,
        }
    }

    fn validate(self) -> Result<Self> {
        let p = self.exponent();
        let ok = match &self {
            SpaceSpec::Lp(_) => p >= &Scalar::one(),
            _ => p > &Scalar::one(),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Parse(format!("exponent {p} out of range for {self}")))
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// `l1`, `lp:<p>`, `weak-lp:<p>`, `weak-lp-sep:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "l1" {
            return Ok(SpaceSpec::Lp(Scalar::one()));
        }
        let (kind, p) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown space {s:?}")))?;
        let p = Scalar::parse_exact(p)?;
        let spec = match kind {
            "lp" => SpaceSpec::Lp(p),
            "weak-lp" => SpaceSpec::WeakLp(p),
            "weak-lp-sep" => SpaceSpec::WeakLpSeparable(p),
            _ => return Err(Error::Parse(format!("unknown space kind {kind:?}"))),
        };
        spec.validate()
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp(p) if *p == Scalar::one() => write!(f, "l1"),
            SpaceSpec::Lp(p) => write!(f, "lp:{p}"),
            SpaceSpec::WeakLp(p) => write!(f, "weak-lp:{p}"),
            SpaceSpec::WeakLpSeparable(p) => write!(f, "weak-lp-sep:{p}"),
        }
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl SequenceNorm for SpaceSpec {
    fn label(&self) -> String {
        self.to_string()
    }

    fn norm(&self, x: &Seq) -> Scalar {
        space_norm(self, x)
    }
}

/// `max_m m^{1/p−1} S_m` over the partial sums `S_m` of a nonincreasing sequence.
fn weak_sup(sorted: impl Iterator<Item = f64>, p: f64) -> f64 {
    let power = 1.0 / p - 1.0;
    let mut sum = 0.0;
    let mut best = 0f64;
    for (i, v) in sorted.enumerate() {
        sum += v;
        best = best.max(((i + 1) as f64).powf(power) * sum);
    }
    best
}

/// Exact for `ℓ¹`, for integer `p` when the `p`-th root is rational, and for
/// weak spaces with `p = 1`; a float otherwise.
pub fn space_norm(space: &SpaceSpec, x: &Seq) -> Scalar {
    let p = space.exponent();
    match space {
        SpaceSpec::Lp(_) => {
            let abs = x.abs();
            if let (true, Some(n)) = (p.is_exact(), p.as_positive_u32()) {
                let total: Scalar = abs.values().iter().map(|v| v.powi(n)).sum();
                return total.root(p).0;
            }
            let pf = p.to_f64();
            let total: f64 = abs.values().iter().map(|v| v.to_f64().powf(pf)).sum();
            Scalar::float(total.powf(1.0 / pf))
        }
        SpaceSpec::WeakLp(_) | SpaceSpec::WeakLpSeparable(_) => {
            if *p == Scalar::one() {
                return x.abs().values().iter().sum();
            }
            let sorted = x.rearrange();
            Scalar::float(weak_sup(sorted.values().iter().map(Scalar::to_f64), p.to_f64()))
        }
    }
}

/// Nonnegative sequences the truncation probe can reason about beyond any finite prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqGen {
    Finite(Seq),
    /// `x_n = n^{−s}`.
    PowerLaw { s: f64 },
    /// `x_n = r^{n−1}`, `0 < r < 1`.
    Geometric { r: f64 },
}

impl SeqGen {
    fn term(&self, n: usize) -> f64 {
        match self {
            SeqGen::Finite(x) => x.get(n - 1).to_f64().abs(),
            SeqGen::PowerLaw { s } => (n as f64).powf(-s),
            SeqGen::Geometric { r } => r.powi(n as i32 - 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WfpProbe {
    /// `sup_{N ≤ N_max} ‖Π_N x‖_E`.
    pub sup_truncated: f64,
    pub full_in_e: bool,
    /// Norm of the whole sequence when it lies in `E` and is computable.
    pub full_norm: Option<f64>,
    /// `sup_truncated / full_norm`.
    pub ratio: Option<f64>,
    /// `N^{1/p−1} Σ_{n≤N} x*_n` at `N = N_max`, for the weak spaces.
    pub limit_term: Option<f64>,
}

/// `Σ_{n>N} n^{−a}` by Euler–Maclaurin, `a > 1`.
fn zeta_tail(a: f64, n: usize) -> f64 {
    let n = n as f64;
    n.powf(1.0 - a) / (a - 1.0) - 0.5 * n.powf(-a) + a / 12.0 * n.powf(-a - 1.0)
}

/// Truncation norms of `x` up to `n_max`, and whether `x` itself belongs to `E`.
/// The generators are nonincreasing, so each truncation is already rearranged and
/// truncated norms grow with `N`; the supremum is attained at `N_max`.
pub fn wfp_probe(space: &SpaceSpec, x: &SeqGen, n_max: usize) -> WfpProbe {
    assert!(n_max > 0, "need at least one term");
    if let SeqGen::Finite(seq) = x {
        let full = space_norm(space, seq).to_f64();
        let cut = space_norm(space, &seq.truncate_to(n_max)).to_f64();
        let p = space.exponent().to_f64();
        let limit_term = match space {
            SpaceSpec::Lp(_) => None,
            _ => {
                let head: f64 = seq.rearrange().values().iter().take(n_max).map(Scalar::to_f64).sum();
                Some((n_max as f64).powf(1.0 / p - 1.0) * head)
            }
        };
        return WfpProbe {
            sup_truncated: cut,
            full_in_e: true,
            full_norm: Some(full),
            ratio: (full > 0.0).then(|| cut / full),
            limit_term,
        };
    }
    let p = space.exponent().to_f64();
    let terms = (1..=n_max).map(|n| x.term(n));
    let (sup_truncated, limit_term) = match space {
        SpaceSpec::Lp(_) => (terms.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p), None),
        _ => {
            let sup = weak_sup(terms.clone(), p);
            let sum: f64 = terms.sum();
            (sup, Some((n_max as f64).powf(1.0 / p - 1.0) * sum))
        }
    };
    let (full_in_e, full_norm) = match (space, x) {
        (_, SeqGen::Finite(_)) => unreachable!("handled above"),
        (SpaceSpec::Lp(_), SeqGen::Geometric { r }) => {
            (true, Some((1.0 / (1.0 - r.powf(p))).powf(1.0 / p)))
        }
        (SpaceSpec::Lp(_), SeqGen::PowerLaw { s }) => {
            let a = s * p;
            if a > 1.0 {
                let head: f64 = (1..=n_max).map(|n| (n as f64).powf(-a)).sum();
                (true, Some((head + zeta_tail(a, n_max)).powf(1.0 / p)))
            } else {
                (false, None)
            }
        }
        (_, SeqGen::Geometric { r }) => {
            // The weighted partial sums peak early and then decay like m^{1/p−1}.
            let horizon = n_max.max(100_000);
            (true, Some(weak_sup((1..=horizon).map(|n| r.powi(n as i32 - 1)), p)))
        }
        (_, SeqGen::PowerLaw { s }) => {
            let critical = 1.0 / p;
            let separable = matches!(space, SpaceSpec::WeakLpSeparable(_));
            if (s - critical).abs() <= 1e-12 {
                // The weighted partial sums increase to p/(p−1) without reaching it.
                (!separable, (!separable).then(|| p / (p - 1.0)))
            } else if *s > critical {
                (true, None)
            } else {
                (false, None)
            }
        }
    };
    WfpProbe {
        sup_truncated,
        full_in_e,
        full_norm,
        ratio: full_norm.filter(|n| *n > 0.0).map(|n| sup_truncated / n),
        limit_term,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqWitness {
    pub trial: usize,
    pub u: Seq,
    pub v: Seq,
    pub norm_u: f64,
    pub norm_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqProbe {
    pub space: String,
    pub trials: usize,
    /// Samples whose float premise check failed and were skipped.
    pub premise_rejects: usize,
    pub violations: Vec<SqWitness>,
}

/// A pair `(u, v)` with `Σ_{n≤N} (u*_n)^q ≤ Σ_{n≤N} (v*_n)^q` and equal totals:
/// `v*` is random, and the `q`-th powers of `u` come from `v*^q`, padded with zeros,
/// by averaging random pairs of coordinates (each average is majorized by its input).
pub fn sample_sq_pair<R: Rng>(rng: &mut R, max_len: usize, q: f64) -> (Seq, Seq) {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut v: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..10.0)).collect();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let pad = rng.gen_range(0..=len);
    let mut w: Vec<f64> = v.iter().map(|x| x.powf(q)).collect();
    w.resize(len + pad, 0.0);
    let moves = rng.gen_range(0..=2 * w.len());
    for _ in 0..moves {
        let i = rng.gen_range(0..w.len());
        let j = rng.gen_range(0..w.len());
        let lambda: f64 = rng.gen_range(0.0..=0.5);
        let (a, b) = (w[i], w[j]);
        w[i] = (1.0 - lambda) * a + lambda * b;
        w[j] = lambda * a + (1.0 - lambda) * b;
    }
    let mut u: Vec<f64> = w.iter().map(|x| x.max(0.0).powf(1.0 / q)).collect();
    u.shuffle(rng);
    for x in &mut u {
        if rng.gen_bool(0.5) {
            *x = -*x;
        }
    }
    (Seq::from_f64s(&u), Seq::from_f64s(&v))
}

/// Randomized search for premise pairs with `‖v‖_E > C‖u‖_E`. Trials run in
/// parallel with independent per-trial streams; violations are sorted by trial.
pub fn sq_probe(space: &dyn SequenceNorm, q: f64, c: f64, trials: usize, seed: u64) -> SqProbe {
    assert!(q > 1.0 && c >= 1.0, "need q > 1 and C ≥ 1");
    let q_scalar = Scalar::float(q);
    let results: Vec<(bool, Option<SqWitness>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let (u, v) = sample_sq_pair(&mut rng, 24, q);
            let premise = check_sq_premise(&u, &v, &q_scalar).map_or(false, |p| p.holds);
            if !premise {
                return (false, None);
            }
            let norm_u = space.norm(&u).to_f64();
            let norm_v = space.norm(&v).to_f64();
            let bound = c * norm_u;
            let witness = (norm_v > bound + 1e-9 * bound.max(1.0)).then(|| SqWitness {
                trial,
                u,
                v,
                norm_u,
                norm_v,
            });
            (true, witness)
        })
        .collect();
    let premise_rejects = results.iter().filter(|(ok, _)| !ok).count();
    let violations = results.into_iter().filter_map(|(_, w)| w).collect();
    SqProbe {
        space: space.label(),
        trials,
        premise_rejects,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(s: &str) -> SpaceSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["l1", "lp:3/2", "weak-lp:2", "weak-lp-sep:6/5"] {
            assert_eq!(space(s).to_string(), s);
        }
        assert_eq!(space("lp:1"), SpaceSpec::Lp(Scalar::one()));
        assert!("weak-lp:1".parse::<SpaceSpec>().is_err());
        assert!("lp:1/2".parse::<SpaceSpec>().is_err());
        assert!("linf".parse::<SpaceSpec>().is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(space_norm(&space("l1"), &Seq::from_ints(&[1, -2])), Scalar::int(3));
        assert_eq!(space_norm(&space("lp:2"), &Seq::from_ints(&[3, 4])), Scalar::int(5));
        let weak = space_norm(&space("weak-lp:2"), &Seq::from_ints(&[1, 1])).to_f64();
        assert!((weak - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn separable_norm_matches_weak_norm() {
        let x = Seq::from_ints(&[5, -1, 3, 0, 2]);
        assert_eq!(
            space_norm(&space("weak-lp:3/2"), &x),
            space_norm(&space("weak-lp-sep:3/2"), &x)
        );
    }

    #[test]
    fn geometric_truncations_approach_the_lp_norm() {
        let probe = wfp_probe(&space("lp:2"), &SeqGen::Geometric { r: 0.5 }, 60);
        assert!(probe.full_in_e);
        assert!((probe.ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_sequences_have_ratio_one() {
        let x = SeqGen::Finite(Seq::from_ints(&[3, 1, 2]));
        for s in ["l1", "lp:3", "weak-lp:2"] {
            assert_eq!(wfp_probe(&space(s), &x, 10).ratio, Some(1.0));
        }
    }

    #[test]
    fn critical_power_law_escapes_the_separable_part() {
        let probe = wfp_probe(&space("weak-lp-sep:2"), &SeqGen::PowerLaw { s: 0.5 }, 10_000);
        assert!(!probe.full_in_e);
        assert!(probe.sup_truncated < 2.0);
        assert!((probe.limit_term.unwrap() - 2.0).abs() < 0.02);
    }

    struct SupNorm;

    impl SequenceNorm for SupNorm {
        fn label(&self) -> String {
            "sup".into()
        }

        fn norm(&self, x: &Seq) -> Scalar {
            x.abs().values().iter().cloned().fold(Scalar::zero(), Scalar::max)
        }
    }

    #[test]
    fn probe_finds_nothing_for_l1_but_catches_the_sup_norm() {
        let clean = sq_probe(&space("l1"), 2.0, 1.0, 300, 7);
        assert!(clean.violations.is_empty(), "{:?}", clean.violations.first());
        assert!(clean.premise_rejects < 30);
        let caught = sq_probe(&SupNorm, 2.0, 1.0, 300, 7);
        assert!(!caught.violations.is_empty());
    }

    #[test]
    fn probe_is_deterministic() {
        let a = sq_probe(&SupNorm, 2.0, 1.0, 50, 3);
        let b = sq_probe(&SupNorm, 2.0, 1.0, 50, 3);
        assert_eq!(a, b);
    }
}
