use majorant::{Bound, Interval, IntervalSet, PiecewiseAffine, Scalar, Seq, StepFn};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Scalar> {
    (-30i64..=30, 1i64..=6).prop_map(|(n, d)| Scalar::ratio(n, d))
}

fn exact_seq(max_len: usize) -> impl Strategy<Value = Seq> {
    prop::collection::vec(rational(), 0..=max_len).prop_map(Seq::new)
}

/// Unions of integer-endpoint pieces, some open and some closed, possibly unbounded.
fn interval_set() -> impl Strategy<Value = IntervalSet> {
    let piece = (0i64..12, 1i64..4, any::<bool>(), any::<bool>(), prop::bool::weighted(0.15)).prop_map(
        |(lo, width, lo_open, hi_open, unbounded)| {
            let hi = if unbounded { Bound::Infinity } else { Bound::At(Scalar::int(lo + width)) };
            Interval::new(Scalar::int(lo), lo_open, hi, hi_open || unbounded)
        },
    );
    prop::collection::vec(piece, 0..5).prop_map(IntervalSet::from_intervals)
}

/// Points on a half-integer grid hit every endpoint and every gap.
fn probe_points() -> Vec<Scalar> {
    (0..=36).map(|k| Scalar::ratio(k, 2)).collect()
}

proptest! {
    #[test]
    fn rearrangement_is_idempotent(x in exact_seq(20)) {
        let once = x.rearrange();
        prop_assert!(once.is_nonincreasing_nonnegative());
        prop_assert_eq!(once.rearrange(), once);
    }

    #[test]
    fn step_function_rearrangement_commutes_with_sampling(x in exact_seq(20)) {
        let from_sorted = StepFn::from_seq(&x.rearrange());
        prop_assert_eq!(StepFn::from_seq(&x).rearrange(), from_sorted);
    }

    #[test]
    fn head_and_tail_power_sums_split_the_total(x in exact_seq(16), m in 0usize..20, q in 1u32..4) {
        let q = Scalar::int(i64::from(q));
        let total = x.head_power_sum(&q, x.len()).unwrap();
        let split = x.head_power_sum(&q, m).unwrap() + x.tail_power_sum(&q, m + 1).unwrap();
        prop_assert_eq!(split, total);
    }

    #[test]
    fn head_sums_are_concave_in_the_cut(x in exact_seq(16)) {
        let heads: Vec<Scalar> = (0..=x.len()).map(|m| x.head_sum(m)).collect();
        for w in heads.windows(3) {
            prop_assert!(&w[1] - &w[0] >= &w[2] - &w[1]);
        }
    }

    #[test]
    fn positive_region_matches_pointwise_sign(knots in prop::collection::vec(-4i64..=4, 1..10)) {
        let p = PiecewiseAffine::from_knots(knots.into_iter().map(Scalar::int).collect());
        let region = p.positive_region();
        for k in 0..=96 {
            let t = Scalar::ratio(k, 8);
            prop_assert_eq!(region.contains(&t), p.eval(&t).is_positive(), "t = {}", t);
        }
        for piece in region.intervals() {
            if let Some(hi) = piece.hi.finite() {
                prop_assert!(p.eval(hi).is_zero());
            }
            if piece.lo.is_positive() {
                prop_assert!(p.eval(&piece.lo).is_zero());
            }
            if let Some(hi) = piece.hi.finite() {
                let mid = (&piece.lo + hi) * Scalar::ratio(1, 2);
                prop_assert!(p.eval(&mid).is_positive());
            }
        }
    }

    #[test]
    fn interval_set_operations_are_pointwise(a in interval_set(), b in interval_set()) {
        let (union, meet, diff, comp) = (a.union(&b), a.intersection(&b), a.difference(&b), a.complement());
        for t in probe_points() {
            let (in_a, in_b) = (a.contains(&t), b.contains(&t));
            prop_assert_eq!(union.contains(&t), in_a || in_b, "union at {}", t);
            prop_assert_eq!(meet.contains(&t), in_a && in_b, "intersection at {}", t);
            prop_assert_eq!(diff.contains(&t), in_a && !in_b, "difference at {}", t);
            prop_assert_eq!(comp.contains(&t), !in_a, "complement at {}", t);
        }
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert!(a.union(&comp).covers_half_line());
    }

    #[test]
    fn interval_set_components_are_disjoint_and_ordered(a in interval_set()) {
        for w in a.intervals().windows(2) {
            prop_assert!(w[0].precedes(&w[1]));
            prop_assert!(w[0].intersect(&w[1]).is_empty());
        }
    }
}

#[test]
fn masking_keeps_only_covered_cells() {
    let h = StepFn::from_seq(&Seq::from_ints(&[5, 4, 3, 2, 1]));
    let mask = IntervalSet::from_intervals(vec![
        Interval::closed_open(Scalar::int(1), Bound::At(Scalar::int(2))),
        Interval::closed_open(Scalar::int(3), Bound::Infinity),
    ]);
    let masked = h.mask(&mask).unwrap();
    assert_eq!(masked.as_seq(), &Seq::from_ints(&[0, 4, 0, 2, 1]));
    assert_eq!(masked.rearrange().as_seq(), &Seq::from_ints(&[4, 2, 1, 0, 0]));
}
