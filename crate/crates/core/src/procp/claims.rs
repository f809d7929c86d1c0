//! Checks of the two local lemmas driving each step of the decomposition.
//!
//! Both conclusions compare integrals of piecewise-constant functions, so the
//! differences are piecewise affine with integer knots. Checking every integer
//! in range, the endpoints, and the cell midpoints decides them exactly.

use serde::Serialize;

use super::ABRegions;
use crate::error::{Error, Result};
use crate::interval::{Bound, Interval, IntervalSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: &'static str,
    pub points_checked: usize,
    /// `a♣` for the head-side claim, `b♦` for the tail side.
    pub anchor: Scalar,
    /// The head-side claim's `B ∖ A` point among `a♦`, `a♦ + 1`, when `ã` is finite.
    pub successor: Option<Scalar>,
}

/// Points of `[lo, hi]` that decide the sign of an affine-on-unit-cells function.
/// An infinite `hi` is cut one cell past `last_knot`, where the function is constant.
fn decisive_points(lo: &Scalar, hi: &Bound, last_knot: usize) -> Vec<Scalar> {
    let end = match hi {
        Bound::At(h) => h.clone(),
        Bound::Infinity => lo.clone().max(Scalar::from_index(last_knot)) + Scalar::one(),
    };
    let half = Scalar::ratio(1, 2);
    let mut points = vec![lo.clone()];
    let mut k = lo.floor();
    while k < end {
        if &k > lo {
            points.push(k.clone());
        }
        let mid = &k + &half;
        if &mid > lo && mid < end {
            points.push(mid);
        }
        k = k + Scalar::one();
    }
    if &end > lo {
        points.push(end);
    }
    points
}

fn open_interval_inside(lo: &Scalar, hi: &Bound, set: &IntervalSet) -> bool {
    IntervalSet::from(Interval::open(lo.clone(), hi.clone()))
        .difference(set)
        .is_empty()
}

/// With `(a, ã) ⊆ A` and `a`, finite `ã` on the boundary of `A`, checks
/// `∫_{a♣}^t g ≤ ∫_{a♣}^t f` on `[a♣, max(ã, a♣+1)]`, `g(a♣) ≤ f(a♣)`, and, for
/// finite `ã`, that `a♦` or `a♦ + 1` lies in `B ∖ A`.
pub fn verify_claim_a(regions: &ABRegions, a: &Scalar, a_tilde: &Bound) -> Result<ClaimReport> {
    let ordered = !a.is_negative() && Bound::At(a.clone()) < *a_tilde;
    let boundary_right = a_tilde.finite().map_or(true, |t| !regions.a.contains(t));
    if !ordered
        || regions.a.contains(a)
        || !boundary_right
        || !open_interval_inside(a, a_tilde, &regions.a)
    {
        return Err(Error::PremiseViolated(format!(
            "({a}, {a_tilde}) is not a component of A"
        )));
    }
    let a_club = a.floor();
    let one_past = &a_club + &Scalar::one();
    let upper = match a_tilde {
        Bound::Infinity => Bound::Infinity,
        Bound::At(t) => Bound::At(t.clone().max(one_past.clone())),
    };
    let base = regions.phi_l1.eval(&a_club);
    let points = decisive_points(&a_club, &upper, regions.phi_l1.last_knot());
    for t in &points {
        let gap = regions.phi_l1.eval(t) - &base;
        if gap.is_negative() {
            return Err(Error::invariant(
                "head claim: integral inequality",
                0,
                format!("∫ from {a_club} to {t} of (f − g) is {gap}"),
            ));
        }
    }
    let (fv, gv) = (regions.f.value_at(&a_club), regions.g.value_at(&a_club));
    if !gv.le_tol(&fv) {
        return Err(Error::invariant(
            "head claim: pointwise inequality",
            0,
            format!("g({a_club}) = {gv} exceeds f({a_club}) = {fv}"),
        ));
    }
    let successor = match &upper {
        Bound::Infinity => None,
        Bound::At(u) => {
            let a_diamond = u.floor();
            let next = &a_diamond + &Scalar::one();
            let pick = [next, a_diamond.clone()]
                .into_iter()
                .find(|c| regions.in_b_only(c));
            match pick {
                Some(c) => Some(c),
                None => {
                    return Err(Error::invariant(
                        "head claim: successor",
                        0,
                        format!("neither {a_diamond} nor its successor lies in B ∖ A"),
                    ))
                }
            }
        }
    };
    Ok(ClaimReport {
        claim: "head",
        points_checked: points.len() + 1,
        anchor: a_club,
        successor,
    })
}

/// With `(β, b) ⊆ B` and `b` on the boundary of `B`, checks
/// `∫_t^{b♦} g^q ≤ ∫_t^{b♦} f^q` for `t ∈ [β, b♦]`, `b♦ = ⌈b⌉`.
pub fn verify_claim_b(regions: &ABRegions, beta: &Scalar, b: &Scalar) -> Result<ClaimReport> {
    let hi = Bound::At(b.clone());
    if beta.is_negative()
        || beta >= b
        || regions.b.contains(b)
        || !open_interval_inside(beta, &hi, &regions.b)
    {
        return Err(Error::PremiseViolated(format!(
            "({beta}, {b}) does not end at a boundary point of B"
        )));
    }
    let b_diamond = b.ceil();
    let end = regions.phi_tail.eval(&b_diamond);
    let points = decisive_points(beta, &Bound::At(b_diamond.clone()), regions.phi_tail.last_knot());
    for t in &points {
        let gap = regions.phi_tail.eval(t) - &end;
        if gap.is_negative() {
            return Err(Error::invariant(
                "tail claim: integral inequality",
                0,
                format!("∫ from {t} to {b_diamond} of (f^q − g^q) is {gap}"),
            ));
        }
    }
    Ok(ClaimReport {
        claim: "tail",
        points_checked: points.len(),
        anchor: b_diamond,
        successor: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procp::compute_regions;
    use crate::step::StepFn;

    fn regions(f: &[i64], g: &[i64]) -> ABRegions {
        let s = |v: &[i64]| StepFn::new(v.iter().map(|&x| Scalar::int(x)).collect());
        compute_regions(&s(f), &s(g), &Scalar::int(2)).unwrap()
    }

    #[test]
    fn head_claim_on_half_line() {
        let r = regions(&[2], &[1]);
        let report = verify_claim_a(&r, &Scalar::zero(), &Bound::Infinity).unwrap();
        assert_eq!(report.anchor, Scalar::zero());
        assert!(report.successor.is_none());
    }

    #[test]
    fn tail_claim_on_unit_block() {
        let r = regions(&[2], &[1]);
        let report = verify_claim_b(&r, &Scalar::zero(), &Scalar::one()).unwrap();
        assert_eq!(report.anchor, Scalar::one());
    }

    #[test]
    fn hypotheses_are_checked() {
        let r = regions(&[2], &[1]);
        assert!(matches!(
            verify_claim_a(&r, &Scalar::one(), &Bound::Infinity),
            Err(Error::PremiseViolated(_))
        ));
        assert!(matches!(
            verify_claim_b(&r, &Scalar::zero(), &Scalar::int(2)),
            Err(Error::PremiseViolated(_))
        ));
    }

    #[test]
    fn decisive_points_cover_cells() {
        let pts = decisive_points(&Scalar::ratio(1, 2), &Bound::At(Scalar::int(2)), 5);
        let shown: Vec<String> = pts.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["1/2", "1", "3/2", "2"]);
    }
}
