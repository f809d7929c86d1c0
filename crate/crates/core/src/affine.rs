//! Continuous piecewise-affine functions with knots at `0, 1, …, N`, constant past `N`.

use std::cmp::Ordering;

use crate::interval::{Bound, Interval, IntervalSet};
use crate::scalar::Scalar;
use crate::step::StepFn;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    /// Value at each knot `k = 0..=N`; never empty.
    knots: Vec<Scalar>,
}

impl PiecewiseAffine {
    pub fn from_knots(knots: Vec<Scalar>) -> Self {
        assert!(!knots.is_empty(), "a piecewise affine function needs a knot at 0");
        PiecewiseAffine { knots }
    }

    /// `t ↦ ∫₀ᵗ h`.
    pub fn head_integral(h: &StepFn) -> Self {
        let mut knots = vec![Scalar::zero()];
        let mut acc = Scalar::zero();
        for v in h.cells() {
            acc = &acc + v;
            knots.push(acc.clone());
        }
        PiecewiseAffine::from_knots(knots)
    }

    /// `t ↦ ∫_t^∞ h`.
    pub fn tail_integral(h: &StepFn) -> Self {
        let mut knots = vec![Scalar::zero(); h.len() + 1];
        for i in (0..h.len()).rev() {
            knots[i] = &knots[i + 1] + &h.cell(i);
        }
        PiecewiseAffine::from_knots(knots)
    }

    pub fn knots(&self) -> &[Scalar] {
        &self.knots
    }

    /// Last knot index `N`.
    pub fn last_knot(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn at_knot(&self, k: usize) -> Scalar {
        self.knots
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.knots[self.last_knot()].clone())
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let t = if t.is_negative() { Scalar::zero() } else { t.clone() };
        let k = t.floor().to_index().unwrap_or(usize::MAX);
        if k >= self.last_knot() {
            return self.knots[self.last_knot()].clone();
        }
        let frac = &t - &Scalar::from_index(k);
        let (a, b) = (&self.knots[k], &self.knots[k + 1]);
        a + &frac * &(b - a)
    }

    pub fn sub(&self, other: &PiecewiseAffine) -> PiecewiseAffine {
        let n = self.last_knot().max(other.last_knot());
        PiecewiseAffine::from_knots((0..=n).map(|k| self.at_knot(k) - other.at_knot(k)).collect())
    }

    /// The set `{t ≥ 0 : p(t) > 0}`; in float mode values within the tolerance count as zero.
    pub fn positive_region(&self) -> IntervalSet {
        let mut pieces = Vec::new();
        for k in 0..self.last_knot() {
            let (a, b) = (&self.knots[k], &self.knots[k + 1]);
            let left = Scalar::from_index(k);
            let right = Scalar::from_index(k + 1);
            let root = || &left + &(a / &(a - b));
            match (a.sign(), b.sign()) {
                (Ordering::Greater, Ordering::Greater) => {
                    pieces.push(Interval::closed(left.clone(), right.clone()))
                }
                (Ordering::Greater, Ordering::Equal) => {
                    pieces.push(Interval::closed_open(left.clone(), Bound::At(right.clone())))
                }
                (Ordering::Greater, Ordering::Less) => {
                    pieces.push(Interval::closed_open(left.clone(), Bound::At(root())))
                }
                (Ordering::Equal, Ordering::Greater) => {
                    pieces.push(Interval::new(left.clone(), true, Bound::At(right.clone()), false))
                }
                (Ordering::Less, Ordering::Greater) => {
                    pieces.push(Interval::new(root(), true, Bound::At(right.clone()), false))
                }
                _ => {}
            }
        }
        let n = self.last_knot();
        if self.knots[n].is_positive() {
            pieces.push(Interval::closed_open(Scalar::from_index(n), Bound::Infinity));
        }
        IntervalSet::from_intervals(pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::int(x)).collect()
    }

    #[test]
    fn head_integral_of_difference_is_positive_past_zero() {
        // ∫₀ᵗ (2χ − χ) = min(t, 1)
        let p = PiecewiseAffine::from_knots(ints(&[0, 1]));
        assert_eq!(p.positive_region().to_string(), "(0, ∞)");
    }

    #[test]
    fn zero_function_has_empty_region() {
        let p = PiecewiseAffine::from_knots(ints(&[0, 0, 0]));
        assert!(p.positive_region().is_empty());
    }

    #[test]
    fn crossing_gives_rational_root() {
        // 1 at 0, slope −1 on [0,2], constant −1 after.
        let p = PiecewiseAffine::from_knots(ints(&[1, 0, -1]));
        assert_eq!(p.positive_region().to_string(), "[0, 1)");
        let p = PiecewiseAffine::from_knots(ints(&[1, -2]));
        assert_eq!(p.positive_region().to_string(), "[0, 1/3)");
        assert_eq!(p.eval(&Scalar::ratio(1, 3)), Scalar::zero());
    }

    #[test]
    fn touching_zero_splits_components() {
        let p = PiecewiseAffine::from_knots(ints(&[0, 1, 0, 2]));
        assert_eq!(p.positive_region().to_string(), "(0, 2) ∪ (2, ∞)");
    }

    #[test]
    fn eval_interpolates_and_extends_constantly() {
        let p = PiecewiseAffine::from_knots(ints(&[0, 3, 5]));
        assert_eq!(p.eval(&Scalar::ratio(3, 2)), Scalar::int(4));
        assert_eq!(p.eval(&Scalar::int(10)), Scalar::int(5));
    }

    #[test]
    fn tail_integral_knots() {
        let h = StepFn::new(ints(&[3, 2]));
        let p = PiecewiseAffine::tail_integral(&h);
        assert_eq!(p.knots(), ints(&[5, 2, 0]).as_slice());
    }
}
