//! Step functions on `[0, ∞)` that are constant on each unit cell `[n-1, n)`
//! and vanish past the stored cells.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Bound, IntervalSet};
use crate::scalar::Scalar;
use crate::seq::Seq;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFn {
    cells: Seq,
}

impl StepFn {
    pub fn new(cells: Vec<Scalar>) -> Self {
        StepFn { cells: Seq::new(cells) }
    }

    pub fn from_seq(x: &Seq) -> Self {
        StepFn { cells: x.clone() }
    }

    pub fn zero() -> Self {
        StepFn::new(Vec::new())
    }

    pub fn cells(&self) -> &[Scalar] {
        self.cells.values()
    }

    pub fn as_seq(&self) -> &Seq {
        &self.cells
    }

    /// Value on cell `[i, i+1)`, zero-based.
    pub fn cell(&self, i: usize) -> Scalar {
        self.cells.get(i)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.cells.support_len()
    }

    pub fn value_at(&self, t: &Scalar) -> Scalar {
        if t.is_negative() {
            return Scalar::zero();
        }
        match t.floor().to_index() {
            Some(i) => self.cell(i),
            None => Scalar::zero(),
        }
    }

    /// Exact `∫_a^b f` for `0 ≤ a ≤ b`.
    pub fn integral(&self, a: &Scalar, b: &Bound) -> Scalar {
        let mut total = Scalar::zero();
        for (i, v) in self.cells().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let left = Scalar::from_index(i);
            let right = Scalar::from_index(i + 1);
            let lo = a.clone().max(left);
            let hi = match b {
                Bound::At(b) => b.clone().min(right),
                Bound::Infinity => right,
            };
            if hi > lo {
                total = total + v * (hi - lo);
            }
        }
        total
    }

    /// Raises every cell to the power `q`; cells must be nonnegative.
    pub fn power(&self, q: &Scalar) -> Result<StepFn> {
        self.cells()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_negative() {
                    Err(Error::NegativeCell {
                        cell: i,
                        value: v.to_string(),
                    })
                } else {
                    v.pow(q)
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(StepFn::new)
    }

    pub fn scale(&self, c: &Scalar) -> StepFn {
        StepFn::from_seq(&self.cells.scale(c))
    }

    /// Nonincreasing rearrangement of `|f|`. On a unit grid this is a sort of the cells.
    pub fn rearrange(&self) -> StepFn {
        StepFn::from_seq(&self.cells.rearrange())
    }

    pub fn is_nonincreasing_nonnegative(&self) -> bool {
        self.cells.is_nonincreasing_nonnegative()
    }

    /// `f·χ_mask`. The mask must have integer endpoints so the product stays on the unit grid.
    pub fn mask(&self, mask: &IntervalSet) -> Result<StepFn> {
        for iv in mask.intervals() {
            let integral_ends =
                iv.lo.is_integer() && iv.hi.finite().map_or(true, Scalar::is_integer);
            if !integral_ends {
                return Err(Error::PremiseViolated(format!(
                    "mask interval {iv} does not have integer endpoints"
                )));
            }
        }
        let half = Scalar::ratio(1, 2);
        Ok(StepFn::new(
            self.cells()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if mask.contains(&(Scalar::from_index(i) + &half)) {
                        v.clone()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect(),
        ))
    }

    pub fn add(&self, other: &StepFn) -> StepFn {
        let n = self.len().max(other.len());
        StepFn::new((0..n).map(|i| self.cell(i) + other.cell(i)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_examples() {
        let f = StepFn::new(vec![Scalar::int(2)]);
        assert_eq!(
            f.integral(&Scalar::zero(), &Bound::At(Scalar::ratio(1, 2))),
            Scalar::int(1)
        );
        let f = StepFn::new(vec![Scalar::int(2), Scalar::int(1)]);
        assert_eq!(
            f.integral(&Scalar::ratio(1, 2), &Bound::At(Scalar::ratio(3, 2))),
            Scalar::ratio(3, 2)
        );
        assert_eq!(f.integral(&Scalar::int(3), &Bound::Infinity), Scalar::zero());
    }

    #[test]
    fn power_rejects_negative_cells() {
        let f = StepFn::new(vec![Scalar::int(1), Scalar::int(-1)]);
        assert_eq!(
            f.power(&Scalar::int(2)),
            Err(Error::NegativeCell {
                cell: 1,
                value: "-1".into()
            })
        );
    }

    #[test]
    fn value_at_uses_left_closed_cells() {
        let f = StepFn::new(vec![Scalar::int(3), Scalar::int(1)]);
        assert_eq!(f.value_at(&Scalar::int(1)), Scalar::int(1));
        assert_eq!(f.value_at(&Scalar::ratio(1, 2)), Scalar::int(3));
        assert_eq!(f.value_at(&Scalar::int(5)), Scalar::zero());
    }

    #[test]
    fn mask_requires_integer_endpoints() {
        use crate::interval::Interval;
        let f = StepFn::new(vec![Scalar::int(3), Scalar::int(2), Scalar::int(1)]);
        let m = IntervalSet::from(Interval::closed_open(Scalar::int(1), Bound::Infinity));
        assert_eq!(
            f.mask(&m).unwrap(),
            StepFn::new(vec![Scalar::zero(), Scalar::int(2), Scalar::int(1)])
        );
        let bad = IntervalSet::from(Interval::closed_open(Scalar::ratio(1, 2), Bound::Infinity));
        assert!(f.mask(&bad).is_err());
    }
}
