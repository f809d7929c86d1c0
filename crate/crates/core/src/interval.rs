//! Finite unions of intervals on `[0, ∞)` with exact endpoints.
//!
//! A normalized [`IntervalSet`] is sorted, has no empty members, and no two
//! members could be merged into one interval. Two intervals sharing an
//! endpoint that neither contains, as in `(0,1) ∪ (1,2)`, stay separate.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    At(Scalar),
    Infinity,
}

impl Bound {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Bound::Infinity)
    }

    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Bound::At(v) => Some(v),
            Bound::Infinity => None,
        }
    }

    fn cmp_point(&self, t: &Scalar) -> Ordering {
        match self {
            Bound::At(v) => v.partial_cmp(t).expect("comparable"),
            Bound::Infinity => Ordering::Greater,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Bound::Infinity, Bound::Infinity) => Some(Ordering::Equal),
            (Bound::Infinity, _) => Some(Ordering::Greater),
            (_, Bound::Infinity) => Some(Ordering::Less),
            (Bound::At(a), Bound::At(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::At(v) => write!(f, "{v}"),
            Bound::Infinity => write!(f, "∞"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Bound,
    pub lo_open: bool,
    /// Always true when `hi` is infinite.
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: Scalar, lo_open: bool, hi: Bound, hi_open: bool) -> Self {
        let hi_open = hi_open || hi.is_infinite();
        Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        }
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: Scalar, hi: Bound) -> Self {
        Interval::new(lo, false, hi, true)
    }

    /// `(lo, hi)`
    pub fn open(lo: Scalar, hi: Bound) -> Self {
        Interval::new(lo, true, hi, true)
    }

    /// `[lo, hi]`
    pub fn closed(lo: Scalar, hi: Scalar) -> Self {
        Interval::new(lo, false, Bound::At(hi), false)
    }

    pub fn is_empty(&self) -> bool {
        match self.hi.cmp_point(&self.lo) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_open || self.hi_open,
            Ordering::Greater => false,
        }
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        let above = match self.lo.partial_cmp(t).expect("comparable") {
            Ordering::Less => true,
            Ordering::Equal => !self.lo_open,
            Ordering::Greater => false,
        };
        let below = match self.hi.cmp_point(t) {
            Ordering::Greater => true,
            Ordering::Equal => !self.hi_open,
            Ordering::Less => false,
        };
        above && below
    }

    /// `None` for unbounded intervals.
    pub fn length(&self) -> Option<Scalar> {
        self.hi.finite().map(|hi| hi - &self.lo)
    }

    /// Nonempty `[γ, δ)` with integer `γ` and integer-or-infinite `δ`.
    pub fn is_integer_closed_open(&self) -> bool {
        !self.lo_open
            && self.hi_open
            && self.lo.is_integer()
            && self.hi.finite().map_or(true, Scalar::is_integer)
            && !self.is_empty()
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = match self.lo.partial_cmp(&other.lo).expect("comparable") {
            Ordering::Greater => (self.lo.clone(), self.lo_open),
            Ordering::Less => (other.lo.clone(), other.lo_open),
            Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.partial_cmp(&other.hi).expect("comparable") {
            Ordering::Less => (self.hi.clone(), self.hi_open),
            Ordering::Greater => (other.hi.clone(), other.hi_open),
            Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        Interval::new(lo, lo_open, hi, hi_open)
    }

    /// Every point of `self` lies at or left of every point of `other`, i.e. `sup self ≤ inf other`.
    pub fn precedes(&self, other: &Interval) -> bool {
        self.hi.cmp_point(&other.lo) != Ordering::Greater
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn nonneg_half_line() -> Self {
        IntervalSet::from(Interval::closed_open(Scalar::zero(), Bound::Infinity))
    }

    pub fn from_intervals(mut pieces: Vec<Interval>) -> Self {
        pieces.retain(|iv| !iv.is_empty());
        pieces.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .expect("comparable")
                .then(a.lo_open.cmp(&b.lo_open))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(pieces.len());
        for next in pieces {
            if let Some(cur) = merged.last_mut() {
                let joins = match cur.hi.cmp_point(&next.lo) {
                    Ordering::Greater => true,
                    Ordering::Equal => !cur.hi_open || !next.lo_open,
                    Ordering::Less => false,
                };
                if joins {
                    match next.hi.partial_cmp(&cur.hi).expect("comparable") {
                        Ordering::Greater => {
                            cur.hi = next.hi;
                            cur.hi_open = next.hi_open;
                        }
                        Ordering::Equal => cur.hi_open = cur.hi_open && next.hi_open,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            merged.push(next);
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        self.component_containing(t).is_some()
    }

    pub fn component_containing(&self, t: &Scalar) -> Option<&Interval> {
        self.intervals.iter().find(|iv| iv.contains(t))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut pieces = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                pieces.push(a.intersect(b));
            }
        }
        IntervalSet::from_intervals(pieces)
    }

    /// `[0, ∞) ∖ self`.
    pub fn complement(&self) -> IntervalSet {
        let mut pieces = Vec::new();
        let mut lo = Scalar::zero();
        let mut lo_open = false;
        for iv in &self.intervals {
            pieces.push(Interval::new(
                lo.clone(),
                lo_open,
                Bound::At(iv.lo.clone()),
                !iv.lo_open,
            ));
            match &iv.hi {
                Bound::Infinity => return IntervalSet::from_intervals(pieces),
                Bound::At(hi) => {
                    lo = hi.clone();
                    lo_open = !iv.hi_open;
                }
            }
        }
        pieces.push(Interval::new(lo, lo_open, Bound::Infinity, true));
        IntervalSet::from_intervals(pieces)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersection(&other.complement())
    }

    /// True iff the set is exactly `[0, ∞)`.
    pub fn covers_half_line(&self) -> bool {
        self.complement().is_empty()
    }

    /// Least point of `[0, ∞)` outside the set, or the infimum of the gap.
    pub fn first_gap(&self) -> Option<Scalar> {
        self.complement().intervals.first().map(|iv| iv.lo.clone())
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        IntervalSet::from_intervals(vec![iv])
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: i64) -> Bound {
        Bound::At(Scalar::int(n))
    }

    #[test]
    fn touching_closed_endpoint_merges() {
        let s = IntervalSet::from_intervals(vec![
            Interval::closed_open(Scalar::int(0), at(1)),
            Interval::closed_open(Scalar::int(1), at(2)),
        ]);
        assert_eq!(s.to_string(), "[0, 2)");
    }

    #[test]
    fn shared_excluded_point_stays_split() {
        let s = IntervalSet::from_intervals(vec![
            Interval::open(Scalar::int(1), at(2)),
            Interval::open(Scalar::int(0), at(1)),
        ]);
        assert_eq!(s.intervals().len(), 2);
        assert!(!s.contains(&Scalar::int(1)));
        assert!(s.contains(&Scalar::ratio(1, 2)));
    }

    #[test]
    fn complement_of_open_half_line_is_origin() {
        let s = IntervalSet::from(Interval::open(Scalar::int(0), Bound::Infinity));
        let c = s.complement();
        assert_eq!(c.to_string(), "[0, 0]");
        assert!(s.union(&c).covers_half_line());
    }

    #[test]
    fn intersection_and_difference() {
        let a = IntervalSet::from(Interval::closed_open(Scalar::int(0), at(3)));
        let b = IntervalSet::from(Interval::open(Scalar::int(1), Bound::Infinity));
        assert_eq!(a.intersection(&b).to_string(), "(1, 3)");
        assert_eq!(a.difference(&b).to_string(), "[0, 1]");
    }

    #[test]
    fn empty_and_degenerate_members_vanish() {
        let s = IntervalSet::from_intervals(vec![
            Interval::closed_open(Scalar::int(2), at(2)),
            Interval::open(Scalar::int(3), at(1)),
        ]);
        assert!(s.is_empty());
        assert_eq!(s.first_gap(), Some(Scalar::int(0)));
    }

    #[test]
    fn precedes_allows_shared_boundary() {
        let a = Interval::closed_open(Scalar::int(0), at(2));
        let b = Interval::closed_open(Scalar::int(2), at(3));
        assert!(a.precedes(&b));
        assert!(!b.precedes(&a));
    }
}
