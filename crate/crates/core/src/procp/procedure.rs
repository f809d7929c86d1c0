//! The iterative block construction and an independent checker for its output.

use serde::Serialize;

use super::claims::{verify_claim_a, verify_claim_b};
use super::{compute_regions, ABRegions};
use crate::error::{Error, Result};
use crate::interval::{Bound, Interval, IntervalSet};
use crate::scalar::Scalar;
use crate::step::StepFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// All four sets bounded and nonempty; the iteration continues.
    #[serde(rename = "O-1")]
    Bounded,
    /// `B_n = [b♣, ∞)` and the other three sets are empty.
    #[serde(rename = "O-2")]
    TailToInfinity,
    /// `A_n ∪ B_n = [b♣, ∞)` with `Ω_n`, `Γ_n` empty.
    #[serde(rename = "O-3")]
    HeadToInfinity,
}

/// One application of the step. Markers left as `None` are undefined for the outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PStep {
    pub n: usize,
    pub b_club: Scalar,
    pub outcome: Outcome,
    pub b_set: IntervalSet,
    pub a_set: IntervalSet,
    pub omega: IntervalSet,
    pub gamma: IntervalSet,
    pub b_end: Option<Scalar>,
    pub b_diamond: Bound,
    pub a_start: Option<Scalar>,
    pub a_tilde: Option<Bound>,
    pub a_club: Option<Scalar>,
    pub a_diamond: Option<Bound>,
    pub next_b_club: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PDecomposition {
    pub steps: Vec<PStep>,
}

impl PDecomposition {
    fn family(&self, pick: impl Fn(&PStep) -> &IntervalSet) -> IntervalSet {
        self.steps
            .iter()
            .fold(IntervalSet::empty(), |acc, s| acc.union(pick(s)))
    }

    pub fn union_a(&self) -> IntervalSet {
        self.family(|s| &s.a_set)
    }

    pub fn union_b(&self) -> IntervalSet {
        self.family(|s| &s.b_set)
    }

    pub fn union_omega(&self) -> IntervalSet {
        self.family(|s| &s.omega)
    }

    pub fn union_gamma(&self) -> IntervalSet {
        self.family(|s| &s.gamma)
    }
}

fn block(lo: Scalar, hi: Bound) -> IntervalSet {
    IntervalSet::from(Interval::closed_open(lo, hi))
}

fn unit_block(lo: &Scalar) -> IntervalSet {
    block(lo.clone(), Bound::At(lo + &Scalar::one()))
}

/// One step from an integer `b♣ ∈ B ∖ A`.
fn step(regions: &ABRegions, n: usize, b_club: Scalar) -> Result<PStep> {
    if !regions.in_b_only(&b_club) {
        return Err(Error::invariant(
            "start point in B ∖ A",
            n,
            format!("{b_club} is not in B ∖ A"),
        ));
    }
    let component = regions
        .b
        .component_containing(&b_club)
        .expect("b♣ lies in B");
    let mut out = PStep {
        n,
        b_club: b_club.clone(),
        outcome: Outcome::TailToInfinity,
        b_set: IntervalSet::empty(),
        a_set: IntervalSet::empty(),
        omega: IntervalSet::empty(),
        gamma: IntervalSet::empty(),
        b_end: None,
        b_diamond: Bound::Infinity,
        a_start: None,
        a_tilde: None,
        a_club: None,
        a_diamond: None,
        next_b_club: None,
    };
    let b_end = match &component.hi {
        Bound::Infinity => {
            out.b_set = block(b_club, Bound::Infinity);
            return Ok(out);
        }
        Bound::At(hi) => hi.clone(),
    };
    let b_diamond = b_end.ceil();
    out.b_set = block(b_club, Bound::At(b_diamond.clone()));
    out.b_end = Some(b_end.clone());
    out.b_diamond = Bound::At(b_diamond);

    let a_component = regions.a.component_containing(&b_end).ok_or_else(|| {
        Error::invariant("covering", n, format!("{b_end} lies in neither A nor B"))
    })?;
    let a_start = a_component.lo.clone();
    let a_tilde = a_component.hi.clone();
    let a_club = a_start.floor();
    out.a_start = Some(a_start);
    out.a_tilde = Some(a_tilde.clone());
    out.a_club = Some(a_club.clone());

    let Bound::At(a_tilde) = a_tilde else {
        out.outcome = Outcome::HeadToInfinity;
        out.a_set = block(a_club, Bound::Infinity);
        out.a_diamond = Some(Bound::Infinity);
        return Ok(out);
    };
    let a_diamond = a_tilde.max(&a_club + &Scalar::one()).floor();
    let above = &a_diamond + &Scalar::one();
    let next = if regions.in_b_only(&above) {
        above
    } else if regions.in_b_only(&a_diamond) {
        a_diamond.clone()
    } else {
        return Err(Error::invariant(
            "successor in B ∖ A",
            n,
            format!("neither {a_diamond} nor {above} lies in B ∖ A"),
        ));
    };
    out.outcome = Outcome::Bounded;
    out.a_set = block(a_club.clone(), Bound::At(a_diamond.clone()));
    out.omega = unit_block(&a_club);
    out.gamma = unit_block(&a_diamond);
    out.a_diamond = Some(Bound::At(a_diamond));
    out.next_b_club = Some(next);
    Ok(out)
}

/// Iterates the step from `b♣ = 0` until an unbounded outcome, then verifies
/// every invariant of the result.
pub fn procedure_p(regions: &ABRegions) -> Result<PDecomposition> {
    let cap = regions.f.support_len().max(regions.g.support_len()) + 2;
    let mut steps = Vec::new();
    let mut club = Scalar::zero();
    loop {
        let n = steps.len() + 1;
        if n > cap {
            return Err(Error::invariant(
                "termination",
                n,
                format!("more than {cap} steps"),
            ));
        }
        let s = step(regions, n, club)?;
        let next = s.next_b_club.clone();
        steps.push(s);
        match next {
            Some(c) => club = c,
            None => break,
        }
    }
    let decomposition = PDecomposition { steps };
    verify_decomposition(regions, &decomposition)?;
    Ok(decomposition)
}

pub fn run_procedure_p(f: &StepFn, g: &StepFn, q: &Scalar) -> Result<PDecomposition> {
    procedure_p(&compute_regions(f, g, q)?)
}

/// `G < H`: every point of `G` is strictly left of every point of `H`.
fn strictly_before(g: &IntervalSet, h: &IntervalSet) -> bool {
    let (Some(last), Some(first)) = (g.intervals().last(), h.intervals().first()) else {
        return true;
    };
    match &last.hi {
        Bound::Infinity => false,
        Bound::At(hi) => hi < &first.lo || (hi == &first.lo && (last.hi_open || first.lo_open)),
    }
}

fn is_block_or_empty(s: &IntervalSet) -> bool {
    match s.intervals() {
        [] => true,
        [iv] => iv.is_integer_closed_open(),
        _ => false,
    }
}

fn check(ok: bool, clause: &str, n: usize, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invariant(clause, n, detail()))
    }
}

fn bounds(s: &IntervalSet) -> Option<(Scalar, Bound)> {
    s.intervals().first().map(|iv| (iv.lo.clone(), iv.hi.clone()))
}

/// Head inequality restricted to a block: `∫_{lo}^t (f − g) ≥ 0` for `t` in the block.
fn head_on_block(regions: &ABRegions, s: &IntervalSet) -> bool {
    let Some((lo, hi)) = bounds(s) else { return true };
    let lo_i = lo.to_index().expect("integer block start");
    let last = match hi {
        Bound::At(h) => h.to_index().expect("integer block end"),
        Bound::Infinity => lo_i.max(regions.phi_l1.last_knot()),
    };
    let base = regions.phi_l1.at_knot(lo_i);
    (lo_i..=last).all(|k| !(regions.phi_l1.at_knot(k) - &base).is_negative())
}

/// Tail inequality restricted to a block: `∫_t^{hi} (f^q − g^q) ≥ 0` for `t` in the block.
fn tail_on_block(regions: &ABRegions, s: &IntervalSet) -> bool {
    let Some((lo, hi)) = bounds(s) else { return true };
    let lo_i = lo.to_index().expect("integer block start");
    let (last, end) = match hi {
        Bound::At(h) => {
            let h = h.to_index().expect("integer block end");
            (h, regions.phi_tail.at_knot(h))
        }
        Bound::Infinity => (lo_i.max(regions.phi_tail.last_knot()), Scalar::zero()),
    };
    (lo_i..=last).all(|k| !(regions.phi_tail.at_knot(k) - &end).is_negative())
}

fn cell_value(h: &StepFn, s: &IntervalSet) -> Scalar {
    bounds(s).map_or_else(Scalar::zero, |(lo, _)| h.value_at(&lo))
}

/// Machine check of everything the construction promises, independent of how it
/// was produced: block shapes, ordering, blockwise inequalities, unit blocks,
/// outcome shapes, marker inequalities, the two local lemmas, and covering.
pub fn verify_decomposition(regions: &ABRegions, d: &PDecomposition) -> Result<()> {
    let one = Scalar::one();
    for (i, s) in d.steps.iter().enumerate() {
        let n = s.n;
        check(n == i + 1, "labels", n, || format!("step {i} labelled {n}"))?;
        for (name, set) in [("A", &s.a_set), ("B", &s.b_set), ("Ω", &s.omega), ("Γ", &s.gamma)] {
            check(is_block_or_empty(set), "(i) block shape", n, || {
                format!("{name}_{n} = {set} is not an integer [γ, δ)")
            })?;
            let inside = set.difference(&block(s.b_club.clone(), Bound::Infinity)).is_empty();
            check(inside, "containment in [b♣, ∞)", n, || {
                format!("{name}_{n} = {set} starts before {}", s.b_club)
            })?;
        }
        if let Some(next) = d.steps.get(i + 1) {
            for (name, g, h) in [
                ("A", &s.a_set, &next.a_set),
                ("B", &s.b_set, &next.b_set),
                ("Ω", &s.omega, &next.omega),
                ("Γ", &s.gamma, &next.gamma),
            ] {
                check(strictly_before(g, h), "(ii) ordering", n, || {
                    format!("{name}_{n} = {g} does not precede {h}")
                })?;
            }
        }
        check(strictly_before(&s.omega, &s.gamma), "(iii) Ω before Γ", n, || {
            format!("{} does not precede {}", s.omega, s.gamma)
        })?;
        check(head_on_block(regions, &s.a_set), "(iv) head inequality", n, || {
            format!("fails on A_{n} = {}", s.a_set)
        })?;
        check(tail_on_block(regions, &s.b_set), "(iv) tail inequality", n, || {
            format!("fails on B_{n} = {}", s.b_set)
        })?;
        check(s.omega.is_empty() == s.gamma.is_empty(), "(v) paired unit blocks", n, || {
            format!("Ω = {}, Γ = {}", s.omega, s.gamma)
        })?;
        if !s.omega.is_empty() {
            let unit = |set: &IntervalSet| set.intervals()[0].length() == Some(one.clone());
            check(unit(&s.omega) && unit(&s.gamma), "(v) unit length", n, || {
                format!("Ω = {}, Γ = {}", s.omega, s.gamma)
            })?;
            let (gv, fv) = (cell_value(&regions.g, &s.gamma), cell_value(&regions.f, &s.omega));
            check(gv.le_tol(&fv), "(v) g on Γ ≤ f on Ω", n, || format!("{gv} > {fv}"))?;
        }
        verify_outcome(regions, s, d.steps.get(i + 1))?;
    }
    let last_unbounded = d
        .steps
        .last()
        .map_or(false, |s| s.outcome != Outcome::Bounded);
    check(last_unbounded, "termination", d.steps.len(), || {
        "the last step must have an unbounded outcome".into()
    })?;
    let cover = d.union_a().union(&d.union_b()).union(&d.union_gamma());
    check(cover.covers_half_line(), "covering", d.steps.len(), || {
        format!("A ∪ B ∪ Γ = {cover}")
    })
}

fn verify_outcome(regions: &ABRegions, s: &PStep, next: Option<&PStep>) -> Result<()> {
    let n = s.n;
    let one = Scalar::one();
    match s.outcome {
        Outcome::TailToInfinity => {
            let shape = s.b_set == block(s.b_club.clone(), Bound::Infinity)
                && s.a_set.is_empty()
                && s.omega.is_empty()
                && s.gamma.is_empty();
            check(shape && next.is_none(), "O-2 shape", n, || format!("{s:?}"))
        }
        Outcome::HeadToInfinity => {
            let union = s.a_set.union(&s.b_set);
            let shape = union == block(s.b_club.clone(), Bound::Infinity)
                && s.omega.is_empty()
                && s.gamma.is_empty();
            check(shape && next.is_none(), "O-3 shape", n, || format!("A ∪ B = {union}"))?;
            verify_local_lemmas(regions, s)
        }
        Outcome::Bounded => {
            let (Some(a_club), Some(Bound::At(a_diamond)), Bound::At(b_diamond), Some(next_club)) =
                (&s.a_club, &s.a_diamond, &s.b_diamond, &s.next_b_club)
            else {
                return Err(Error::invariant("O-1 markers", n, "missing marker"));
            };
            let club = &s.b_club;
            check(next_club >= &(club + &one), "b♣ grows", n, || {
                format!("{next_club} < {club} + 1")
            })?;
            check(club <= a_club, "b♣ ≤ a♣", n, || format!("{club} > {a_club}"))?;
            check(&(a_club + &one) <= a_diamond, "a♣ + 1 ≤ a♦", n, || {
                format!("{a_club} + 1 > {a_diamond}")
            })?;
            check(b_diamond <= a_diamond, "b♦ ≤ a♦", n, || format!("{b_diamond} > {a_diamond}"))?;
            check(b_diamond <= next_club, "b♦ ≤ next b♣", n, || {
                format!("{b_diamond} > {next_club}")
            })?;
            let all = s
                .a_set
                .union(&s.b_set)
                .union(&s.omega)
                .union(&s.gamma);
            let lower = block(club.clone(), Bound::At(next_club.clone()));
            let upper = block(club.clone(), Bound::At(next_club + &one));
            let sandwiched = lower.difference(&all).is_empty() && all.difference(&upper).is_empty();
            check(sandwiched, "O-1 covering", n, || format!("A ∪ B ∪ Ω ∪ Γ = {all}"))?;
            let bounded = [&s.a_set, &s.b_set, &s.omega, &s.gamma]
                .iter()
                .all(|set| bounds(set).map_or(false, |(_, hi)| !hi.is_infinite()));
            check(bounded, "O-1 bounded and nonempty", n, || format!("{s:?}"))?;
            match next {
                Some(following) => check(&following.b_club == next_club, "chain", n, || {
                    format!("next step starts at {}", following.b_club)
                })?,
                None => return Err(Error::invariant("chain", n, "O-1 must be followed by a step")),
            }
            verify_local_lemmas(regions, s)
        }
    }
}

fn verify_local_lemmas(regions: &ABRegions, s: &PStep) -> Result<()> {
    let relabel = |e: Error| match e {
        Error::InvariantViolation { clause, detail, .. } => Error::InvariantViolation {
            clause,
            step: s.n,
            detail,
        },
        Error::PremiseViolated(detail) => Error::invariant("lemma hypotheses", s.n, detail),
        other => other,
    };
    if let Some(b_end) = &s.b_end {
        let report = verify_claim_b(regions, &s.b_club, b_end).map_err(relabel)?;
        check(Bound::At(report.anchor.clone()) == s.b_diamond, "b♦ marker", s.n, || {
            format!("lemma gives {}, step recorded {}", report.anchor, s.b_diamond)
        })?;
    }
    if let (Some(a), Some(a_tilde)) = (&s.a_start, &s.a_tilde) {
        let report = verify_claim_a(regions, a, a_tilde).map_err(relabel)?;
        check(report.successor == s.next_b_club, "successor marker", s.n, || {
            format!("lemma gives {:?}, step recorded {:?}", report.successor, s.next_b_club)
        })?;
    }
    Ok(())
}
