//! Partial-sum domination predicates between sequences.
//!
//! Indices reported to callers are one-based, matching `N` in `Σ_{n≤N}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};
use crate::seq::Seq;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiseCheck {
    pub holds: bool,
    /// First `N` where the head inequality fails. `None` with `holds == false`
    /// means only the totals differ.
    pub first_violation: Option<usize>,
    pub totals_equal: bool,
}

/// `q`-th powers of the rearrangement, padded to `len`.
fn rearranged_powers(x: &Seq, q: &Scalar, len: usize) -> Result<Vec<Scalar>> {
    x.padded(len)
        .rearrange()
        .values()
        .iter()
        .map(|v| v.pow(q))
        .collect()
}

fn check_exponent(q: &Scalar) -> Result<()> {
    if q < &Scalar::one() {
        return Err(Error::PremiseViolated(format!("exponent q = {q} must be at least 1")));
    }
    Ok(())
}

fn totals_scale(a: &Scalar, b: &Scalar) -> f64 {
    1f64.max(a.to_f64().abs()).max(b.to_f64().abs())
}

/// Head `q`-power domination of `u` by `v` with equal totals.
pub fn check_sq_premise(u: &Seq, v: &Seq, q: &Scalar) -> Result<PremiseCheck> {
    check_exponent(q)?;
    let len = u.len().max(v.len());
    let heads_u = Seq::prefix_sums(&rearranged_powers(u, q, len)?);
    let heads_v = Seq::prefix_sums(&rearranged_powers(v, q, len)?);
    let first_violation = heads_u
        .iter()
        .zip(&heads_v)
        .position(|(a, b)| !a.le_tol(b))
        .map(|i| i + 1);
    let totals_equal = match (heads_u.last(), heads_v.last()) {
        (Some(a), Some(b)) => a.eq_tol(b),
        _ => true,
    };
    Ok(PremiseCheck {
        holds: first_violation.is_none() && totals_equal,
        first_violation,
        totals_equal,
    })
}

/// Tail form of the premise: `Σ_{n≥M} (v*_n)^q ≤ Σ_{n≥M} (u*_n)^q` for every `M`.
/// Always true when the premise holds, since each tail is the total minus a head.
pub fn head_to_tail(u: &Seq, v: &Seq, q: &Scalar) -> Result<bool> {
    let premise = check_sq_premise(u, v, q)?;
    if !premise.holds {
        return Err(Error::PremiseViolated(format!(
            "head q-power domination fails (first violation {:?}, totals equal: {})",
            premise.first_violation, premise.totals_equal
        )));
    }
    let len = u.len().max(v.len());
    let tails_u = suffix_sums(&rearranged_powers(u, q, len)?);
    let tails_v = suffix_sums(&rearranged_powers(v, q, len)?);
    // A tail is a total minus a head, so float slack doubles.
    let scale = 2.0 * totals_scale(&tails_u[0], &tails_v[0]);
    Ok(tails_v.iter().zip(&tails_u).all(|(tv, tu)| tv.le_within(tu, scale)))
}

/// `Σ_{n≥m}` for `m = 1..=len+1`; the last entry is zero.
fn suffix_sums(values: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); values.len() + 1];
    for i in (0..values.len()).rev() {
        out[i] = &out[i + 1] + &values[i];
    }
    out
}

/// First `m` with `Σ_{n≤m} y*_n > Σ_{n≤m} x*_n`.
pub fn hlp_violation(x: &Seq, y: &Seq) -> Option<usize> {
    let len = x.len().max(y.len());
    let hx = Seq::prefix_sums(x.padded(len).rearrange().values());
    let hy = Seq::prefix_sums(y.padded(len).rearrange().values());
    hy.iter().zip(&hx).position(|(b, a)| !b.le_tol(a)).map(|i| i + 1)
}

/// Weak majorization `Σ_{n≤m} y*_n ≤ Σ_{n≤m} x*_n` for all `m`.
pub fn check_hlp(x: &Seq, y: &Seq) -> bool {
    hlp_violation(x, y).is_none()
}

/// First `N` with `Σ_{n≥N} (y*_n)^q > Σ_{n≥N} (u*_n)^q`.
pub fn tail_dom_violation(u: &Seq, y: &Seq, q: &Scalar) -> Result<Option<usize>> {
    check_exponent(q)?;
    let len = u.len().max(y.len());
    let tails_u = suffix_sums(&rearranged_powers(u, q, len)?);
    let tails_y = suffix_sums(&rearranged_powers(y, q, len)?);
    Ok(tails_y
        .iter()
        .zip(&tails_u)
        .position(|(ty, tu)| !ty.le_tol(tu))
        .map(|i| i + 1))
}

pub fn check_tail_dom(u: &Seq, y: &Seq, q: &Scalar) -> Result<bool> {
    Ok(tail_dom_violation(u, y, q)?.is_none())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapCompletion {
    pub z: Seq,
    /// Zero-based index of the raised entry (first maximum of `|y|`).
    pub index: usize,
    /// The exact input needed an irrational root, so `z` is in float mode.
    pub downgraded: bool,
}

/// Raises the largest entry of `|y|` until the `q`-power total matches that of `u`.
pub fn cap_completion(u: &Seq, y: &Seq, q: &Scalar) -> Result<CapCompletion> {
    if let Some(n) = tail_dom_violation(u, y, q)? {
        return Err(Error::PremiseViolated(format!(
            "tail domination fails at N = {n}"
        )));
    }
    let abs = y.abs().padded(1);
    let index = abs
        .values()
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if v > &abs.values()[best] { i } else { best });
    let total_u: Scalar = rearranged_powers(u, q, u.len())?.into_iter().sum();
    let rest: Scalar = abs
        .values()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .map(|(_, v)| v.pow(q))
        .sum::<Result<Scalar>>()?;
    let residual = (total_u - rest).max(Scalar::zero());
    let (cap, exact) = residual.root(q);
    let mut values = abs.into_values();
    values[index] = cap;
    let mut z = Seq::new(values);
    let downgraded = !exact && residual.is_exact();
    if downgraded {
        z = z.in_mode(Mode::Float);
    }
    Ok(CapCompletion { z, index, downgraded })
}
