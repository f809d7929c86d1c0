//! Interval decomposition of `[0, ∞)` for a pair of nonincreasing step functions.
//!
//! For `f`, `g` on the unit grid and an exponent `q`, the set `A` collects the
//! points where the head integral of `f` strictly beats that of `g`, and `B` the
//! points where the tail `q`-power integral does. When every point lies in one of
//! them, the iteration in [`procedure`] carves `[0, ∞)` into integer-aligned
//! blocks on which one of the two inequalities holds blockwise.

mod claims;
mod pipeline;
mod procedure;
mod split;

pub use claims::{verify_claim_a, verify_claim_b, ClaimReport};
pub use pipeline::{theorem_main_pipeline, Certificate, NormCheck, PipelineConfig, PipelineOutcome};
pub use procedure::{
    procedure_p, run_procedure_p, verify_decomposition, Outcome, PDecomposition, PStep,
};
pub use split::{compress_rearrange, split_functions, verify_phis_psis, PhisPsisReport, Split};

use serde::Serialize;

use crate::affine::PiecewiseAffine;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::scalar::Scalar;
use crate::step::StepFn;

#[derive(Debug, Clone, Serialize)]
pub struct ABRegions {
    #[serde(skip)]
    pub f: StepFn,
    #[serde(skip)]
    pub g: StepFn,
    pub q: Scalar,
    /// `t ↦ ∫₀ᵗ (f − g)`.
    #[serde(skip)]
    pub phi_l1: PiecewiseAffine,
    /// `t ↦ ∫_t^∞ (f^q − g^q)`.
    #[serde(skip)]
    pub phi_tail: PiecewiseAffine,
    pub a: IntervalSet,
    pub b: IntervalSet,
}

impl ABRegions {
    /// `B ∖ A`.
    pub fn b_only(&self) -> IntervalSet {
        self.b.difference(&self.a)
    }

    pub fn in_b_only(&self, t: &Scalar) -> bool {
        self.b.contains(t) && !self.a.contains(t)
    }
}

/// Builds `A = {φ_l1 > 0}` and `B = {φ_tail > 0}` and checks that they cover
/// `[0, ∞)` with `0 ∈ B`.
pub fn compute_regions(f: &StepFn, g: &StepFn, q: &Scalar) -> Result<ABRegions> {
    for (name, h) in [("f", f), ("g", g)] {
        if !h.is_nonincreasing_nonnegative() {
            return Err(Error::PremiseViolated(format!(
                "{name} must be nonnegative and nonincreasing"
            )));
        }
    }
    let phi_l1 = PiecewiseAffine::head_integral(f).sub(&PiecewiseAffine::head_integral(g));
    let phi_tail = PiecewiseAffine::tail_integral(&f.power(q)?)
        .sub(&PiecewiseAffine::tail_integral(&g.power(q)?));
    let a = phi_l1.positive_region();
    let b = phi_tail.positive_region();
    if !b.contains(&Scalar::zero()) {
        return Err(Error::PremiseViolated(
            "tail inequality fails at t = 0, so 0 is not in B".into(),
        ));
    }
    if let Some(t) = a.union(&b).first_gap() {
        return Err(Error::PremiseViolated(format!(
            "A ∪ B misses points of [0, ∞), starting at t = {t}"
        )));
    }
    Ok(ABRegions {
        f: f.clone(),
        g: g.clone(),
        q: q.clone(),
        phi_l1,
        phi_tail,
        a,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(v: &[i64]) -> StepFn {
        StepFn::new(v.iter().map(|&x| Scalar::int(x)).collect())
    }

    #[test]
    fn double_indicator_regions() {
        let r = compute_regions(&step(&[2]), &step(&[1]), &Scalar::int(2)).unwrap();
        assert_eq!(r.a.to_string(), "(0, ∞)");
        assert_eq!(r.b.to_string(), "[0, 1)");
    }

    #[test]
    fn zero_g_gives_support_for_b() {
        let r = compute_regions(&step(&[3, 2, 2]), &StepFn::zero(), &Scalar::int(2)).unwrap();
        assert_eq!(r.a.to_string(), "(0, ∞)");
        assert_eq!(r.b.to_string(), "[0, 3)");
    }

    #[test]
    fn equal_functions_violate_the_premise() {
        let f = step(&[2, 1]);
        assert!(matches!(
            compute_regions(&f, &f, &Scalar::int(2)),
            Err(Error::PremiseViolated(_))
        ));
    }

    #[test]
    fn increasing_input_is_refused() {
        assert!(compute_regions(&step(&[1, 2]), &StepFn::zero(), &Scalar::int(2)).is_err());
    }
}
