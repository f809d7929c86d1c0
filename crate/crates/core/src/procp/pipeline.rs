//! End-to-end check of the norm bound for a `(ℓ¹, ℓ^q)`-K-dominated pair.
//!
//! From `x` and `y` we form `g = y*`, `f = (1+ε)·C(q)·x*` on the unit grid, run
//! the decomposition with all of its checks, and then compare `‖y‖_E` with
//! `C₃‖x‖_E` for each supplied norm, `C₃ = (1+ε)·C(q)·C₂⁴·(C₁+2)`.

use serde::Serialize;

use super::{
    compute_regions, procedure_p, split_functions, verify_phis_psis, PDecomposition,
    PhisPsisReport,
};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::kfunc::c_q_bound;
use crate::scalar::{Mode, Scalar};
use crate::seq::Seq;
use crate::spaces::SequenceNorm;
use crate::step::StepFn;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub q: Scalar,
    /// Transfer constant of `E` for `q`-power head domination.
    pub c1: Scalar,
    /// Interpolation constant of `E` for `(ℓ¹, ℓ∞)`.
    pub c2: Scalar,
    pub eps: Scalar,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            q: Scalar::int(2),
            c1: Scalar::one(),
            c2: Scalar::one(),
            eps: Scalar::pow2_neg(10),
        }
    }
}

impl PipelineConfig {
    /// Rational upper bound on the equivalence constant when `q` is an exact integer,
    /// so the comparisons downstream stay exact.
    pub fn c_q(&self) -> Scalar {
        let bound = c_q_bound(self.q.to_f64());
        if self.exact() {
            Scalar::rational_upper_bound(bound)
        } else {
            Scalar::float(bound)
        }
    }

    fn exact(&self) -> bool {
        self.q.is_exact() && self.q.as_positive_u32().is_some()
    }

    /// `(1+ε)·C(q)·C₂⁴·(C₁+2)`.
    pub fn c3(&self) -> Scalar {
        let one = Scalar::one();
        (&one + &self.eps) * self.c_q() * self.c2.powi(4) * (&self.c1 + &Scalar::int(2))
    }

    /// The same constant assembled term by term as
    /// `C₂²(1+ε)C(q)(C₂² + C₁C₂² + C₂²)`.
    pub fn c3_expanded(&self) -> Scalar {
        let c2sq = self.c2.powi(2);
        let inner = &c2sq + &(&self.c1 * &c2sq) + c2sq.clone();
        &c2sq * &(Scalar::one() + &self.eps) * self.c_q() * inner
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormCheck {
    pub space: String,
    pub norm_x: Scalar,
    pub norm_y: Scalar,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub a: IntervalSet,
    pub b: IntervalSet,
    pub decomposition: PDecomposition,
    pub phis_psis: PhisPsisReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineOutcome {
    pub bound_holds: bool,
    pub c_q: Scalar,
    pub c3: Scalar,
    pub norms: Vec<NormCheck>,
    /// `None` when `y = 0`, which needs no decomposition.
    pub certificate: Option<Certificate>,
}

/// `y` is assumed `(ℓ¹, ℓ^q)`-K-dominated by `x`. If it is not, the covering
/// check fails and the call returns `PremiseViolated`.
pub fn theorem_main_pipeline(
    x: &Seq,
    y: &Seq,
    config: &PipelineConfig,
    spaces: &[&dyn SequenceNorm],
) -> Result<PipelineOutcome> {
    let one = Scalar::one();
    if config.c1 < one || config.c2 < one || !config.eps.is_positive() {
        return Err(Error::PremiseViolated(
            "need C₁ ≥ 1, C₂ ≥ 1 and ε > 0".into(),
        ));
    }
    let mode = if config.exact() && x.mode() == Mode::Exact && y.mode() == Mode::Exact {
        Mode::Exact
    } else {
        Mode::Float
    };
    let (x, y) = (x.in_mode(mode), y.in_mode(mode));
    let c_q = config.c_q();
    let c3 = config.c3();

    let certificate = if y.is_zero() {
        None
    } else {
        let g = StepFn::from_seq(&y.rearrange());
        let scale = (&one + &config.eps) * &c_q;
        let f = StepFn::from_seq(&x.rearrange()).scale(&scale.in_mode(mode));
        let regions = compute_regions(&f, &g, &config.q)?;
        let decomposition = procedure_p(&regions)?;
        let split = split_functions(&regions, &decomposition)?;
        let phis_psis = verify_phis_psis(&split)?;
        Some(Certificate {
            a: regions.a,
            b: regions.b,
            decomposition,
            phis_psis,
        })
    };

    let norms: Vec<NormCheck> = spaces
        .iter()
        .map(|space| {
            let norm_x = space.norm(&x);
            let norm_y = space.norm(&y);
            let holds = norm_y.le_tol(&(&c3 * &norm_x));
            NormCheck {
                space: space.label(),
                norm_x,
                norm_y,
                holds,
            }
        })
        .collect();
    Ok(PipelineOutcome {
        bound_holds: norms.iter().all(|n| n.holds),
        c_q,
        c3,
        norms,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceSpec;

    fn l1() -> SpaceSpec {
        "l1".parse().unwrap()
    }

    #[test]
    fn constant_for_l1_and_q_two() {
        let config = PipelineConfig::default();
        assert_eq!(config.c_q(), Scalar::int(3));
        let expected = Scalar::int(9) * (Scalar::one() + Scalar::pow2_neg(10));
        assert_eq!(config.c3(), expected);
        assert_eq!(config.c3_expanded(), config.c3());
    }

    #[test]
    fn expanded_constant_agrees_for_other_parameters() {
        let config = PipelineConfig {
            q: Scalar::int(3),
            c1: Scalar::ratio(5, 2),
            c2: Scalar::ratio(3, 2),
            eps: Scalar::ratio(1, 100),
        };
        assert_eq!(config.c3_expanded(), config.c3());
    }

    #[test]
    fn zero_target_short_circuits() {
        let x = Seq::from_ints(&[3, -1]);
        let out =
            theorem_main_pipeline(&x, &Seq::zeros(2), &PipelineConfig::default(), &[&l1()]).unwrap();
        assert!(out.bound_holds && out.certificate.is_none());
    }

    #[test]
    fn identical_pair_passes() {
        let x = Seq::from_ints(&[4, -2, 1, 1]);
        let out = theorem_main_pipeline(&x, &x, &PipelineConfig::default(), &[&l1()]).unwrap();
        assert!(out.bound_holds);
        assert_eq!(out.norms[0].norm_x, out.norms[0].norm_y);
        assert!(out.certificate.is_some());
    }

    #[test]
    fn non_dominated_pair_is_refused() {
        let x = Seq::from_ints(&[1]);
        let y = Seq::from_ints(&[10, 10]);
        assert!(matches!(
            theorem_main_pipeline(&x, &y, &PipelineConfig::default(), &[&l1()]),
            Err(Error::PremiseViolated(_))
        ));
    }

    #[test]
    fn float_exponent_runs_in_float_mode() {
        let config = PipelineConfig {
            q: Scalar::ratio(3, 2),
            ..PipelineConfig::default()
        };
        let x = Seq::from_ints(&[3, 2, 1]);
        let y = Seq::from_ints(&[2, 1]);
        let out = theorem_main_pipeline(&x, &y, &config, &[&l1()]).unwrap();
        assert!(!out.c_q.is_exact());
        assert!(out.bound_holds);
    }
}
