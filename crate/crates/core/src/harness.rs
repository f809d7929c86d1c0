//! Randomized theorem suites with JSON reports.
//!
//! Each suite draws trial `k` from `trial_rng(seed, k)` and runs trials in
//! parallel. Violations are sorted by trial, so a report depends only on its
//! parameters; `timing` is the one field that varies between runs.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::gen::{hlp_pair, k_dominated_pair, trial_rng};
use crate::kfunc::{k_dominates, Couple};
use crate::majorization::hlp_violation;
use crate::operators::{hlp_transfer, OperatorExpr};
use crate::procp::{theorem_main_pipeline, PipelineConfig};
use crate::scalar::{Mode, Scalar};
use crate::seq::Seq;
use crate::spaces::{sq_probe, SequenceNorm};

/// Which trials to run: indices `start..start + count` under `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trials {
    pub seed: u64,
    pub start: usize,
    pub count: usize,
    /// Exact generation where the suite supports it.
    #[serde(skip)]
    pub mode: Mode,
}

impl Trials {
    pub fn new(count: usize, seed: u64) -> Self {
        Trials {
            seed,
            start: 0,
            count,
            mode: Mode::Exact,
        }
    }

    /// The single trial `k`, for replaying a witness.
    pub fn only(self, k: usize) -> Self {
        Trials {
            start: k,
            count: 1,
            ..self
        }
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        Trials { mode, ..self }
    }

    fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.count
    }

    fn flags(&self) -> String {
        let mut s = format!("--seed {} --trials 1 --start", self.seed);
        if self.mode == Mode::Float {
            s = format!("--mode float {s}");
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub detail: String,
    /// Input pair plus whatever ledger the failing check produced.
    pub witness: Value,
    /// CLI invocation that reruns exactly this trial.
    pub replay: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub theorem: String,
    pub params: Value,
    pub trials: usize,
    pub seed: u64,
    pub pass: bool,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
    pub timing: Timing,
}

impl Report {
    fn assemble(
        theorem: &str,
        params: Value,
        trials: &Trials,
        mut violations: Vec<Violation>,
        notes: Vec<String>,
        started: Instant,
    ) -> Report {
        violations.sort_by_key(|v| v.trial);
        Report {
            theorem: theorem.to_string(),
            params,
            trials: trials.count,
            seed: trials.seed,
            pass: violations.is_empty(),
            violations,
            notes,
            timing: Timing {
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            },
        }
    }
}

fn run_trials<F>(trials: &Trials, check: F) -> Vec<Violation>
where
    F: Fn(usize) -> Option<Violation> + Sync + Send,
{
    trials.indices().into_par_iter().filter_map(check).collect()
}

/// `S_q(C)` probe for a space interpolating between `ℓ^p` and `ℓ^q` with constant `c`.
/// The probe itself only uses `q`: the premise pairs do not depend on `p`.
pub fn verify_thm_easy(space: &dyn SequenceNorm, p: f64, q: f64, c: f64, trials: Trials) -> Report {
    let started = Instant::now();
    assert!(1.0 <= p && p < q, "need 1 ≤ p < q");
    let probe = sq_probe_range(space, q, c, &trials);
    let violations = probe
        .violations
        .into_iter()
        .map(|w| Violation {
            trial: w.trial,
            detail: format!("‖v‖ = {} > C‖u‖ = {}", w.norm_v, c * w.norm_u),
            witness: json!({"u": w.u, "v": w.v, "norm_u": w.norm_u, "norm_v": w.norm_v}),
            replay: format!(
                "majorant verify thm-easy --space {} --p {p} --q {q} --c {c} {} {}",
                space.label(),
                trials.flags(),
                w.trial
            ),
        })
        .collect();
    Report::assemble(
        "thm-easy",
        json!({"space": space.label(), "p": p, "q": q, "c": c, "premise_rejects": probe.premise_rejects}),
        &trials,
        violations,
        vec!["p only enters the premise on the space; the probe runs with p = 1".into()],
        started,
    )
}

/// `sq_probe` on the trial window `trials.start..`, with trial numbers kept absolute.
fn sq_probe_range(space: &dyn SequenceNorm, q: f64, c: f64, trials: &Trials) -> crate::spaces::SqProbe {
    let mut probe = sq_probe(space, q, c, trials.start + trials.count, trials.seed);
    probe.violations.retain(|w| w.trial >= trials.start);
    probe.trials = trials.count;
    probe
}

/// Fuzzes contraction images `y = Tx`, which are K-dominated for both couples,
/// and runs the full decomposition pipeline on each.
pub fn verify_thm_main(
    space: &dyn SequenceNorm,
    q: &Scalar,
    c1: &Scalar,
    c2: &Scalar,
    trials: Trials,
) -> Report {
    let started = Instant::now();
    let config = PipelineConfig {
        q: q.clone(),
        c1: c1.clone(),
        c2: c2.clone(),
        ..PipelineConfig::default()
    };
    let exact = trials.mode == Mode::Exact;
    let violations = run_trials(&trials, |k| {
        let mut rng = trial_rng(trials.seed, k as u64);
        let (x, y, op) = k_dominated_pair(&mut rng, 16, exact);
        let (detail, ledger) = match theorem_main_pipeline(&x, &y, &config, &[space]) {
            Ok(out) if out.bound_holds => return None,
            Ok(out) => (
                "‖y‖_E exceeds C₃‖x‖_E".to_string(),
                serde_json::to_value(&out).expect("outcome serializes"),
            ),
            Err(e) => (e.to_string(), Value::Null),
        };
        Some(Violation {
            trial: k,
            detail,
            witness: json!({"x": x, "y": y, "operator": op, "ledger": ledger}),
            replay: format!(
                "majorant verify thm-main --space {} --q {q} --c1 {c1} --c2 {c2} {} {k}",
                space.label(),
                trials.flags()
            ),
        })
    });
    Report::assemble(
        "thm-main",
        json!({"space": space.label(), "q": q, "c1": c1, "c2": c2, "eps": config.eps, "c3": config.c3()}),
        &trials,
        violations,
        vec![],
        started,
    )
}

/// What one trial of the `(ℓ¹, ℓ∞)` suite established, or the first check that failed.
fn enough_trial(space: &dyn SequenceNorm, bound: &Scalar, c: &Scalar, x: &Seq, y: &Seq, cut: usize) -> std::result::Result<(), (String, Value)> {
    let fail = |msg: String| Err((msg, Value::Null));
    if !k_dominates(x, y, &Couple::L1Linf, None).holds() {
        return fail("generated pair is not K-dominated".into());
    }
    let (nx, ny) = (space.norm(x), space.norm(y));
    if !ny.le_tol(&(bound * &nx)) {
        return fail(format!("‖y‖_E = {ny} > CR‖x‖_E = {}", bound * &nx));
    }
    let truncated = y.truncate_to(cut);
    let nt = space.norm(&truncated);
    if !nt.le_tol(&ny) {
        return fail(format!("truncation grew the norm: {nt} > {ny}"));
    }
    if let Some(m) = hlp_violation(x, &truncated) {
        return fail(format!("truncation broke head domination at m = {m}"));
    }
    let op = hlp_transfer(x, &truncated).map_err(|e| (e.to_string(), Value::Null))?;
    let ledger = serde_json::to_value(&op).expect("operator serializes");
    let image = op.apply(x).map_err(|e| (e.to_string(), ledger.clone()))?;
    if image.padded(truncated.len().max(image.len())) != truncated.padded(truncated.len().max(image.len())) {
        return Err(("transfer operator misses the target".into(), ledger));
    }
    let OperatorExpr::ConvexCombo(terms) = &op else {
        return Err(("transfer is not a convex combination".into(), ledger));
    };
    let mut spread = Scalar::zero();
    for (w, perm) in terms {
        let moved = perm.apply(x).map_err(|e| (e.to_string(), ledger.clone()))?;
        spread = spread + w * &space.norm(&moved);
    }
    if !nt.le_tol(&spread) || !spread.le_tol(&(c * &nx)) {
        return Err((format!("chain ‖Π y‖ = {nt} ≤ Σλ‖Mx‖ = {spread} ≤ C‖x‖ fails"), ledger));
    }
    Ok(())
}

/// For head-dominated pairs checks `‖y‖_E ≤ CR‖x‖_E` together with the route
/// through a truncation of `y` and its averaged signed permutation image of `x`.
pub fn verify_thm_enough(space: &dyn SequenceNorm, q: &Scalar, c: &Scalar, r: &Scalar, trials: Trials) -> Report {
    let started = Instant::now();
    let bound = c * r;
    let violations = run_trials(&trials, |k| {
        let mut rng = trial_rng(trials.seed, k as u64);
        let (x, y) = if rand::Rng::gen_bool(&mut rng, 0.5) {
            hlp_pair(&mut rng, 16)
        } else {
            let (x, y, _) = k_dominated_pair(&mut rng, 16, true);
            (x, y)
        };
        let cut = rand::Rng::gen_range(&mut rng, 0..=y.len());
        let (detail, ledger) = enough_trial(space, &bound, c, &x, &y, cut).err()?;
        Some(Violation {
            trial: k,
            detail,
            witness: json!({"x": x, "y": y, "cut": cut, "ledger": ledger}),
            replay: format!(
                "majorant verify thm-enough --space {} --q {q} --c {c} --r {r} {} {k}",
                space.label(),
                trials.flags()
            ),
        })
    });
    Report::assemble(
        "thm-enough",
        json!({"space": space.label(), "q": q, "c": c, "r": r}),
        &trials,
        violations,
        vec!["K-domination for (ℓ¹, ℓ∞) is decided exactly through head sums".into()],
        started,
    )
}
