//! Lower estimates of `‖T‖_{ℓ^p→ℓ^p}` for small matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::OperatorExpr;
use crate::error::{Error, Result};
use crate::scalar::tolerance;

pub const MAX_ASCENT_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            restarts: 32,
            steps: 500,
            seed: 0,
        }
    }
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn transpose_vec(m: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = m.first().map_or(0, Vec::len);
    (0..n).map(|j| m.iter().zip(y).map(|(r, v)| r[j] * v).sum()).collect()
}

/// Unit vector in `ℓ^{r'}` norming `v` in `ℓ^r`: `sign(v)|v|^{r−1}/‖v‖_r^{r−1}`.
fn dual_direction(v: &[f64], r: f64) -> Vec<f64> {
    let norm = lp_norm(v, r);
    v.iter()
        .map(|x| x.signum() * (x.abs() / norm).powf(r - 1.0))
        .collect()
}

/// Best `‖Tx‖_p/‖x‖_p` found by the dual-direction ascent
/// `x ← J_{p'}(Tᵀ J_p(Tx))`, each step of which does not decrease the ratio.
/// Starts from every unit vector, the all-ones vector, and random restarts.
pub fn norm_lq_lower(op: &OperatorExpr, p: f64, config: &AscentConfig) -> Result<f64> {
    let n = op.extent();
    if n > MAX_ASCENT_DIM {
        return Err(Error::DimensionMismatch(format!(
            "ascent supports at most {MAX_ASCENT_DIM} coordinates, got {n}"
        )));
    }
    assert!(p >= 1.0, "p must be at least 1");
    let m = op.to_matrix(n).to_f64();
    if n == 0 {
        return Ok(0.0);
    }
    let conj = if p > 1.0 { p / (p - 1.0) } else { f64::INFINITY };
    let ratio = |x: &[f64]| lp_norm(&mat_vec(&m, x), p) / lp_norm(x, p);

    let mut starts: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    starts.push(vec![1.0; n]);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    starts.extend((0..config.restarts).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()));

    let mut best = 0f64;
    for mut x in starts {
        if lp_norm(&x, p) == 0.0 {
            continue;
        }
        let mut value = ratio(&x);
        best = best.max(value);
        if p == 1.0 || !conj.is_finite() {
            continue;
        }
        for _ in 0..config.steps {
            let tx = mat_vec(&m, &x);
            if lp_norm(&tx, p) == 0.0 {
                break;
            }
            let back = transpose_vec(&m, &dual_direction(&tx, p));
            if lp_norm(&back, conj) == 0.0 {
                break;
            }
            x = dual_direction(&back, conj);
            let next = ratio(&x);
            best = best.max(next);
            if next <= value * (1.0 + 1e-15) {
                break;
            }
            value = next;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszThorin {
    pub holds: bool,
    /// Exact endpoint bound minus the interior estimate.
    pub slack: f64,
    pub estimate: f64,
    pub bound: f64,
}

/// Compares the estimated `ℓ^{p_θ}` norm, `p_θ = 1/(1−θ)`, against
/// `‖T‖₁^{1−θ} ‖T‖_∞^θ`. The estimate is a lower bound, so this cannot fail spuriously.
pub fn riesz_thorin_check(op: &OperatorExpr, theta: f64, config: &AscentConfig) -> Result<RieszThorin> {
    assert!(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    let p = 1.0 / (1.0 - theta);
    let estimate = norm_lq_lower(op, p, config)?;
    let l1 = op.norm_l1().to_f64();
    let linf = op.norm_linf().to_f64();
    let bound = l1.powf(1.0 - theta) * linf.powf(theta);
    Ok(RieszThorin {
        holds: estimate <= bound + tolerance(),
        slack: bound - estimate,
        estimate,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Matrix, SignedPermutation};
    use crate::scalar::Scalar;

    #[test]
    fn diagonal_is_tight() {
        let op = OperatorExpr::diagonal(vec![Scalar::ratio(1, 2), Scalar::ratio(-3, 4)]).unwrap();
        let v = norm_lq_lower(&op, 2.0, &AscentConfig::default()).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        let rt = riesz_thorin_check(&op, 0.5, &AscentConfig::default()).unwrap();
        assert!(rt.holds && rt.slack.abs() < 1e-9);
    }

    #[test]
    fn identity_has_norm_one() {
        let op = OperatorExpr::Permutation(SignedPermutation::identity(3));
        assert!((norm_lq_lower(&op, 3.0, &AscentConfig::default()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_two_by_two_reaches_spectral_norm() {
        let m = Matrix::new(vec![
            vec![Scalar::int(2), Scalar::int(1)],
            vec![Scalar::int(1), Scalar::int(2)],
        ])
        .unwrap();
        let v = norm_lq_lower(&OperatorExpr::Dense(m), 2.0, &AscentConfig::default()).unwrap();
        assert!((v - 3.0).abs() < 1e-9);
    }

    #[test]
    fn large_operators_are_refused() {
        let op = OperatorExpr::Truncation(MAX_ASCENT_DIM + 1);
        assert!(norm_lq_lower(&op, 2.0, &AscentConfig::default()).is_err());
    }
}
