//! Realizing weak majorization by an average of signed permutations.
//!
//! Given `Σ_{n≤m} y*_n ≤ Σ_{n≤m} x*_n` for all `m`, we build weights `λ_j > 0` and
//! signed permutations `M_j` with `Σ λ_j M_j x = y`:
//!
//! 1. Raise the smallest entries of `b = y*` to a common level until the total
//!    matches `a = x*`. The raised vector `u` is majorized by `a`.
//! 2. The pair `(b, u − b)` in twice the dimension is majorized by `(a, 0)`.
//!    Write it as an average of permutations of `(a, 0)` by repeatedly stepping
//!    from the current point away from a vertex until a new prefix becomes tight.
//! 3. Restricting a permutation of `(a, 0)` to the first half leaves a partial
//!    permutation of `a`. Its missing outputs are filled with `±` the unused
//!    sources in two equally weighted copies, which average to zero.
//! 4. Conjugate by the maps sending `x` to `x*` and `y*` to `y`.

use std::cell::OnceCell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{build_w_y, OperatorExpr, SignedPermutation};
use crate::error::{Error, Result};
use crate::majorization::hlp_violation;
use crate::scalar::{Mode, Scalar};
use crate::seq::Seq;

/// Returns a convex combination of signed permutations sending `x` to `y`.
/// Float inputs are solved exactly on their binary values, then reported in float mode.
pub fn hlp_transfer(x: &Seq, y: &Seq) -> Result<OperatorExpr> {
    if let Some(m) = hlp_violation(x, y) {
        return Err(Error::PremiseViolated(format!(
            "head sums of y exceed those of x at m = {m}"
        )));
    }
    let mode = if x.mode() == Mode::Exact && y.mode() == Mode::Exact {
        Mode::Exact
    } else {
        Mode::Float
    };
    let dim = x.len().max(y.len()).max(1);
    let xs = x.padded(dim).in_mode(Mode::Exact);
    let ys = y.padded(dim).in_mode(Mode::Exact);
    let a = xs.rearrange().into_values();
    let b = ys.rearrange().into_values();
    if !weakly_majorized(&b, &a) {
        // Float inputs can pass the tolerant premise check yet overshoot exactly.
        return Err(Error::PremiseViolated(
            "head sums of y exceed those of x in exact arithmetic".into(),
        ));
    }

    let raised = raise_to_total(&b, &a);
    let mut point = b.clone();
    point.extend(raised.iter().zip(&b).map(|(u, v)| u - v));
    let mut source = a.clone();
    source.extend(std::iter::repeat(Scalar::zero()).take(dim));
    let vertices = peel_vertices(&point, &source)?;

    let (w, _) = build_w_y(&xs);
    let (_, back) = build_w_y(&ys);
    let mut terms = Vec::new();
    for (weight, perm) in vertices {
        for (share, inner) in restrict(&perm, &a, dim) {
            terms.push((&weight * &share, back.compose(&inner).compose(&w)));
        }
    }
    let merged = OperatorExpr::ConvexCombo(terms).merged();
    let image = merged.apply(&xs)?;
    let total: Scalar = match &merged {
        OperatorExpr::ConvexCombo(ts) => ts.iter().map(|(w, _)| w).sum(),
        _ => unreachable!("merged keeps the variant"),
    };
    if image != ys || total != Scalar::one() {
        return Err(Error::invariant(
            "exact transport",
            0,
            format!("combination maps x to {image:?} with total weight {total}"),
        ));
    }
    Ok(match (mode, merged) {
        (Mode::Float, OperatorExpr::ConvexCombo(ts)) => OperatorExpr::ConvexCombo(
            ts.into_iter().map(|(w, p)| (w.to_float(), p)).collect(),
        ),
        (_, op) => op,
    })
}

fn weakly_majorized(b: &[Scalar], a: &[Scalar]) -> bool {
    Seq::prefix_sums(b)
        .iter()
        .zip(&Seq::prefix_sums(a))
        .all(|(hb, ha)| hb <= ha)
}

/// `max(b_i, L)` with `L` chosen so the total equals that of `a`. Both inputs are
/// nonincreasing and nonnegative with `Σb ≤ Σa`.
fn raise_to_total(b: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
    let target: Scalar = a.iter().sum();
    let have: Scalar = b.iter().sum();
    if have == target {
        return b.to_vec();
    }
    let n = b.len();
    let mut kept_sum = have;
    for raised in 1..=n {
        let idx = n - raised;
        kept_sum = &kept_sum - &b[idx];
        let level = (&target - &kept_sum) / Scalar::from_index(raised);
        let fits_below = idx == 0 || level <= b[idx - 1];
        if level >= b[idx] && fits_below {
            let mut out = b[..idx].to_vec();
            out.extend(std::iter::repeat(level).take(raised));
            return out;
        }
    }
    unreachable!("some level always balances the totals")
}

/// Writes `point` as `Σ μ_k (source ∘ π_k)` with `source` sorted nonincreasing.
/// Each returned permutation maps a position to the index in `source` it takes.
///
/// Greedy: from the current residual, step away from the vertex that orders
/// `source` like the residual, as far as the rest stays in the permutohedron.
/// Every step makes one more prefix tight, so at most `2n` steps are needed.
fn peel_vertices(point: &[Scalar], source: &[Scalar]) -> Result<Vec<(Scalar, Vec<usize>)>> {
    let n = point.len();
    let rationals = |v: &[Scalar]| -> Result<Vec<BigRational>> {
        v.iter()
            .map(|s| {
                s.as_rational()
                    .cloned()
                    .ok_or_else(|| Error::ArithmeticModeMismatch("peeling needs exact input".into()))
            })
            .collect()
    };
    let (point, source) = (rationals(point)?, rationals(source)?);
    // Scale to integers: every quantity below is in units of 1/unit.
    let unit = point
        .iter()
        .chain(&source)
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let to_int = |v: &BigRational| v.numer() * (&unit / v.denom());
    let source: Vec<BigInt> = source.iter().map(to_int).collect();
    let mut prefix = vec![BigInt::zero()];
    for v in &source {
        let next = prefix.last().expect("nonempty") + v;
        prefix.push(next);
    }
    let mut state = Residual {
        numer: point.iter().map(to_int).collect(),
        mass: BigInt::one(),
        denom: BigInt::one(),
    };
    let mut out = Vec::new();
    for _ in 0..=2 * n + 2 {
        let keys = state.floats();
        let order = descending_order(&state.numer, &keys);
        let mut perm = vec![0; n];
        let mut vertex = vec![BigInt::zero(); n];
        for (rank, &pos) in order.iter().enumerate() {
            perm[pos] = rank;
            vertex[pos] = source[rank].clone();
        }
        if state.numer.iter().zip(&vertex).all(|(r, v)| r == &(&state.mass * v)) {
            out.push((state.weight(&state.mass, &BigInt::one()), perm));
            return Ok(out);
        }
        let (num, den) = max_step(&state, &keys, &vertex, &prefix);
        if !num.is_positive() {
            return Err(Error::invariant("vertex peeling", out.len(), "no progress"));
        }
        out.push((state.weight(&num, &den), perm));
        state = state.advance(&num, &den, &vertex);
    }
    Err(Error::invariant("vertex peeling", out.len(), "iteration cap reached"))
}

/// Residual `numer / denom` with mass `mass / denom`, all integers.
struct Residual {
    numer: Vec<BigInt>,
    mass: BigInt,
    denom: BigInt,
}

impl Residual {
    /// The weight of a step `num / (denom·den)`.
    fn weight(&self, num: &BigInt, den: &BigInt) -> Scalar {
        Scalar::Exact(BigRational::new(num.clone(), &self.denom * den))
    }

    /// Residual after removing `num / (denom·den)` times `vertex`.
    fn advance(&self, num: &BigInt, den: &BigInt, vertex: &[BigInt]) -> Residual {
        let mut next = Residual {
            numer: self.numer.iter().zip(vertex).map(|(r, v)| r * den - num * v).collect(),
            mass: &self.mass * den - num,
            denom: &self.denom * den,
        };
        let g = next
            .numer
            .iter()
            .fold(next.mass.gcd(&next.denom), |g, r| g.gcd(r));
        if !g.is_one() && !g.is_zero() {
            for r in &mut next.numer {
                *r /= &g;
            }
            next.mass /= &g;
            next.denom /= &g;
        }
        next
    }

    fn floats(&self) -> Vec<f64> {
        self.numer.iter().map(|r| ratio_f64(r, &self.denom)).collect()
    }
}

/// `n / d` for `d > 0` without overflowing on long integers.
fn ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    let shift = d.bits().saturating_sub(64).min(n.bits().saturating_sub(64));
    let (n, d) = (n >> shift, d >> shift);
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Sorts by float keys and settles near-ties exactly.
fn descending_order(values: &[BigInt], keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (keys[i], keys[j]);
        if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
            b.partial_cmp(&a).unwrap_or(Ordering::Equal)
        } else {
            values[j].cmp(&values[i])
        }
    });
    order
}

/// Float run of the Newton iteration in [`max_step`]; returns the binding prefix
/// as a set of positions, or `None` when the full step looks feasible.
fn guess_binding_set(residual: &[f64], mass: f64, vertex: &[f64], prefix: &[f64]) -> Option<Vec<usize>> {
    let scale = prefix.last().copied().unwrap_or(1.0).abs().max(1.0);
    let mut step = mass;
    let mut binding = None;
    for _ in 0..64 {
        let shifted: Vec<f64> = residual.iter().zip(vertex).map(|(r, v)| r - step * v).collect();
        let mut order: Vec<usize> = (0..shifted.len()).collect();
        order.sort_by(|&i, &j| shifted[j].partial_cmp(&shifted[i]).unwrap_or(Ordering::Equal));
        let slack = mass - step;
        let (mut acc, mut worst) = (0.0, None::<(f64, usize)>);
        for (m, &pos) in order.iter().enumerate() {
            acc += shifted[pos];
            let excess = acc - slack * prefix[m + 1];
            if excess > 1e-12 * scale && worst.map_or(true, |(e, _)| excess > e) {
                worst = Some((excess, m + 1));
            }
        }
        let Some((_, m)) = worst else {
            break;
        };
        let top = &order[..m];
        let denom = prefix[m] - top.iter().map(|&i| vertex[i]).sum::<f64>();
        if denom <= 0.0 {
            break;
        }
        step = (mass * prefix[m] - top.iter().map(|&i| residual[i]).sum::<f64>()) / denom;
        binding = Some(top.to_vec());
    }
    binding
}

/// Largest step `num / (denom·den)` keeping `residual − step·vertex` majorized by
/// `(mass − step)·source`.
///
/// Exact Newton steps from above on the convex violation function. The start is
/// the float guess when it is a valid step: a guess that turns out feasible is
/// tight for its own prefix, so it is already the maximum.
fn max_step(state: &Residual, keys: &[f64], vertex: &[BigInt], prefix: &[BigInt]) -> (BigInt, BigInt) {
    // Step for the top set `top`: tight at that prefix, `den > 0` required.
    let step_for = |top: &[usize]| -> Option<(BigInt, BigInt)> {
        let m = top.len();
        let res_sum: BigInt = top.iter().map(|&i| &state.numer[i]).sum();
        let vert_sum: BigInt = top.iter().map(|&i| &vertex[i]).sum();
        let den = &prefix[m] - vert_sum;
        den.is_positive().then(|| (&state.mass * &prefix[m] - res_sum, den))
    };
    let to_f = |v: &[BigInt]| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>();
    let (vert_f, prefix_f) = (to_f(vertex), to_f(prefix));
    let mass_f = ratio_f64(&state.mass, &state.denom);
    let full = (state.mass.clone(), BigInt::one());
    let within_mass = |(num, den): &(BigInt, BigInt)| num.is_positive() && num <= &(&state.mass * den);
    let mut step = guess_binding_set(keys, mass_f, &vert_f, &prefix_f)
        .and_then(|top| step_for(&top))
        .filter(within_mass)
        .unwrap_or(full);
    loop {
        match violated_prefix(state, (keys, &vert_f, &prefix_f), vertex, prefix, &step) {
            None => return step,
            Some(top) => step = step_for(&top).expect("a violated prefix has room to move"),
        }
    }
}

/// The most violated top set after the step `num / (denom·den)`, or `None` if
/// every prefix holds exactly. Prefixes whose float excess is clearly negative
/// are skipped; the rest are decided on integers.
fn violated_prefix(
    state: &Residual,
    floats: (&[f64], &[f64], &[f64]),
    vertex: &[BigInt],
    prefix: &[BigInt],
    (num, den): &(BigInt, BigInt),
) -> Option<Vec<usize>> {
    let (res_f, vert_f, prefix_f) = floats;
    let step_f = ratio_f64(num, &(&state.denom * den));
    let keys: Vec<f64> = res_f.iter().zip(vert_f).map(|(r, v)| r - step_f * v).collect();
    let scale = keys.iter().map(|k| k.abs()).sum::<f64>() + prefix_f.last().map_or(0.0, |p| p.abs()) + 1.0;
    let margin = 1e-9 * scale;
    // Shifted residual and slack, both scaled by `denom·den`.
    let memo: Vec<OnceCell<BigInt>> = (0..keys.len()).map(|_| OnceCell::new()).collect();
    let exact_at = |i: usize| memo[i].get_or_init(|| &state.numer[i] * den - num * &vertex[i]);
    let slack = &state.mass * den - num;

    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (keys[i], keys[j]);
        if (a - b).abs() > margin {
            b.partial_cmp(&a).unwrap_or(Ordering::Equal)
        } else {
            exact_at(j).cmp(exact_at(i))
        }
    });

    let slack_f = ratio_f64(&slack, &(&state.denom * den));
    let mut acc_f = 0.0;
    // Exact partial sum over `order[..summed]`, extended only when needed.
    let (mut acc, mut summed) = (BigInt::zero(), 0);
    let mut worst: Option<(BigInt, usize)> = None;
    for (m, &pos) in order.iter().enumerate() {
        acc_f += keys[pos];
        if acc_f - slack_f * prefix_f[m + 1] < -margin {
            continue;
        }
        for &i in &order[summed..=m] {
            acc += exact_at(i);
        }
        summed = m + 1;
        let excess = &acc - &slack * &prefix[m + 1];
        if excess.is_positive() && worst.as_ref().map_or(true, |(e, _)| &excess > e) {
            worst = Some((excess, m + 1));
        }
    }
    worst.map(|(_, m)| order[..m].to_vec())
}

/// Signed permutations on the first `dim` coordinates averaging to the restriction
/// of `perm` (an arrangement of `(a, 0)`), with their shares.
fn restrict(perm: &[usize], a: &[Scalar], dim: usize) -> Vec<(Scalar, SignedPermutation)> {
    let mut used = vec![false; dim];
    let mut map: Vec<Option<usize>> = perm[..dim]
        .iter()
        .map(|&src| (src < dim).then_some(src))
        .collect();
    for &src in map.iter().flatten() {
        used[src] = true;
    }
    let spare: Vec<usize> = (0..dim).filter(|&j| !used[j]).collect();
    let holes: Vec<usize> = (0..dim).filter(|&i| map[i].is_none()).collect();
    let needs_signs = spare.iter().any(|&j| !a[j].is_zero());
    for (&hole, &src) in holes.iter().zip(&spare) {
        map[hole] = Some(src);
    }
    let build = |fill_sign: i8| {
        let entries = map
            .iter()
            .enumerate()
            .map(|(i, src)| {
                let sign = if holes.contains(&i) { fill_sign } else { 1 };
                Some((src.expect("all holes filled"), sign))
            })
            .collect();
        SignedPermutation::new(entries).expect("bijection by construction")
    };
    if needs_signs {
        vec![(Scalar::ratio(1, 2), build(1)), (Scalar::ratio(1, 2), build(-1))]
    } else {
        vec![(Scalar::one(), build(1))]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(op: &OperatorExpr) -> Vec<Scalar> {
        match op {
            OperatorExpr::ConvexCombo(ts) => ts.iter().map(|(w, _)| w.clone()).collect(),
            _ => panic!("expected a convex combination"),
        }
    }

    #[test]
    fn two_to_one_and_a_half() {
        let x = Seq::from_ints(&[2, 1]);
        let y = Seq::new(vec![Scalar::ratio(3, 2), Scalar::zero()]);
        let t = hlp_transfer(&x, &y).unwrap();
        assert_eq!(t.apply(&x).unwrap(), y);
        assert_eq!(weights(&t).into_iter().sum::<Scalar>(), Scalar::one());
        assert!(t.norm_l1() <= Scalar::one() && t.norm_linf() <= Scalar::one());
    }

    #[test]
    fn equal_inputs_give_identity() {
        let x = Seq::from_ints(&[3, -1, 2]);
        let t = hlp_transfer(&x, &x).unwrap();
        assert_eq!(
            t,
            OperatorExpr::ConvexCombo(vec![(Scalar::one(), SignedPermutation::identity(3))])
        );
        let ones = Seq::from_ints(&[1, 1]);
        assert_eq!(weights(&hlp_transfer(&ones, &ones).unwrap()).len(), 1);
    }

    #[test]
    fn zero_target_and_sign_changes() {
        let x = Seq::from_ints(&[5, -3]);
        let t = hlp_transfer(&x, &Seq::zeros(2)).unwrap();
        assert_eq!(t.apply(&x).unwrap(), Seq::zeros(2));
        let y = Seq::from_ints(&[0, 0, -4, 1]);
        let t = hlp_transfer(&x, &y).unwrap();
        assert_eq!(t.apply(&x).unwrap(), y);
    }

    #[test]
    fn premise_failure_is_reported() {
        let err = hlp_transfer(&Seq::from_ints(&[1, 1]), &Seq::from_ints(&[2, 0]));
        assert!(matches!(err, Err(Error::PremiseViolated(_))));
    }

    #[test]
    fn raise_to_total_is_majorized() {
        let b = vec![Scalar::zero(), Scalar::zero()];
        let a = vec![Scalar::int(2), Scalar::int(1)];
        assert_eq!(raise_to_total(&b, &a), vec![Scalar::ratio(3, 2), Scalar::ratio(3, 2)]);
    }

    #[test]
    fn float_inputs_are_reported_in_float_mode() {
        let x = Seq::from_f64s(&[0.75, 0.5]);
        let y = Seq::from_f64s(&[0.5, 0.25]);
        let t = hlp_transfer(&x, &y).unwrap();
        assert!(weights(&t).iter().all(|w| !w.is_exact()));
        let image = t.apply(&x).unwrap();
        assert!(image.get(0).eq_tol(&y.get(0)) && image.get(1).eq_tol(&y.get(1)));
    }
}
