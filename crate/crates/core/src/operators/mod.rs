//! Structured linear maps on finitely supported sequences.
//!
//! Every operator acts on a finite block of coordinates and is zero outside it,
//! except [`OperatorExpr::Truncation`], which accepts inputs of any length.

mod pnorm;
mod transfer;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seq::Seq;

pub use pnorm::{norm_lq_lower, riesz_thorin_check, AscentConfig, RieszThorin};
pub use transfer::hlp_transfer;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: Vec<Vec<Scalar>>,
    cols: usize,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix { rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows: vec![vec![Scalar::zero(); cols]; rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Scalar::one();
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// Zero-padded copy of size `n × n`; `n` must cover both dimensions.
    fn embedded(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            m.rows[i][..row.len()].clone_from_slice(row);
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.n_rows(), "matrix product shape");
        let mut out = Matrix::zeros(self.n_rows(), other.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j] = &out.rows[i][j] + &(a * b);
                    }
                }
            }
        }
        out
    }

    /// Largest absolute column sum.
    pub fn norm_l1(&self) -> Scalar {
        (0..self.cols)
            .map(|j| self.rows.iter().map(|r| r[j].abs()).sum::<Scalar>())
            .fold(Scalar::zero(), Scalar::max)
    }

    /// Largest absolute row sum.
    pub fn norm_linf(&self) -> Scalar {
        self.rows
            .iter()
            .map(|r| r.iter().map(Scalar::abs).sum::<Scalar>())
            .fold(Scalar::zero(), Scalar::max)
    }

    pub fn apply(&self, x: &Seq) -> Result<Seq> {
        check_support(x, self.cols)?;
        Ok(Seq::new(
            self.rows
                .iter()
                .map(|r| r.iter().enumerate().map(|(j, a)| a * &x.get(j)).sum())
                .collect(),
        ))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect()
    }
}

fn check_support(x: &Seq, dim: usize) -> Result<()> {
    if x.support_len() > dim {
        return Err(Error::DimensionMismatch(format!(
            "input has support {} but the operator acts on {dim} coordinates",
            x.support_len()
        )));
    }
    Ok(())
}

/// `Σ w_k M_k x` over one common denominator, so that long weights cost integer
/// multiply-adds instead of a normalization per term. `None` unless all inputs are exact.
fn apply_exact_combo(terms: &[(Scalar, SignedPermutation)], x: &Seq) -> Result<Option<Seq>> {
    let dim = terms.iter().map(|(_, p)| p.dim()).max().unwrap_or(0);
    check_support(x, dim)?;
    let (Some(weights), Some(xs)) = (
        terms.iter().map(|(w, _)| w.as_rational()).collect::<Option<Vec<_>>>(),
        x.values().iter().map(Scalar::as_rational).collect::<Option<Vec<_>>>(),
    ) else {
        return Ok(None);
    };
    let common = |values: &[&BigRational]| {
        values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
    };
    let (wd, xd) = (common(&weights), common(&xs));
    let scaled = |v: &BigRational, d: &BigInt| v.numer() * (d / v.denom());
    let wn: Vec<BigInt> = weights.iter().map(|w| scaled(w, &wd)).collect();
    let xn: Vec<BigInt> = xs.iter().map(|v| scaled(v, &xd)).collect();
    let mut acc = vec![BigInt::zero(); dim];
    for (w, (_, perm)) in wn.iter().zip(terms) {
        for (out, entry) in acc.iter_mut().zip(perm.map()) {
            if let Some((src, sign)) = entry {
                if let Some(v) = xn.get(*src).filter(|v| !v.is_zero()) {
                    if *sign < 0 {
                        *out -= w * v;
                    } else {
                        *out += w * v;
                    }
                }
            }
        }
    }
    let denom = wd * xd;
    Ok(Some(
        acc.into_iter()
            .map(|n| Scalar::Exact(BigRational::new(n, denom.clone())))
            .collect(),
    ))
}

/// The matrix of an exact convex combination, accumulated on integers over the
/// common denominator of the weights.
fn exact_combo_matrix(terms: &[(Scalar, SignedPermutation)], n: usize) -> Option<Matrix> {
    let weights = terms.iter().map(|(w, _)| w.as_rational()).collect::<Option<Vec<_>>>()?;
    let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for (w, (_, p)) in weights.iter().zip(terms) {
        let scaled = w.numer() * (&denom / w.denom());
        for (t, entry) in p.map().iter().enumerate() {
            if let Some((src, sign)) = entry {
                if *sign < 0 {
                    acc[t][*src] -= &scaled;
                } else {
                    acc[t][*src] += &scaled;
                }
            }
        }
    }
    let rows = acc
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| Scalar::Exact(BigRational::new(v, denom.clone())))
                .collect()
        })
        .collect();
    Some(Matrix { rows, cols: n })
}

/// Output coordinate `t` receives `sign · x[source]`, or zero when unmapped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPermutation {
    map: Vec<Option<(usize, i8)>>,
}

impl SignedPermutation {
    pub fn new(map: Vec<Option<(usize, i8)>>) -> Result<Self> {
        let dim = map.len();
        let mut seen = vec![false; dim];
        for &(src, sign) in map.iter().flatten() {
            if src >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "source {src} outside {dim} coordinates"
                )));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::PremiseViolated(format!("sign {sign} is not ±1")));
            }
            if std::mem::replace(&mut seen[src], true) {
                return Err(Error::PremiseViolated(format!("source {src} used twice")));
            }
        }
        Ok(SignedPermutation { map })
    }

    pub fn identity(dim: usize) -> Self {
        SignedPermutation {
            map: (0..dim).map(|i| Some((i, 1))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[Option<(usize, i8)>] {
        &self.map
    }

    pub fn is_bijection(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    pub fn apply(&self, x: &Seq) -> Result<Seq> {
        check_support(x, self.dim())?;
        Ok(Seq::new(
            self.map
                .iter()
                .map(|entry| match entry {
                    Some((src, 1)) => x.get(*src),
                    Some((src, _)) => -x.get(*src),
                    None => Scalar::zero(),
                })
                .collect(),
        ))
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn compose(&self, inner: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.dim(), inner.dim(), "composition of different dimensions");
        SignedPermutation {
            map: self
                .map
                .iter()
                .map(|entry| {
                    entry.and_then(|(mid, s)| inner.map[mid].map(|(src, t)| (src, s * t)))
                })
                .collect(),
        }
    }

    /// Extends by the identity on the new coordinates.
    pub fn padded(&self, dim: usize) -> SignedPermutation {
        let mut map = self.map.clone();
        map.extend((self.dim()..dim).map(|i| Some((i, 1))));
        SignedPermutation { map }
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (t, entry) in self.map.iter().enumerate() {
            if let Some((src, sign)) = entry {
                m.rows[t][*src] = Scalar::int(i64::from(*sign));
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum OperatorExpr {
    Permutation(SignedPermutation),
    Diagonal(Vec<Scalar>),
    ConvexCombo(Vec<(Scalar, SignedPermutation)>),
    Truncation(usize),
    Dense(Matrix),
    /// Factors are applied first to last.
    Composition(Vec<OperatorExpr>),
}

impl OperatorExpr {
    pub fn diagonal(factors: Vec<Scalar>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| !f.abs().le_tol(&Scalar::one())) {
            return Err(Error::PremiseViolated(format!("diagonal factor {f} exceeds 1 in size")));
        }
        Ok(OperatorExpr::Diagonal(factors))
    }

    pub fn convex_combo(terms: Vec<(Scalar, SignedPermutation)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::PremiseViolated("empty convex combination".into()));
        }
        if let Some((w, _)) = terms.iter().find(|(w, _)| !w.is_positive()) {
            return Err(Error::PremiseViolated(format!("weight {w} is not positive")));
        }
        let total: Scalar = terms.iter().map(|(w, _)| w).sum();
        if !total.eq_tol(&Scalar::one()) {
            return Err(Error::PremiseViolated(format!("weights sum to {total}")));
        }
        Ok(OperatorExpr::ConvexCombo(terms))
    }

    pub fn apply(&self, x: &Seq) -> Result<Seq> {
        match self {
            OperatorExpr::Permutation(p) => p.apply(x),
            OperatorExpr::Diagonal(factors) => {
                check_support(x, factors.len())?;
                Ok(factors.iter().enumerate().map(|(i, f)| f * &x.get(i)).collect())
            }
            OperatorExpr::ConvexCombo(terms) => {
                if let Some(y) = apply_exact_combo(terms, x)? {
                    return Ok(y);
                }
                let dim = terms.iter().map(|(_, p)| p.dim()).max().unwrap_or(0);
                let mut out = vec![Scalar::zero(); dim];
                for (w, p) in terms {
                    for (o, v) in out.iter_mut().zip(p.apply(x)?.values()) {
                        *o = &*o + &(w * v);
                    }
                }
                Ok(Seq::new(out))
            }
            OperatorExpr::Truncation(n) => Ok(x.truncate_to(*n)),
            OperatorExpr::Dense(m) => m.apply(x),
            OperatorExpr::Composition(factors) => {
                factors.iter().try_fold(x.clone(), |acc, op| op.apply(&acc))
            }
        }
    }

    /// Side of the square block on which the operator is represented.
    pub fn extent(&self) -> usize {
        match self {
            OperatorExpr::Permutation(p) => p.dim(),
            OperatorExpr::Diagonal(f) => f.len(),
            OperatorExpr::ConvexCombo(terms) => terms.iter().map(|(_, p)| p.dim()).max().unwrap_or(0),
            OperatorExpr::Truncation(n) => *n,
            OperatorExpr::Dense(m) => m.n_rows().max(m.n_cols()),
            OperatorExpr::Composition(fs) => fs.iter().map(OperatorExpr::extent).max().unwrap_or(0),
        }
    }

    /// Exact matrix on the first `n ≥ extent()` coordinates.
    pub fn to_matrix(&self, n: usize) -> Matrix {
        match self {
            OperatorExpr::Permutation(p) => p.to_matrix().embedded(n),
            OperatorExpr::Diagonal(f) => {
                let mut m = Matrix::zeros(n, n);
                for (i, v) in f.iter().enumerate() {
                    m.rows[i][i] = v.clone();
                }
                m
            }
            OperatorExpr::ConvexCombo(terms) => {
                if let Some(m) = exact_combo_matrix(terms, n) {
                    return m;
                }
                let mut m = Matrix::zeros(n, n);
                for (w, p) in terms {
                    for (t, entry) in p.map().iter().enumerate() {
                        if let Some((src, sign)) = entry {
                            let v = w * &Scalar::int(i64::from(*sign));
                            m.rows[t][*src] = &m.rows[t][*src] + &v;
                        }
                    }
                }
                m
            }
            OperatorExpr::Truncation(k) => {
                let mut m = Matrix::zeros(n, n);
                for i in 0..(*k).min(n) {
                    m.rows[i][i] = Scalar::one();
                }
                m
            }
            OperatorExpr::Dense(d) => d.embedded(n),
            OperatorExpr::Composition(fs) => fs
                .iter()
                .fold(Matrix::identity(n), |acc, op| op.to_matrix(n).mul(&acc)),
        }
    }

    pub fn norm_l1(&self) -> Scalar {
        self.to_matrix(self.extent()).norm_l1()
    }

    pub fn norm_linf(&self) -> Scalar {
        self.to_matrix(self.extent()).norm_linf()
    }

    /// Merges repeated permutations in a convex combination; other variants are returned unchanged.
    pub fn merged(self) -> OperatorExpr {
        let OperatorExpr::ConvexCombo(terms) = self else {
            return self;
        };
        let mut order: Vec<SignedPermutation> = Vec::new();
        let mut weights: HashMap<SignedPermutation, Scalar> = HashMap::new();
        for (w, p) in terms {
            match weights.get_mut(&p) {
                Some(acc) => *acc = &*acc + &w,
                None => {
                    order.push(p.clone());
                    weights.insert(p, w);
                }
            }
        }
        OperatorExpr::ConvexCombo(
            order
                .into_iter()
                .map(|p| (weights.remove(&p).expect("weight recorded"), p))
                .collect(),
        )
    }
}

/// `W` sends `x` to its rearrangement and `Y` sends the rearrangement back to `x`.
/// Ties keep their original order, so `Y ∘ W` is the identity.
pub fn build_w_y(x: &Seq) -> (SignedPermutation, SignedPermutation) {
    let dim = x.len();
    let mut order: Vec<usize> = (0..dim).collect();
    let abs = x.abs();
    order.sort_by(|&i, &j| {
        abs.values()[j]
            .partial_cmp(&abs.values()[i])
            .expect("comparable")
    });
    let sign = |i: usize| if x.values()[i].is_negative() { -1 } else { 1 };
    let w = order.iter().map(|&src| Some((src, sign(src)))).collect();
    let mut y = vec![None; dim];
    for (k, &src) in order.iter().enumerate() {
        y[src] = Some((k, sign(src)));
    }
    (
        SignedPermutation { map: w },
        SignedPermutation { map: y },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::int(x)).collect()
    }

    #[test]
    fn w_y_example() {
        let x = Seq::from_ints(&[0, 2, -1]);
        let (w, y) = build_w_y(&x);
        assert_eq!(w.map()[0], Some((1, 1)));
        assert_eq!(w.map()[1], Some((2, -1)));
        let wx = w.apply(&x).unwrap();
        assert_eq!(wx, Seq::from_ints(&[2, 1, 0]));
        assert_eq!(y.apply(&wx).unwrap(), x);
        assert_eq!(y.compose(&w), SignedPermutation::identity(3));
    }

    #[test]
    fn w_is_identity_on_sorted_input() {
        let x = Seq::from_ints(&[3, 2, 2, 0]);
        assert_eq!(build_w_y(&x).0, SignedPermutation::identity(4));
        let z = Seq::zeros(2);
        assert_eq!(build_w_y(&z).0.apply(&z).unwrap(), z);
    }

    #[test]
    fn dense_norms() {
        let half = Scalar::ratio(1, 2);
        let m = Matrix::new(vec![vec![half.clone(), half], ints(&[0, 0])]).unwrap();
        let op = OperatorExpr::Dense(m);
        assert_eq!(op.norm_l1(), Scalar::ratio(1, 2));
        assert_eq!(op.norm_linf(), Scalar::one());
    }

    #[test]
    fn truncation_example() {
        let y = OperatorExpr::Truncation(2).apply(&Seq::from_ints(&[1, 2, 3])).unwrap();
        assert_eq!(y, Seq::from_ints(&[1, 2, 0]));
    }

    #[test]
    fn convex_combo_of_isometries_is_contraction() {
        let p = SignedPermutation::new(vec![Some((1, -1)), Some((0, 1)), Some((2, 1))]).unwrap();
        let op = OperatorExpr::convex_combo(vec![
            (Scalar::ratio(1, 3), p),
            (Scalar::ratio(2, 3), SignedPermutation::identity(3)),
        ])
        .unwrap();
        assert!(op.norm_l1() <= Scalar::one());
        assert!(op.norm_linf() <= Scalar::one());
        let y = op.apply(&Seq::from_ints(&[3, 6, 9])).unwrap();
        assert_eq!(y, Seq::from_ints(&[0, 5, 9]));
    }

    #[test]
    fn invalid_operators_are_rejected() {
        assert!(SignedPermutation::new(vec![Some((0, 1)), Some((0, 1))]).is_err());
        assert!(SignedPermutation::new(vec![Some((0, 2))]).is_err());
        assert!(OperatorExpr::diagonal(ints(&[2])).is_err());
        assert!(OperatorExpr::convex_combo(vec![(Scalar::ratio(1, 2), SignedPermutation::identity(1))]).is_err());
        let err = SignedPermutation::identity(2).apply(&Seq::from_ints(&[1, 1, 1]));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn composition_applies_in_order_and_matches_matrix() {
        let swap = SignedPermutation::new(vec![Some((1, 1)), Some((0, 1))]).unwrap();
        let op = OperatorExpr::Composition(vec![
            OperatorExpr::Truncation(1),
            OperatorExpr::Permutation(swap),
        ]);
        let x = Seq::from_ints(&[4, 7]);
        assert_eq!(op.apply(&x).unwrap(), Seq::from_ints(&[0, 4]));
        assert_eq!(op.to_matrix(2).apply(&x).unwrap(), Seq::from_ints(&[0, 4]));
        assert_eq!(op.norm_l1(), Scalar::one());
    }

    #[test]
    fn merged_sums_duplicate_terms() {
        let id = SignedPermutation::identity(2);
        let op = OperatorExpr::ConvexCombo(vec![
            (Scalar::ratio(1, 4), id.clone()),
            (Scalar::ratio(3, 4), id.clone()),
        ])
        .merged();
        assert_eq!(op, OperatorExpr::ConvexCombo(vec![(Scalar::one(), id)]));
    }
}
