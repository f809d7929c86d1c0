//! Masking `f` and `g` by the block families and comparing the rearranged pieces.

use serde::Serialize;

use super::{ABRegions, PDecomposition};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::scalar::Scalar;
use crate::step::StepFn;

/// `φ₁, φ₂, φ₃ = f` masked by `∪A_n, ∪B_n, ∪Ω_n`; `ψ₁, ψ₂, ψ₃ = g` masked by
/// `∪A_n, ∪B_n, ∪Γ_n`.
#[derive(Debug, Clone, Serialize)]
pub struct Split {
    pub q: Scalar,
    #[serde(skip)]
    pub f: StepFn,
    #[serde(skip)]
    pub g: StepFn,
    pub mask_a: IntervalSet,
    pub mask_b: IntervalSet,
    pub mask_omega: IntervalSet,
    pub mask_gamma: IntervalSet,
    pub phi1: StepFn,
    pub phi2: StepFn,
    pub phi3: StepFn,
    pub psi1: StepFn,
    pub psi2: StepFn,
    pub psi3: StepFn,
}

pub fn split_functions(regions: &ABRegions, decomp: &PDecomposition) -> Result<Split> {
    let (f, g) = (&regions.f, &regions.g);
    let mask_a = decomp.union_a();
    let mask_b = decomp.union_b();
    let mask_omega = decomp.union_omega();
    let mask_gamma = decomp.union_gamma();
    Ok(Split {
        q: regions.q.clone(),
        phi1: f.mask(&mask_a)?,
        phi2: f.mask(&mask_b)?,
        phi3: f.mask(&mask_omega)?,
        psi1: g.mask(&mask_a)?,
        psi2: g.mask(&mask_b)?,
        psi3: g.mask(&mask_gamma)?,
        f: f.clone(),
        g: g.clone(),
        mask_a,
        mask_b,
        mask_omega,
        mask_gamma,
    })
}

/// Nonincreasing rearrangement of `h·χ_mask` for nonincreasing `h`: the cells
/// kept by the mask, concatenated left to right, padded with zeros to `h`'s length.
pub fn compress_rearrange(h: &StepFn, mask: &IntervalSet) -> Result<StepFn> {
    if !h.is_nonincreasing_nonnegative() {
        return Err(Error::PremiseViolated(
            "compression needs a nonnegative nonincreasing function".into(),
        ));
    }
    // Rejects masks that would cut a cell.
    h.mask(mask)?;
    let half = Scalar::ratio(1, 2);
    let mut kept: Vec<Scalar> = h
        .cells()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask.contains(&(Scalar::from_index(*i) + &half)))
        .map(|(_, v)| v.clone())
        .collect();
    kept.resize(h.len(), Scalar::zero());
    Ok(StepFn::new(kept))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhisPsisReport {
    pub head_points: usize,
    pub tail_points: usize,
    pub cells: usize,
}

fn fail(clause: &str, detail: String) -> Error {
    Error::invariant(clause, 0, detail)
}

/// Compressed rearrangement, cross-checked against sorting the masked cells.
fn star(h: &StepFn, mask: &IntervalSet, name: &str) -> Result<Vec<Scalar>> {
    let compressed = compress_rearrange(h, mask)?;
    let sorted = h.mask(mask)?.rearrange();
    if compressed != sorted {
        return Err(fail(
            "compression equals rearrangement",
            format!("{name}: {compressed:?} vs {sorted:?}"),
        ));
    }
    Ok(compressed.cells().to_vec())
}

pub fn verify_phis_psis(split: &Split) -> Result<PhisPsisReport> {
    let n = split.f.len().max(split.g.len());
    let zero = Scalar::zero();
    for i in 0..n {
        let (fv, gv) = (split.f.cell(i), split.g.cell(i));
        for (name, piece, cap) in [
            ("φ₁", &split.phi1, &fv),
            ("φ₂", &split.phi2, &fv),
            ("φ₃", &split.phi3, &fv),
            ("ψ₁", &split.psi1, &gv),
            ("ψ₂", &split.psi2, &gv),
            ("ψ₃", &split.psi3, &gv),
        ] {
            let v = piece.cell(i);
            if v.is_negative() || !v.le_tol(cap) {
                return Err(fail("pieces within bounds", format!("{name} cell {i} = {v}")));
            }
        }
        let covered = split.psi1.cell(i) + split.psi2.cell(i) + split.psi3.cell(i);
        if !gv.le_tol(&covered) || (gv.is_positive() && covered.is_zero()) {
            return Err(fail("g ≤ ψ₁ + ψ₂ + ψ₃", format!("cell {i}: g = {gv}, sum = {covered}")));
        }
    }

    let phi1 = star(&split.f, &split.mask_a, "φ₁")?;
    let psi1 = star(&split.g, &split.mask_a, "ψ₁")?;
    let (mut acc_phi, mut acc_psi) = (zero.clone(), zero.clone());
    for k in 0..n {
        acc_phi = acc_phi + phi1.get(k).cloned().unwrap_or_else(Scalar::zero);
        acc_psi = acc_psi + psi1.get(k).cloned().unwrap_or_else(Scalar::zero);
        if !acc_psi.le_tol(&acc_phi) {
            return Err(fail(
                "head sums of ψ₁* ≤ φ₁*",
                format!("at t = {}: {acc_psi} > {acc_phi}", k + 1),
            ));
        }
    }

    let phi2 = StepFn::new(star(&split.f, &split.mask_b, "φ₂")?).power(&split.q)?;
    let psi2 = StepFn::new(star(&split.g, &split.mask_b, "ψ₂")?).power(&split.q)?;
    let (mut tail_phi, mut tail_psi) = (zero.clone(), zero.clone());
    for k in (0..n).rev() {
        tail_phi = tail_phi + phi2.cell(k);
        tail_psi = tail_psi + psi2.cell(k);
        if !tail_psi.le_tol(&tail_phi) {
            return Err(fail(
                "tail q-sums of ψ₂* ≤ φ₂*",
                format!("at t = {k}: {tail_psi} > {tail_phi}"),
            ));
        }
    }

    let phi3 = star(&split.f, &split.mask_omega, "φ₃")?;
    let psi3 = star(&split.g, &split.mask_gamma, "ψ₃")?;
    for k in 0..n {
        let (p, s) = (
            phi3.get(k).cloned().unwrap_or_else(Scalar::zero),
            psi3.get(k).cloned().unwrap_or_else(Scalar::zero),
        );
        if !s.le_tol(&p) {
            return Err(fail("ψ₃* ≤ φ₃*", format!("cell {k}: {s} > {p}")));
        }
    }
    Ok(PhisPsisReport {
        head_points: n,
        tail_points: n,
        cells: n,
    })
}
