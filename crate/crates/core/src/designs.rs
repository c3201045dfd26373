//! Unitary 2-designs: the single-qubit Clifford group, Haar sampling and the
//! second-moment check against the Haar average.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QcextError, Result};
use crate::linalg::{c, hs_norm, identity, swap_operator, tensor, ComplexMatrix, ONE, ZERO};
use crate::mubs::{FamilyKind, UnitaryFamily, MAX_FAMILY_DIM};

/// Representative of U modulo global phase: the first entry with modulus
/// above 1e-9 is rotated to the positive real axis.
pub fn phase_normalize(u: &ComplexMatrix) -> ComplexMatrix {
    match u.iter().find(|z| z.norm() > 1e-9) {
        Some(z) => u * (z.conj() / z.norm()),
        None => u.clone(),
    }
}

fn phase_key(u: &ComplexMatrix) -> Vec<(i64, i64)> {
    phase_normalize(u)
        .iter()
        .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
        .collect()
}

/// The 24 single-qubit Cliffords modulo phase, generated from H and S by
/// breadth-first closure starting at I.
pub fn single_qubit_clifford() -> UnitaryFamily {
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let h = ComplexMatrix::from_row_slice(2, 2, &[s, s, s, -s]);
    let phase = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.0, 1.0)]);
    let generators = [h, phase];

    let mut members = vec![identity(2)];
    let mut seen = HashMap::new();
    seen.insert(phase_key(&members[0]), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &generators {
            let next = phase_normalize(&(g * &members[i]));
            let key = phase_key(&next);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(members.len());
                queue.push_back(members.len());
                members.push(next);
            }
        }
    }
    UnitaryFamily::new(FamilyKind::Clifford, 2, members).expect("Clifford elements are unitary")
}

/// Index of `u` in the family modulo global phase.
pub fn find_up_to_phase(fam: &UnitaryFamily, u: &ComplexMatrix) -> Option<usize> {
    let key = phase_key(u);
    fam.members().iter().position(|m| phase_key(m) == key)
}

/// M = Σ_{a1,a2,a2'} |a1 a2, a1 a2'><a1 a2, a1 a2'| on A ⊗ A'.
pub fn collision_projector(dim_a: usize, dim_a2: usize) -> ComplexMatrix {
    let dim_a1 = dim_a / dim_a2;
    let mut m = ComplexMatrix::zeros(dim_a * dim_a, dim_a * dim_a);
    for a1 in 0..dim_a1 {
        for a2 in 0..dim_a2 {
            for b2 in 0..dim_a2 {
                let idx = (a1 * dim_a2 + a2) * dim_a + a1 * dim_a2 + b2;
                m[(idx, idx)] = ONE;
            }
        }
    }
    m
}

/// Haar average of (U†)^{⊗2} M U^{⊗2}.
pub fn haar_moment(dim_a: usize, dim_a2: usize) -> ComplexMatrix {
    let d = dim_a as f64;
    let d2 = dim_a2 as f64;
    let denom = d * d - 1.0;
    identity(dim_a * dim_a) * c((d * d2 - 1.0) / denom, 0.0)
        + swap_operator(dim_a) * c((d - d2) / denom, 0.0)
}

/// ||Γ̂ - Γ_Haar||_HS with Γ̂ = (1/L) Σ_i (U_i†)^{⊗2} M U_i^{⊗2}.
pub fn verify_unitary_2design(fam: &UnitaryFamily, dim_a2: usize) -> Result<f64> {
    let d = fam.dim();
    if dim_a2 == 0 || !d.is_multiple_of(dim_a2) {
        return Err(QcextError::DimensionMismatch(format!(
            "|A2| = {dim_a2} does not divide |A| = {d}"
        )));
    }
    if d < 2 {
        return Err(QcextError::InvalidParameter("|A| must be at least 2".into()));
    }
    let m = collision_projector(d, dim_a2);
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for u in fam.members() {
        let uu = tensor(u, u);
        acc += uu.adjoint() * &m * uu;
    }
    acc /= c(fam.len() as f64, 0.0);
    Ok(hs_norm(&(acc - haar_moment(d, dim_a2))))
}

/// Haar-random unitary: complex Gaussian matrix, QR, and the phases of R's
/// diagonal moved into Q.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if d == 0 || d > MAX_FAMILY_DIM {
        return Err(QcextError::Budget(format!(
            "Haar sampling supports 1 <= d <= {MAX_FAMILY_DIM}, got {d}"
        )));
    }
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for col in 0..d {
        let diag = r[(col, col)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { ONE };
        for row in 0..d {
            q[(row, col)] *= phase;
        }
    }
    Ok(q)
}

/// Family of `count` independent Haar unitaries.
pub fn sample_haar_family<R: Rng + ?Sized>(
    d: usize,
    count: usize,
    rng: &mut R,
) -> Result<UnitaryFamily> {
    let members = (0..count)
        .map(|_| sample_haar_unitary(d, rng))
        .collect::<Result<Vec<_>>>()?;
    UnitaryFamily::new(FamilyKind::Haar, d, members)
}
