//! Mutually unbiased bases in prime-power dimension and the unitary family
//! container shared by every extractor construction.
//!
//! Member `i` of a basis-change family is the unitary U_i whose rows are the
//! bras of the i-th basis: measuring U_i ρ U_i† in the computational basis is
//! the same as measuring ρ in basis i. Member 0 is always the identity.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcextError, Result};
use crate::fields::{FieldSpec, FieldTables};
use crate::linalg::{
    c, identity, symmetric_projector, tensor, unitarity_defect, ComplexMatrix, ONE,
};

/// Unitarity tolerance enforced on family members (HS norm of U†U - I).
pub const UNITARITY_TOL: f64 = 1e-10;
/// Largest dimension for which explicit families are built.
pub const MAX_FAMILY_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    FullMub,
    Bitwise,
    Clifford,
    Haar,
    MubPerm,
    BitwisePerm,
    Custom,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::FullMub => "full-mub",
            FamilyKind::Bitwise => "bitwise",
            FamilyKind::Clifford => "clifford",
            FamilyKind::Haar => "haar",
            FamilyKind::MubPerm => "mub-perm",
            FamilyKind::BitwisePerm => "bitwise-perm",
            FamilyKind::Custom => "custom",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered list of unitaries on A; the seed is the member index.
#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    kind: FamilyKind,
    dim: usize,
    members: Arc<Vec<ComplexMatrix>>,
}

impl UnitaryFamily {
    pub fn new(kind: FamilyKind, dim: usize, members: Vec<ComplexMatrix>) -> Result<Self> {
        if members.is_empty() {
            return Err(QcextError::InvalidParameter("empty unitary family".into()));
        }
        for (i, u) in members.iter().enumerate() {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(QcextError::DimensionMismatch(format!(
                    "member {i} is {}x{}, expected {dim}x{dim}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let defect = unitarity_defect(u);
            if !(defect <= UNITARITY_TOL) {
                return Err(QcextError::InvalidParameter(format!(
                    "member {i} is not unitary (defect {defect:e})"
                )));
            }
        }
        Ok(UnitaryFamily {
            kind,
            dim,
            members: Arc::new(members),
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn get(&self, i: usize) -> Option<&ComplexMatrix> {
        self.members.get(i)
    }

    /// Sub-multiset of members picked by index (repetitions allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let members = indices
            .iter()
            .map(|&i| {
                self.members.get(i).cloned().ok_or_else(|| {
                    QcextError::InvalidParameter(format!(
                        "member index {i} out of range for a family of {}",
                        self.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitaryFamily {
            kind: self.kind,
            dim: self.dim,
            members: Arc::new(members),
        })
    }
}

fn check_family_dim(d: usize) -> Result<()> {
    if d > MAX_FAMILY_DIM {
        return Err(QcextError::Budget(format!(
            "dimension {d} exceeds {MAX_FAMILY_DIM}; choose a smaller dimension"
        )));
    }
    Ok(())
}

/// The three single-qubit bases: identity, Hadamard, and the circular basis.
pub fn single_qubit_mubs() -> UnitaryFamily {
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = c(0.0, 1.0);
    let v0 = identity(2);
    let v1 = ComplexMatrix::from_row_slice(2, 2, &[s, s, s, -s]);
    let v2 = ComplexMatrix::from_row_slice(2, 2, &[s, -i * s, s, i * s]);
    UnitaryFamily::new(FamilyKind::FullMub, 2, vec![v0, v1, v2]).expect("exact unitaries")
}

/// Complete set of q+1 MUBs in dimension q = p^k.
///
/// Odd p: basis b has vectors v_j(x) = ω_p^{Tr(b x² + j x)} / √q.
/// p = 2: v_j(x) = i^{Q_b(x)} (-1)^{Tr(j x)} / √q where Q_b is the Z4-valued
/// quadratic form x·M_b·x with M_b[r][s] = Tr(b e_r e_s) on the polynomial basis.
pub fn build_full_mub_set(q: usize) -> Result<UnitaryFamily> {
    if q < 2 || crate::fields::prime_power(q).is_none() {
        return Err(QcextError::NotPrimePower(q));
    }
    check_family_dim(q)?;
    let spec = Arc::new(FieldSpec::for_order(q)?);
    let tables = FieldTables::new(spec.clone());
    let p = spec.p() as usize;
    let k = spec.k() as usize;
    let norm = 1.0 / (q as f64).sqrt();

    let mut members = vec![identity(q)];
    if p == 2 {
        let basis: Vec<usize> = (0..k).map(|r| 1usize << r).collect();
        for b in 0..q {
            let m: Vec<Vec<u32>> = (0..k)
                .map(|r| {
                    (0..k)
                        .map(|s| tables.trace(tables.mul(b, tables.mul(basis[r], basis[s]))))
                        .collect()
                })
                .collect();
            let quad = |x: usize| -> u32 {
                let bits: Vec<u32> = (0..k).map(|r| ((x >> r) & 1) as u32).collect();
                let mut acc = 0u32;
                for r in 0..k {
                    for s in 0..k {
                        acc += m[r][s] * bits[r] * bits[s];
                    }
                }
                acc % 4
            };
            let u = ComplexMatrix::from_fn(q, q, |j, x| {
                let quarter_turns = quad(x) + 2 * tables.trace(tables.mul(j, x));
                conj_root(quarter_turns as usize % 4, 4) * norm
            });
            members.push(u);
        }
    } else {
        for b in 0..q {
            let u = ComplexMatrix::from_fn(q, q, |j, x| {
                let arg = tables.add(tables.mul(b, tables.mul(x, x)), tables.mul(j, x));
                conj_root(tables.trace(arg) as usize, p) * norm
            });
            members.push(u);
        }
    }
    UnitaryFamily::new(FamilyKind::FullMub, q, members)
}

/// conj(e^{2πi m / n}) with exact values on the axes.
fn conj_root(m: usize, n: usize) -> Complex64 {
    let m = m % n;
    if (4 * m).is_multiple_of(n) {
        return match 4 * m / n {
            0 => ONE,
            1 => c(0.0, -1.0),
            2 => -ONE,
            _ => c(0.0, 1.0),
        };
    }
    let theta = -2.0 * std::f64::consts::PI * m as f64 / n as f64;
    c(theta.cos(), theta.sin())
}

/// max over i ≠ j, a, a' of | |<a'|U_j U_i†|a>|² - 1/d |.
pub fn verify_mub_property(fam: &UnitaryFamily) -> f64 {
    let d = fam.dim();
    let inv = 1.0 / d as f64;
    let mut worst: f64 = 0.0;
    let members = fam.members();
    for i in 0..members.len() {
        let ui_dag = members[i].adjoint();
        for (j, uj) in members.iter().enumerate() {
            if i == j {
                continue;
            }
            let w = uj * &ui_dag;
            for z in w.iter() {
                worst = worst.max((z.norm_sqr() - inv).abs());
            }
        }
    }
    worst
}

/// HS distance between the average of (U_i†|a><a|U_i)^{⊗2} over all members and
/// basis vectors, and 2Π_sym / (d(d+1)).
pub fn verify_projective_2design(fam: &UnitaryFamily) -> f64 {
    let d = fam.dim();
    let count = fam.len() * d;
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for u in fam.members() {
        for a in 0..d {
            let v = u.row(a).adjoint();
            let p = &v * v.adjoint();
            acc += tensor(&p, &p);
        }
    }
    acc /= c(count as f64, 0.0);
    let target = symmetric_projector(d) * c(2.0 / (d * (d + 1)) as f64, 0.0);
    crate::linalg::hs_norm(&(acc - target))
}

/// All tensor products V_{u_1} ⊗ … ⊗ V_{u_n} of single-qudit MUB unitaries,
/// ordered by the base-(d+1) digits of (u_1 … u_n), u_1 most significant.
pub fn build_bitwise_family(d: usize, n: usize) -> Result<UnitaryFamily> {
    if n == 0 {
        return Err(QcextError::InvalidParameter("qudit count must be at least 1".into()));
    }
    let total = d
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_FAMILY_DIM)
        .ok_or_else(|| {
            QcextError::Budget(format!(
                "d^n = {d}^{n} exceeds {MAX_FAMILY_DIM}; reduce n"
            ))
        })?;
    let single = build_full_mub_set(d)?;
    let base = d + 1;
    let count = base.pow(n as u32);
    let members = (0..count)
        .map(|idx| {
            let digits = digits_msb(idx, base, n);
            digits
                .iter()
                .fold(identity(1), |acc, &u| tensor(&acc, &single.members()[u]))
        })
        .collect();
    UnitaryFamily::new(FamilyKind::Bitwise, total, members)
}

/// Base-`base` digits of `idx`, most significant first, padded to `n`.
pub fn digits_msb(mut idx: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_norm, ZERO};

    #[test]
    fn single_qubit_members() {
        let fam = single_qubit_mubs();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam.members()[0], identity(2));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(hs_norm(&(&fam.members()[1] - h)) < 1e-15);
        assert!(verify_mub_property(&fam) <= 1e-12);
    }

    #[test]
    fn full_set_q2_matches_single_qubit() {
        let full = build_full_mub_set(2).unwrap();
        let single = single_qubit_mubs();
        for (a, b) in full.members().iter().zip(single.members()) {
            assert!(hs_norm(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn non_prime_power_rejected() {
        assert_eq!(build_full_mub_set(6).unwrap_err(), QcextError::NotPrimePower(6));
        assert!(build_full_mub_set(1).is_err());
        assert!(matches!(build_full_mub_set(128), Err(QcextError::FieldTooLarge(_)) | Err(QcextError::Budget(_))));
    }

    #[test]
    fn q3_overlaps() {
        let fam = build_full_mub_set(3).unwrap();
        assert_eq!(fam.len(), 4);
        let m = fam.members();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let w = &m[j] * m[i].adjoint();
                for z in w.iter() {
                    assert!((z.norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn all_supported_orders() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32] {
            let fam = build_full_mub_set(q).unwrap();
            assert_eq!(fam.len(), q + 1);
            assert!(verify_mub_property(&fam) <= 1e-9, "q = {q}");
            for (i, u) in fam.members().iter().enumerate() {
                assert!(unitarity_defect(u) <= 1e-10);
                if i == 0 {
                    continue;
                }
                // first column real and positive
                for r in 0..q {
                    assert!(u[(r, 0)].im.abs() < 1e-15 && u[(r, 0)].re > 0.0);
                }
            }
        }
    }

    #[test]
    fn design_identity() {
        for q in [2, 3, 4, 5] {
            let fam = build_full_mub_set(q).unwrap();
            assert!(verify_projective_2design(&fam) <= 1e-9, "q = {q}");
        }
        let comp = UnitaryFamily::new(FamilyKind::Custom, 2, vec![identity(2)]).unwrap();
        assert!(verify_projective_2design(&comp) > 0.1);
    }

    #[test]
    fn repeated_basis_is_biased() {
        let fam = UnitaryFamily::new(FamilyKind::Custom, 3, vec![identity(3), identity(3)]).unwrap();
        assert!((verify_mub_property(&fam) - (1.0 - 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn bitwise_family() {
        let one = build_bitwise_family(2, 1).unwrap();
        assert_eq!(one.len(), 3);
        let two = build_bitwise_family(2, 2).unwrap();
        assert_eq!(two.len(), 9);
        assert_eq!(two.dim(), 4);
        let single = single_qubit_mubs();
        // index 5 = digits (1, 2)
        let expect = tensor(&single.members()[1], &single.members()[2]);
        assert!(hs_norm(&(&two.members()[5] - expect)) <= 1e-12);
        assert_eq!(build_bitwise_family(3, 2).unwrap().len(), 16);
        assert!(matches!(build_bitwise_family(2, 7), Err(QcextError::Budget(_))));
    }

    #[test]
    fn family_rejects_non_unitary() {
        let bad = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(UnitaryFamily::new(FamilyKind::Custom, 2, vec![bad]).is_err());
        assert!(UnitaryFamily::new(FamilyKind::Custom, 2, vec![]).is_err());
    }
}
