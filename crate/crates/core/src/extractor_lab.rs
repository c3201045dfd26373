//! Exact QC-extractor distances, the matching upper bounds, and the
//! output-size and seed-size witnesses.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::designs::sample_haar_family;
use crate::entropy::{h2_cond, hmin};
use crate::error::{QcextError, Result};
use crate::fields::FieldSpec;
use crate::linalg::{
    c, hermitian_part, identity, measured_blocks, pairwise_sum, reduce_to_e, split_dims, tensor,
    trace_norm_herm, ComplexMatrix, DensityOperator, SubsystemShape,
};
use crate::mubs::{build_bitwise_family, build_full_mub_set, FamilyKind, UnitaryFamily};
use crate::perms::{build_affine_family, permutation_unitary};
use crate::states;

/// Largest family evaluated exhaustively; bigger ones must be subsampled.
pub const MAX_EXACT_MEMBERS: usize = 10_000;
/// Largest d^n for the bitwise permuted family.
pub const MAX_BITWISE_PERM_DIM: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct EntropyInputs {
    pub hmin: f64,
    pub solver_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2_rho_e: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractorEvalReport {
    pub family_label: String,
    pub dim_a: usize,
    pub dim_a1: usize,
    pub dim_a2: usize,
    pub dim_e: usize,
    pub seed_count: usize,
    pub lhs_avg_distance: f64,
    pub per_member_distances: Vec<f64>,
    /// False when the average is a statistical estimate over a subsample.
    pub certified: bool,
    pub bound_name: Option<String>,
    pub rhs_bound: Option<f64>,
    pub entropy_inputs: Option<EntropyInputs>,
    pub margin: Option<f64>,
}

impl ExtractorEvalReport {
    pub fn with_bound(mut self, name: &str, rhs: f64, inputs: EntropyInputs) -> Self {
        self.bound_name = Some(name.to_string());
        self.rhs_bound = Some(rhs);
        self.margin = Some(rhs - self.lhs_avg_distance);
        self.entropy_inputs = Some(inputs);
        self
    }
}

/// ||T(U ρ U†) - I/|A1| ⊗ ρ_E||_1 for one unitary.
pub fn member_distance(u: &ComplexMatrix, rho: &ComplexMatrix, dim_a1: usize, rho_e: &ComplexMatrix) -> f64 {
    let d = u.nrows();
    let de = rho.nrows() / d;
    let full = tensor(u, &identity(de));
    let rotated = &full * rho * full.adjoint();
    let target = rho_e / c(dim_a1 as f64, 0.0);
    measured_blocks(&rotated, dim_a1, d / dim_a1)
        .iter()
        .map(|b| trace_norm_herm(&(b - &target)))
        .sum()
}

fn check_split(fam: &UnitaryFamily, rho: &DensityOperator, dim_a1: usize) -> Result<usize> {
    let d = fam.dim();
    split_dims(rho, d)?;
    if dim_a1 == 0 || !d.is_multiple_of(dim_a1) {
        return Err(QcextError::DimensionMismatch(format!(
            "|A1| = {dim_a1} does not divide |A| = {d}"
        )));
    }
    Ok(d / dim_a1)
}

/// Average over the family of the decoupling distance after measuring A1.
pub fn eval_qc_distance(
    fam: &UnitaryFamily,
    rho_ae: &DensityOperator,
    dim_a1: usize,
) -> Result<ExtractorEvalReport> {
    let dim_a2 = check_split(fam, rho_ae, dim_a1)?;
    if fam.len() > MAX_EXACT_MEMBERS {
        return Err(QcextError::Budget(format!(
            "family has {} members (limit {MAX_EXACT_MEMBERS}); use subsampling",
            fam.len()
        )));
    }
    let rho = rho_ae.mat();
    let rho_e = reduce_to_e(rho, fam.dim());
    let per: Vec<f64> = fam
        .members()
        .par_iter()
        .map(|u| member_distance(u, rho, dim_a1, &rho_e))
        .collect();
    Ok(report(fam, rho_ae, dim_a1, dim_a2, per, true))
}

/// Estimate from `samples` members drawn uniformly with replacement.
pub fn eval_qc_distance_sampled<R: Rng + ?Sized>(
    fam: &UnitaryFamily,
    rho_ae: &DensityOperator,
    dim_a1: usize,
    samples: usize,
    rng: &mut R,
) -> Result<ExtractorEvalReport> {
    let indices: Vec<usize> = (0..samples).map(|_| rng.random_range(0..fam.len())).collect();
    let sub = fam.select(&indices)?;
    let mut rep = eval_qc_distance(&sub, rho_ae, dim_a1)?;
    rep.seed_count = fam.len();
    rep.certified = false;
    Ok(rep)
}

fn report(
    fam: &UnitaryFamily,
    rho: &DensityOperator,
    dim_a1: usize,
    dim_a2: usize,
    per: Vec<f64>,
    certified: bool,
) -> ExtractorEvalReport {
    let avg = pairwise_sum(&per) / per.len() as f64;
    ExtractorEvalReport {
        family_label: fam.kind().to_string(),
        dim_a: fam.dim(),
        dim_a1,
        dim_a2,
        dim_e: rho.dim() / fam.dim(),
        seed_count: per.len(),
        lhs_avg_distance: avg,
        per_member_distances: per,
        certified,
        bound_name: None,
        rhs_bound: None,
        entropy_inputs: None,
        margin: None,
    }
}

/// {P·U : P affine permutation, U basis change}, P-major and U-minor.
fn permute_family(
    base: &UnitaryFamily,
    q: usize,
    kind: FamilyKind,
) -> Result<UnitaryFamily> {
    let perms = build_affine_family(q)?;
    let mut members = Vec::with_capacity(perms.len() * base.len());
    for p in &perms {
        let pm = permutation_unitary(p);
        for u in base.members() {
            members.push(&pm * u);
        }
    }
    UnitaryFamily::new(kind, q, members)
}

/// Full MUB set composed with the affine permutations of GF(q):
/// L = (q+1)·q·(q-1).
pub fn compose_mub_perm_family(q: usize, dim_a1: usize) -> Result<UnitaryFamily> {
    if dim_a1 == 0 || !q.is_multiple_of(dim_a1) {
        return Err(QcextError::DimensionMismatch(format!(
            "|A1| = {dim_a1} does not divide |A| = {q}"
        )));
    }
    permute_family(&build_full_mub_set(q)?, q, FamilyKind::MubPerm)
}

/// Bitwise MUB family composed with affine permutations of GF(d^n):
/// L = (d+1)^n · d^n · (d^n - 1).
pub fn compose_bitwise_perm_family(d: usize, n: usize) -> Result<UnitaryFamily> {
    let dim = bitwise_dim(d, n)?;
    if dim > MAX_BITWISE_PERM_DIM {
        return Err(QcextError::Budget(format!(
            "d^n = {dim} exceeds {MAX_BITWISE_PERM_DIM} for the full permuted family; use subsampling"
        )));
    }
    let count = (d + 1).pow(n as u32) * dim * (dim - 1);
    if count > MAX_EXACT_MEMBERS {
        return Err(QcextError::Budget(format!(
            "family would have {count} members (limit {MAX_EXACT_MEMBERS}); use subsampling"
        )));
    }
    permute_family(&build_bitwise_family(d, n)?, dim, FamilyKind::BitwisePerm)
}

/// `samples` uniformly drawn members of the bitwise permuted family, built
/// without materializing the whole family (d^n ≤ 64).
pub fn sample_bitwise_perm_family<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<UnitaryFamily> {
    let dim = bitwise_dim(d, n)?;
    let base = build_bitwise_family(d, n)?;
    let spec = Arc::new(FieldSpec::for_order(dim)?);
    let tables = crate::fields::FieldTables::new(spec);
    let members = (0..samples)
        .map(|_| {
            let a = rng.random_range(1..dim);
            let b = rng.random_range(0..dim);
            let v = rng.random_range(0..base.len());
            let images: Vec<usize> = (0..dim).map(|x| tables.add(tables.mul(a, x), b)).collect();
            crate::perms::permutation_matrix(&images) * &base.members()[v]
        })
        .collect();
    UnitaryFamily::new(FamilyKind::BitwisePerm, dim, members)
}

fn bitwise_dim(d: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(QcextError::InvalidParameter("qudit count must be at least 1".into()));
    }
    d.checked_pow(n as u32)
        .filter(|&t| t <= crate::mubs::MAX_FAMILY_DIM)
        .ok_or_else(|| QcextError::Budget(format!("d^n = {d}^{n} is too large")))
}

/// √(|A1|/(q+1) · 2^{-Hmin}) + 2δ.
pub fn bound_full_mub(q: usize, dim_a1: usize, hmin_delta: f64, delta: f64) -> f64 {
    (dim_a1 as f64 / (q as f64 + 1.0) * (-hmin_delta).exp2()).sqrt() + 2.0 * delta
}

/// √(|A1|/(q+1) · 2^{-H2(A|E)_{ρ|σ}}), the collision-entropy form.
pub fn bound_full_mub_h2(q: usize, dim_a1: usize, h2: f64) -> f64 {
    (dim_a1 as f64 / (q as f64 + 1.0) * (-h2).exp2()).sqrt()
}

/// √(|A1|/|A| · 2^{-Hmin}) + 2δ.
pub fn bound_2design(dim_a: usize, dim_a1: usize, hmin_delta: f64, delta: f64) -> f64 {
    (dim_a1 as f64 / dim_a as f64 * (-hmin_delta).exp2()).sqrt() + 2.0 * delta
}

/// z = log2(2/δ'² + 1/(1-δ)).
pub fn bitwise_z(delta: f64, delta_prime: f64) -> f64 {
    (2.0 / (delta_prime * delta_prime) + 1.0 / (1.0 - delta)).log2()
}

/// √(2^{(1 - log(d+1) + ξ log d) n} (1 + 2^{-Hmin + z})) + 2(δ + δ'),
/// with |A1| = d^{ξn}.
pub fn bound_bitwise(
    d: usize,
    n: usize,
    dim_a1: usize,
    hmin_delta: f64,
    delta: f64,
    delta_prime: f64,
) -> Result<f64> {
    if !(delta_prime > 0.0) {
        return Err(QcextError::InvalidParameter("delta' must be positive".into()));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(QcextError::InvalidParameter("delta must lie in [0, 1)".into()));
    }
    let mut m = 0u32;
    let mut pow = 1usize;
    while pow < dim_a1 {
        pow *= d;
        m += 1;
    }
    if pow != dim_a1 || m as usize > n {
        return Err(QcextError::DimensionMismatch(format!(
            "|A1| = {dim_a1} is not a power d^m of d = {d} with m <= n = {n}"
        )));
    }
    let nf = n as f64;
    let xi_logd = (dim_a1 as f64).log2() / nf;
    let exponent = (1.0 - (d as f64 + 1.0).log2() + xi_logd) * nf;
    let z = bitwise_z(delta, delta_prime);
    Ok((exponent.exp2() * (1.0 + (z - hmin_delta).exp2())).sqrt() + 2.0 * (delta + delta_prime))
}

/// log2|A| + Hmin(A|E): largest |A1| compatible with a small distance.
pub fn max_output_size(rho_ae: &DensityOperator, dim_a: usize) -> Result<f64> {
    Ok((dim_a as f64).log2() + hmin(rho_ae, dim_a)?.value)
}

/// ρ_A = (2/|A|) Σ_{a1 ∈ S, a2} U†|a1 a2><a1 a2|U with S the first |A1|/2
/// outcomes and U the chosen member.
pub fn seed_witness_state(fam: &UnitaryFamily, dim_a1: usize, member: usize) -> Result<DensityOperator> {
    let d = fam.dim();
    if dim_a1 == 0 || !d.is_multiple_of(dim_a1) {
        return Err(QcextError::DimensionMismatch(format!(
            "|A1| = {dim_a1} does not divide |A| = {d}"
        )));
    }
    if !dim_a1.is_multiple_of(2) {
        return Err(QcextError::InvalidParameter(format!(
            "|A1| = {dim_a1} must be even for the seed witness"
        )));
    }
    let u = fam.get(member).ok_or_else(|| {
        QcextError::InvalidParameter(format!("member {member} out of range"))
    })?;
    let dim_a2 = d / dim_a1;
    let mut proj = ComplexMatrix::zeros(d, d);
    for a1 in 0..dim_a1 / 2 {
        for a2 in 0..dim_a2 {
            let i = a1 * dim_a2 + a2;
            proj[(i, i)] = c(2.0 / d as f64, 0.0);
        }
    }
    let rho = hermitian_part(&(u.adjoint() * proj * u));
    Ok(DensityOperator::from_parts(rho, SubsystemShape::bipartite(d, 1)))
}

/// Distance reached by the witness state under the first member; equals 1.
pub fn seed_lower_bound_witness(fam: &UnitaryFamily, dim_a1: usize) -> Result<f64> {
    let rho = seed_witness_state(fam, dim_a1, 0)?;
    let one = identity(1);
    Ok(member_distance(&fam.members()[0], rho.mat(), dim_a1, &one))
}

/// Distances of the witness state under every member (diagnostics).
pub fn seed_witness_profile(fam: &UnitaryFamily, dim_a1: usize) -> Result<Vec<f64>> {
    let rho = seed_witness_state(fam, dim_a1, 0)?;
    let one = identity(1);
    Ok(fam
        .members()
        .iter()
        .map(|u| member_distance(u, rho.mat(), dim_a1, &one))
        .collect())
}

/// One sampled Haar family evaluated on random states.
#[derive(Clone, Debug, Serialize)]
pub struct HaarSweep {
    pub dim_a: usize,
    pub dim_a1: usize,
    pub dim_e: usize,
    pub seed_count: usize,
    pub reports: Vec<ExtractorEvalReport>,
    /// min over trials of (2-design reference curve - LHS); diagnostic only.
    pub worst_margin: f64,
}

/// Samples L Haar unitaries on A and evaluates them on `trials` random states
/// on A ⊗ E, recording Hmin and the 2-design curve for reference.
pub fn eval_haar_empirical<R: Rng + ?Sized>(
    dim_a: usize,
    dim_a1: usize,
    dim_e: usize,
    seed_count: usize,
    trials: usize,
    rng: &mut R,
) -> Result<HaarSweep> {
    let fam = sample_haar_family(dim_a, seed_count, rng)?;
    let inputs = states::test_state_suite(dim_a, dim_e, trials, rng);
    let mut reports = Vec::with_capacity(trials);
    let mut worst = f64::INFINITY;
    for rho in &inputs {
        let h = hmin(rho, dim_a)?;
        let rep = eval_qc_distance(&fam, rho, dim_a1)?.with_bound(
            "two-design-reference",
            bound_2design(dim_a, dim_a1, h.value, 0.0),
            EntropyInputs {
                hmin: h.value,
                solver_gap: h.gap,
                h2_rho_e: None,
            },
        );
        worst = worst.min(rep.margin.unwrap_or(f64::INFINITY));
        reports.push(rep);
    }
    Ok(HaarSweep {
        dim_a,
        dim_a1,
        dim_e,
        seed_count,
        reports,
        worst_margin: worst,
    })
}

/// Evaluates a full-MUB family on ρ and attaches the Hmin bound and the
/// collision-entropy bound with σ_E = ρ_E.
pub fn eval_full_mub_with_bound(
    fam: &UnitaryFamily,
    rho_ae: &DensityOperator,
    dim_a1: usize,
) -> Result<ExtractorEvalReport> {
    let q = fam.dim();
    let rep = eval_qc_distance(fam, rho_ae, dim_a1)?;
    let h = hmin(rho_ae, q)?;
    let rho_e = reduce_to_e(rho_ae.mat(), q);
    let h2 = h2_cond(rho_ae, q, &rho_e)?;
    Ok(rep.with_bound(
        "full-mub",
        bound_full_mub(q, dim_a1, h.value, 0.0),
        EntropyInputs {
            hmin: h.value,
            solver_gap: h.gap,
            h2_rho_e: Some(h2),
        },
    ))
}
