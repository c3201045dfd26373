//! Entropies at zero smoothing, in bits.
//!
//! Conditional quantities take a state on A ⊗ B and `dim_a`; B is everything
//! after the first `dim_a` dimensions of the composite index.

pub mod sdp;

use serde::Serialize;

use crate::error::{QcextError, Result};
use crate::io::MatrixJson;
use crate::linalg::{
    c, eig_herm, eigvals_herm, hermitian_part, identity, lambda_max, pow_psd, reduce_to_e,
    split_dims, tensor, trace, ComplexMatrix, DensityOperator, SUPPORT_TOL,
};

pub use sdp::{solve_hmin, HminSolution, GAP_LIMIT};

/// Largest |A||B| accepted by the SDP-based quantities.
pub const MAX_SDP_DIM: usize = 64;

fn entropy_of_spectrum(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Binary entropy h(p), with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p])
}

pub fn von_neumann(rho: &DensityOperator) -> Result<f64> {
    von_neumann_mat(rho.mat())
}

pub fn von_neumann_mat(m: &ComplexMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&eigvals_herm(m)?))
}

/// H(A|B) = H(AB) - H(B).
pub fn cond_von_neumann(rho: &DensityOperator, dim_a: usize) -> Result<f64> {
    split_dims(rho, dim_a)?;
    Ok(von_neumann_mat(rho.mat())? - von_neumann_mat(&reduce_to_e(rho.mat(), dim_a))?)
}

/// Checks supp(ρ_B) ⊆ supp(σ) using the 1e-10 relative eigenvalue threshold.
fn check_support(rho_b: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<()> {
    let (values, vectors) = eig_herm(sigma)?;
    let cutoff = SUPPORT_TOL * values.first().copied().unwrap_or(0.0).max(0.0);
    let scale = trace(rho_b).re.abs().max(f64::MIN_POSITIVE);
    for (k, &v) in values.iter().enumerate() {
        if v <= cutoff || v <= 0.0 {
            let col = vectors.column(k);
            let weight = (col.adjoint() * rho_b * col)[(0, 0)].re;
            if weight > SUPPORT_TOL * scale {
                return Err(QcextError::SupportViolation);
            }
        }
    }
    Ok(())
}

fn tilted(rho: &DensityOperator, dim_a: usize, sigma: &ComplexMatrix, power: f64) -> Result<ComplexMatrix> {
    let (_, db) = split_dims(rho, dim_a)?;
    if sigma.nrows() != db || sigma.ncols() != db {
        return Err(QcextError::DimensionMismatch(format!(
            "sigma is {}x{}, expected {db}x{db}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    check_support(&reduce_to_e(rho.mat(), dim_a), sigma)?;
    let s = tensor(&identity(dim_a), &pow_psd(sigma, power)?);
    Ok(hermitian_part(&(&s * rho.mat() * &s)))
}

/// Hmin(A|B)_{ρ|σ} = -log2 λ_max((I ⊗ σ^{-1/2}) ρ (I ⊗ σ^{-1/2})).
pub fn hmin_given_sigma(rho: &DensityOperator, dim_a: usize, sigma: &ComplexMatrix) -> Result<f64> {
    Ok(0.0 - lambda_max(&tilted(rho, dim_a, sigma, -0.5)?)?.log2())
}

/// H2(A|B)_{ρ|σ} = -log2 tr[((I ⊗ σ^{-1/4}) ρ (I ⊗ σ^{-1/4}))²].
pub fn h2_cond(rho: &DensityOperator, dim_a: usize, sigma: &ComplexMatrix) -> Result<f64> {
    let t = tilted(rho, dim_a, sigma, -0.25)?;
    let weight: f64 = t.iter().map(|z| z.norm_sqr()).sum();
    Ok(0.0 - weight.log2())
}

/// Result of the optimized min-entropy.
#[derive(Clone, Debug)]
pub struct Hmin {
    /// -log2 tr σ for the certified σ.
    pub value: f64,
    /// Certificate σ_B with I ⊗ σ ⪰ ρ and tr σ = 2^{-value}.
    pub sigma: ComplexMatrix,
    pub gap: f64,
    pub iterations: usize,
}

impl Hmin {
    /// σ_B / tr σ_B.
    pub fn sigma_normalized(&self) -> ComplexMatrix {
        let tr = trace(&self.sigma).re;
        &self.sigma / c(tr, 0.0)
    }
}

fn check_sdp_dim(d: usize) -> Result<()> {
    if d > MAX_SDP_DIM {
        return Err(QcextError::Budget(format!(
            "min-entropy SDP supports |A||B| <= {MAX_SDP_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Hmin(A|B)_ρ = -log2 min{tr σ : I ⊗ σ ⪰ ρ}.
pub fn hmin(rho: &DensityOperator, dim_a: usize) -> Result<Hmin> {
    split_dims(rho, dim_a)?;
    check_sdp_dim(rho.dim())?;
    hmin_mat(rho.mat(), dim_a)
}

pub(crate) fn hmin_mat(rho: &ComplexMatrix, dim_a: usize) -> Result<Hmin> {
    let sol = solve_hmin(rho, dim_a)?;
    Ok(Hmin {
        value: 0.0 - sol.dual_value.log2(),
        gap: sol.gap(),
        iterations: sol.iterations,
        sigma: sol.sigma,
    })
}

/// Purification of ρ_AB on A ⊗ B ⊗ C, returned as the marginal on A ⊗ C.
pub fn complementary_marginal(rho: &DensityOperator, dim_a: usize) -> Result<(ComplexMatrix, usize)> {
    let (_, db) = split_dims(rho, dim_a)?;
    let (values, vectors) = eig_herm(rho.mat())?;
    let cutoff = SUPPORT_TOL * values.first().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = (0..values.len())
        .filter(|&k| values[k] > cutoff && values[k] > 0.0)
        .collect();
    let dc = kept.len().max(1);
    let mut out = ComplexMatrix::zeros(dim_a * dc, dim_a * dc);
    for (ci, &k) in kept.iter().enumerate() {
        for (cj, &l) in kept.iter().enumerate() {
            let amp = (values[k] * values[l]).sqrt();
            for a in 0..dim_a {
                for a2 in 0..dim_a {
                    let mut acc = c(0.0, 0.0);
                    for b in 0..db {
                        acc += vectors[(a * db + b, k)] * vectors[(a2 * db + b, l)].conj();
                    }
                    out[(a * dc + ci, a2 * dc + cj)] = acc * amp;
                }
            }
        }
    }
    Ok((hermitian_part(&out), dc))
}

/// Hmax(A|B)_ρ = -Hmin(A|C)_ρ for a purification ρ_ABC.
pub fn hmax(rho: &DensityOperator, dim_a: usize) -> Result<f64> {
    split_dims(rho, dim_a)?;
    let (rho_ac, _) = complementary_marginal(rho, dim_a)?;
    check_sdp_dim(rho_ac.nrows())?;
    Ok(-hmin_mat(&rho_ac, dim_a)?.value)
}

/// All zero-smoothing entropies of a bipartite state.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub h_vn: f64,
    pub hmin: f64,
    pub hmin_sigma: MatrixJson,
    pub h2_rho_rho: f64,
    pub hmax: f64,
    pub solver_gap: f64,
}

impl EntropyReport {
    pub fn compute(rho: &DensityOperator, dim_a: usize) -> Result<Self> {
        let (_, dim_b) = split_dims(rho, dim_a)?;
        let hm = hmin(rho, dim_a)?;
        let rho_b = reduce_to_e(rho.mat(), dim_a);
        Ok(EntropyReport {
            dim_a,
            dim_b,
            h_vn: cond_von_neumann(rho, dim_a)?,
            hmin: hm.value,
            hmin_sigma: MatrixJson::from(&hm.sigma_normalized()),
            h2_rho_rho: h2_cond(rho, dim_a, &rho_b)?,
            hmax: hmax(rho, dim_a)?,
            solver_gap: hm.gap,
        })
    }
}
