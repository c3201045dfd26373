//! Dense complex linear algebra with explicit subsystem bookkeeping.
//!
//! Composite basis indices follow the Kronecker convention: for A = A1 A2
//! the index of |a1 a2> is a1 * |A2| + a2, leftmost factor most significant.
//! Square roots, powers and trace norms of Hermitian matrices go through the
//! Hermitian eigendecomposition, with tiny negative eigenvalues clamped to 0.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QcextError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Eigenvalues in [-EIG_CLAMP, 0) are treated as exact zeros.
pub const EIG_CLAMP: f64 = 1e-10;
/// Relative threshold below which eigenvalues count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// |i><j| in dimension d.
pub fn ket_bra(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn projector(v: &nalgebra::DVector<Complex64>) -> ComplexMatrix {
    v * v.adjoint()
}

/// Kronecker product a ⊗ b.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| tensor(&acc, f))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(QcextError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Max-entry deviation from Hermiticity.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ||U†U - I||_HS.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    hs_norm(&(u.adjoint() * u - identity(u.ncols())))
}

/// Hermitian eigendecomposition: eigenvalues in descending order and the
/// matching orthonormal eigenvectors as columns.
pub fn eig_herm(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let d = require_square(m)?;
    if d == 0 {
        return Ok((vec![], ComplexMatrix::zeros(0, 0)));
    }
    if d == 1 {
        return Ok((vec![m[(0, 0)].re], identity(1)));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((values, vectors))
}

/// Eigenvalues only, descending.
pub fn eigvals_herm(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let d = require_square(m)?;
    if d == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

pub fn lambda_max(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_herm(m)?.first().copied().unwrap_or(0.0))
}

pub fn lambda_min(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_herm(m)?.last().copied().unwrap_or(0.0))
}

fn from_spectrum(values: &[f64], vectors: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let d = values.len();
    let mut scaled = vectors.clone();
    for (col, &v) in values.iter().enumerate() {
        let fv = f(v);
        for r in 0..d {
            scaled[(r, col)] *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn herm_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (values, vectors) = eig_herm(m)?;
    Ok(from_spectrum(&values, &vectors, f))
}

/// Square root of a PSD matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_fn(m, |x| x.max(0.0).sqrt())
}

/// m^power on the support of m (generalized inverse for negative powers).
/// Eigenvalues below `SUPPORT_TOL * lambda_max` are mapped to zero.
pub fn pow_psd(m: &ComplexMatrix, power: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = eig_herm(m)?;
    let cutoff = SUPPORT_TOL * values.first().copied().unwrap_or(0.0).max(0.0);
    Ok(from_spectrum(&values, &vectors, |x| {
        if x > cutoff && x > 0.0 {
            x.powf(power)
        } else {
            0.0
        }
    }))
}

/// Rank of a PSD matrix relative to its largest eigenvalue.
pub fn support_rank(m: &ComplexMatrix) -> Result<usize> {
    let values = eigvals_herm(m)?;
    let cutoff = SUPPORT_TOL * values.first().copied().unwrap_or(0.0).max(0.0);
    Ok(values.iter().filter(|&&x| x > cutoff && x > 0.0).count())
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let d = require_square(m)?;
    if d == 1 {
        return Ok(m[(0, 0)].norm());
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if hermiticity_defect(m) <= 1e-13 * scale {
        Ok(eigvals_herm(m)?.iter().map(|x| x.abs()).sum())
    } else {
        Ok(m.clone().singular_values().iter().sum())
    }
}

/// Trace norm of a Hermitian matrix, skipping the Hermiticity check.
pub fn trace_norm_herm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].re.abs();
    }
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.abs())
        .sum()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Swap operator F = Σ |a a'><a' a| on C^d ⊗ C^d.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            f[(a * d + b, b * d + a)] = ONE;
        }
    }
    f
}

/// Projector onto the symmetric subspace of C^d ⊗ C^d.
pub fn symmetric_projector(d: usize) -> ComplexMatrix {
    (identity(d * d) + swap_operator(d)) * c(0.5, 0.0)
}

/// Sum in fixed pairwise order, independent of thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2..=8 => values.iter().sum(),
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Ordered subsystem dimensions of a composite space.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(QcextError::DimensionMismatch(format!(
                "subsystem dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(SubsystemShape { dims })
    }

    pub fn single(d: usize) -> Self {
        SubsystemShape { dims: vec![d.max(1)] }
    }

    pub fn bipartite(da: usize, db: usize) -> Self {
        SubsystemShape {
            dims: vec![da.max(1), db.max(1)],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
}

/// A Hermitian PSD operator with trace in (0, 1], tagged with its subsystem
/// structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    mat: ComplexMatrix,
    shape: SubsystemShape,
}

pub const STATE_TOL: f64 = 1e-10;

impl DensityOperator {
    /// Validates Hermiticity, positivity and the trace bound.
    pub fn new(mat: ComplexMatrix, shape: SubsystemShape) -> Result<Self> {
        let d = require_square(&mat)?;
        if d != shape.total() {
            return Err(QcextError::DimensionMismatch(format!(
                "matrix dimension {d} does not match subsystem shape {:?}",
                shape.dims()
            )));
        }
        if !is_finite(&mat) {
            return Err(QcextError::InvalidState("non-finite entries".into()));
        }
        let scale = mat.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        if hermiticity_defect(&mat) > STATE_TOL * scale {
            return Err(QcextError::InvalidState("not Hermitian".into()));
        }
        let mat = hermitian_part(&mat);
        let lmin = lambda_min(&mat)?;
        if lmin < -STATE_TOL {
            return Err(QcextError::InvalidState(format!(
                "negative eigenvalue {lmin:e}"
            )));
        }
        let tr = trace(&mat).re;
        if !(tr > 0.0 && tr <= 1.0 + STATE_TOL) {
            return Err(QcextError::InvalidState(format!("trace {tr} outside (0, 1]")));
        }
        Ok(DensityOperator { mat, shape })
    }

    /// Wraps a matrix that is a state by construction.
    pub(crate) fn from_parts(mat: ComplexMatrix, shape: SubsystemShape) -> Self {
        debug_assert_eq!(mat.nrows(), shape.total());
        DensityOperator { mat, shape }
    }

    /// |v><v| for a (normalized) vector.
    pub fn pure(v: &nalgebra::DVector<Complex64>, shape: SubsystemShape) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(QcextError::InvalidState("zero vector".into()));
        }
        DensityOperator::new(projector(&(v / c(norm, 0.0))), shape)
    }

    pub fn maximally_mixed(shape: SubsystemShape) -> Self {
        let d = shape.total();
        DensityOperator::from_parts(identity(d) * c(1.0 / d as f64, 0.0), shape)
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    /// Same matrix viewed with a different (compatible) subsystem split.
    pub fn reshaped(&self, shape: SubsystemShape) -> Result<Self> {
        if shape.total() != self.dim() {
            return Err(QcextError::DimensionMismatch(format!(
                "cannot view a {}-dimensional state as {:?}",
                self.dim(),
                shape.dims()
            )));
        }
        Ok(DensityOperator {
            mat: self.mat.clone(),
            shape,
        })
    }

    /// Tensor product ρ ⊗ σ with concatenated shapes.
    pub fn tensor(&self, other: &DensityOperator) -> Self {
        let mut dims = self.shape.dims.clone();
        dims.extend_from_slice(&other.shape.dims);
        DensityOperator::from_parts(tensor(&self.mat, &other.mat), SubsystemShape { dims })
    }

    /// (U ⊗ I) ρ (U ⊗ I)† with U acting on the leading `u.nrows()` dimensions.
    pub fn conjugate_leading(&self, u: &ComplexMatrix) -> Result<Self> {
        let d = self.dim();
        if u.nrows() != u.ncols() || !d.is_multiple_of(u.nrows()) {
            return Err(QcextError::DimensionMismatch(format!(
                "a {}-dimensional unitary cannot act on the leading factor of a {d}-dimensional state",
                u.nrows()
            )));
        }
        let full = tensor(u, &identity(d / u.nrows()));
        Ok(DensityOperator::from_parts(
            hermitian_part(&(&full * &self.mat * full.adjoint())),
            self.shape.clone(),
        ))
    }
}

/// Reduced state on the subsystems listed in `keep` (in ascending order of
/// the original subsystem index).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let dims = rho.shape.dims();
    let count = dims.len();
    for &k in keep {
        if k >= count {
            return Err(QcextError::BadSubsystem { index: k, count });
        }
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..count).filter(|i| !keep_sorted.contains(i)).collect();

    let mut strides = vec![1usize; count];
    for i in (0..count.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // Offsets into the full index for every kept / traced multi-index.
    let offsets = |sel: &[usize], sel_dims: &[usize], n: usize| -> Vec<usize> {
        (0..n)
            .map(|mut idx| {
                let mut off = 0;
                for (pos, &sys) in sel.iter().enumerate().rev() {
                    let digit = idx % sel_dims[pos];
                    idx /= sel_dims[pos];
                    off += digit * strides[sys];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&keep_sorted, &kept_dims, dk);
    let traced_off = offsets(&traced, &traced_dims, dt);

    let m = rho.mat();
    let out = ComplexMatrix::from_fn(dk, dk, |r, col| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[r] + t, kept_off[col] + t)])
            .sum()
    });
    let shape = if kept_dims.is_empty() {
        SubsystemShape::single(1)
    } else {
        SubsystemShape { dims: kept_dims }
    };
    Ok(DensityOperator::from_parts(out, shape))
}

/// Splits a state on A ⊗ E into (|A|, |E|) given |A|.
pub(crate) fn split_dims(rho: &DensityOperator, dim_a: usize) -> Result<(usize, usize)> {
    let d = rho.dim();
    if dim_a == 0 || !d.is_multiple_of(dim_a) {
        return Err(QcextError::DimensionMismatch(format!(
            "|A| = {dim_a} does not divide the state dimension {d}"
        )));
    }
    Ok((dim_a, d / dim_a))
}

/// Reduced state on E of a state on A ⊗ E.
pub fn reduce_to_e(mat: &ComplexMatrix, dim_a: usize) -> ComplexMatrix {
    let de = mat.nrows() / dim_a;
    ComplexMatrix::from_fn(de, de, |r, col| {
        (0..dim_a).map(|a| mat[(a * de + r, a * de + col)]).sum()
    })
}

/// Measurement map T: measures A1 in the standard basis after discarding A2.
///
/// Input is a state on A1 A2 E (viewed as A ⊗ E with |A| = dim_a1 * dim_a2);
/// the output is the cq-state on A1 ⊗ E, block diagonal in A1.
pub fn measurement_map(
    rho: &DensityOperator,
    dim_a1: usize,
    dim_a2: usize,
) -> Result<DensityOperator> {
    let (_, de) = split_dims(rho, dim_a1 * dim_a2)?;
    let blocks = measured_blocks(rho.mat(), dim_a1, dim_a2);
    let mut out = ComplexMatrix::zeros(dim_a1 * de, dim_a1 * de);
    for (a1, block) in blocks.iter().enumerate() {
        out.view_mut((a1 * de, a1 * de), (de, de)).copy_from(block);
    }
    Ok(DensityOperator::from_parts(
        out,
        SubsystemShape::bipartite(dim_a1, de),
    ))
}

/// The E-blocks Σ_{a2} <a1 a2| ρ |a1 a2> of the measurement map, one per a1.
pub fn measured_blocks(mat: &ComplexMatrix, dim_a1: usize, dim_a2: usize) -> Vec<ComplexMatrix> {
    let de = mat.nrows() / (dim_a1 * dim_a2);
    (0..dim_a1)
        .map(|a1| {
            let mut block = ComplexMatrix::zeros(de, de);
            for a2 in 0..dim_a2 {
                let base = (a1 * dim_a2 + a2) * de;
                block += mat.view((base, base), (de, de));
            }
            block
        })
        .collect()
}

/// Standard fidelity F(ρ,σ) = ||√ρ √σ||_1 = tr √(√σ ρ √σ).
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(QcextError::DimensionMismatch(format!(
            "fidelity between {:?} and {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let s = sqrt_psd(sigma)?;
    let inner = &s * rho * &s;
    Ok(eigvals_herm(&inner)?.iter().map(|x| x.max(0.0).sqrt()).sum())
}

/// F̄(ρ,σ) = F(ρ,σ) + √((1 - tr ρ)(1 - tr σ)).
pub fn generalized_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    let tr_r = trace(rho).re;
    let tr_s = trace(sigma).re;
    Ok(f + ((1.0 - tr_r).max(0.0) * (1.0 - tr_s).max(0.0)).sqrt())
}

/// P(ρ,σ) = √(1 - F̄²).
pub fn purified_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let f = generalized_fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Dephases subsystem A1 of a state on A1 ⊗ E in the standard basis.
pub fn dephase_leading(rho: &DensityOperator, dim_a1: usize) -> Result<DensityOperator> {
    measurement_map(rho, dim_a1, 1)
}
