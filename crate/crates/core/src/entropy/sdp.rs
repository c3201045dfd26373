//! Primal-dual interior point method for
//!
//!   min tr σ   s.t.   I_A ⊗ σ - ρ ⪰ 0
//!
//! written in standard form with X ⪰ 0 on A ⊗ B, constraints tr_A X = I_B and
//! objective -tr(ρ X). Search directions are HKM with a Mehrotra
//! predictor-corrector. The iterate starts strictly feasible (X = I/|A|,
//! σ = (λ_max(ρ) + 1)·I) and stays feasible up to roundoff.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QcextError, Result};
use crate::linalg::{
    c, hermitian_part, identity, lambda_max, lambda_min, pow_psd, reduce_to_e, tensor, trace,
    ComplexMatrix, ONE,
};

pub const SDP_TOL: f64 = 1e-8;
pub const SDP_MAX_ITER: usize = 200;
/// Largest accepted duality gap for a converged solve.
pub const GAP_LIMIT: f64 = 1e-7;

const STEP_FRACTION: f64 = 0.95;

#[derive(Clone, Debug)]
pub struct HminSolution {
    /// tr σ of the certified dual-feasible σ; 2^{-Hmin} ≤ this.
    pub dual_value: f64,
    /// tr(ρ X) for a primal-feasible X; 2^{-Hmin} ≥ this.
    pub primal_value: f64,
    /// The certificate σ_B (unnormalized, I ⊗ σ - ρ ⪰ 0).
    pub sigma: ComplexMatrix,
    pub iterations: usize,
}

impl HminSolution {
    pub fn gap(&self) -> f64 {
        (self.dual_value - self.primal_value).max(0.0)
    }
}

/// Orthonormal Hermitian basis of operators on C^d, as sparse entry lists.
fn hermitian_basis(d: usize) -> Vec<Vec<(usize, usize, Complex64)>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(vec![(j, j, ONE)]);
    }
    for j in 0..d {
        for k in j + 1..d {
            out.push(vec![(j, k, c(s, 0.0)), (k, j, c(s, 0.0))]);
            out.push(vec![(j, k, c(0.0, s)), (k, j, c(0.0, -s))]);
        }
    }
    out
}

struct Problem {
    da: usize,
    db: usize,
    basis: Vec<Vec<(usize, usize, Complex64)>>,
    b: DVector<f64>,
}

impl Problem {
    /// A(Y)_i = Re tr((I ⊗ E_i) Y).
    fn apply(&self, y: &ComplexMatrix) -> DVector<f64> {
        let yb = reduce_to_e(y, self.da);
        DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|e| {
                e.iter()
                    .map(|&(j, k, coef)| (coef * yb[(k, j)]).re)
                    .sum::<f64>()
            }),
        )
    }

    /// Σ_i v_i E_i on B.
    fn combine(&self, v: &DVector<f64>) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.db, self.db);
        for (e, &vi) in self.basis.iter().zip(v.iter()) {
            for &(j, k, coef) in e {
                m[(j, k)] += coef * vi;
            }
        }
        m
    }

    fn lift(&self, m_b: &ComplexMatrix) -> ComplexMatrix {
        tensor(&identity(self.da), m_b)
    }

    /// Schur complement M_ij = Re tr(A_i X A_j W).
    fn schur(&self, x: &ComplexMatrix, w: &ComplexMatrix) -> DMatrix<f64> {
        let (da, db) = (self.da, self.db);
        // g[((q*db + r)*db + s)*db + p] = Σ_{a,a'} X[aq, a'r] W[a's, ap]
        let mut g = vec![Complex64::new(0.0, 0.0); db.pow(4)];
        for a in 0..da {
            for a2 in 0..da {
                for q in 0..db {
                    for r in 0..db {
                        let xv = x[(a * db + q, a2 * db + r)];
                        if xv == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let base = (q * db + r) * db * db;
                        for s in 0..db {
                            for p in 0..db {
                                g[base + s * db + p] += xv * w[(a2 * db + s, a * db + p)];
                            }
                        }
                    }
                }
            }
        }
        let m = self.basis.len();
        let mut out = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(p, q, ci) in &self.basis[i] {
                    for &(r, s, cj) in &self.basis[j] {
                        acc += ci * cj * g[((q * db + r) * db + s) * db + p];
                    }
                }
                out[(i, j)] = acc.re;
                out[(j, i)] = acc.re;
            }
        }
        out
    }
}

fn inverse_herm(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    m.clone().cholesky().map(|ch| hermitian_part(&ch.inverse()))
}

/// Largest α ≤ 1 keeping M + α·D ⪰ 0 (times the step fraction).
fn step_length(m: &ComplexMatrix, d: &ComplexMatrix) -> f64 {
    let Some(ch) = m.clone().cholesky() else {
        return 0.0;
    };
    let l = ch.l();
    let Some(linv) = l.try_inverse() else {
        return 0.0;
    };
    let scaled = &linv * d * linv.adjoint();
    let lmin = lambda_min(&scaled).unwrap_or(0.0);
    if lmin >= 0.0 {
        1.0
    } else {
        (STEP_FRACTION * (-1.0 / lmin)).min(1.0)
    }
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    m.clone().lu().solve(rhs)
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Solves the min-entropy SDP for ρ on A ⊗ B.
pub fn solve_hmin(rho: &ComplexMatrix, da: usize) -> Result<HminSolution> {
    let n = rho.nrows();
    let db = n / da;
    if db == 1 {
        let lmax = lambda_max(rho)?;
        return Ok(HminSolution {
            dual_value: lmax,
            primal_value: lmax,
            sigma: ComplexMatrix::from_element(1, 1, c(lmax, 0.0)),
            iterations: 0,
        });
    }
    let basis = hermitian_basis(db);
    let b = DVector::from_iterator(
        basis.len(),
        basis.iter().map(|e| {
            e.iter()
                .filter(|(j, k, _)| j == k)
                .map(|(_, _, coef)| coef.re)
                .sum::<f64>()
        }),
    );
    let prob = Problem {
        da,
        db,
        basis,
        b,
    };

    let cmat = -rho.clone();
    let mut x = identity(n) * c(1.0 / da as f64, 0.0);
    // σ = -Σ y_i E_i; start at (λ_max + 1)·I
    let start = lambda_max(rho)?.max(0.0) + 1.0;
    let mut y = DVector::from_iterator(
        prob.basis.len(),
        prob.basis
            .iter()
            .map(|e| if e.len() == 1 { -start } else { 0.0 }),
    );
    let mut z = &cmat - prob.lift(&prob.combine(&y));
    let mut iterations = 0;

    while iterations < SDP_MAX_ITER {
        let mu = inner(&x, &z) / n as f64;
        let rp = &prob.b - prob.apply(&x);
        let rd = &cmat - &z - prob.lift(&prob.combine(&y));
        let rd_norm = rd.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let primal_obj = inner(&cmat, &x);
        if n as f64 * mu <= 1e-2 * SDP_TOL * (1.0 + primal_obj.abs())
            && rp.norm() <= SDP_TOL
            && rd_norm <= SDP_TOL
        {
            break;
        }
        let Some(w) = inverse_herm(&z) else { break };
        let schur = prob.schur(&x, &w);

        let direction = |rc: &ComplexMatrix| -> Option<(ComplexMatrix, DVector<f64>, ComplexMatrix)> {
            // ΔX = (R_c - X ΔZ) W, ΔZ = R_d - Σ Δy_i A_i
            let base = (rc - &x * &rd) * &w;
            let rhs = &rp - prob.apply(&base);
            let dy = solve_spd(&schur, &rhs)?;
            let dz = &rd - prob.lift(&prob.combine(&dy));
            let dx = hermitian_part(&((rc - &x * &dz) * &w));
            Some((dx, dy, dz))
        };

        // predictor
        let rc_aff = -(&x * &z);
        let Some((dx_a, _, dz_a)) = direction(&rc_aff) else { break };
        let ap = step_length(&x, &dx_a);
        let ad = step_length(&z, &dz_a);
        let mu_aff = inner(&(&x + &dx_a * c(ap, 0.0)), &(&z + &dz_a * c(ad, 0.0))) / n as f64;
        let sigma_c = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        // corrector
        let rc = identity(n) * c(sigma_c * mu, 0.0) - &x * &z - &dx_a * &dz_a;
        let Some((dx, dy, dz)) = direction(&rc) else { break };
        let ap = step_length(&x, &dx);
        let ad = step_length(&z, &dz);
        if ap <= 1e-14 && ad <= 1e-14 {
            break;
        }
        x = hermitian_part(&(&x + dx * c(ap, 0.0)));
        y += dy * ad;
        z = hermitian_part(&(&z + dz * c(ad, 0.0)));
        iterations += 1;
    }

    let sol = certify(rho, &prob, &x, &y, iterations)?;
    if sol.gap() > GAP_LIMIT || !sol.dual_value.is_finite() {
        return Err(QcextError::SolverNonConvergence {
            iterations,
            primal: sol.primal_value,
            dual: sol.dual_value,
        });
    }
    Ok(sol)
}

/// Turns the final iterate into exactly feasible primal and dual points.
fn certify(
    rho: &ComplexMatrix,
    prob: &Problem,
    x: &ComplexMatrix,
    y: &DVector<f64>,
    iterations: usize,
) -> Result<HminSolution> {
    let mut sigma = hermitian_part(&(-prob.combine(y)));
    let slack = lambda_min(&(prob.lift(&sigma) - rho))?;
    if slack < 0.0 {
        sigma += identity(prob.db) * c(-slack, 0.0);
    }
    let dual_value = trace(&sigma).re;

    // rescale X so that tr_A X = I exactly
    let xb = reduce_to_e(x, prob.da);
    let fix = prob.lift(&pow_psd(&xb, -0.5)?);
    let xf = hermitian_part(&(&fix * x * &fix));
    let primal_value = inner(rho, &xf);

    Ok(HminSolution {
        dual_value,
        primal_value,
        sigma,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal() {
        let d = 3;
        let basis = hermitian_basis(d);
        let dense: Vec<ComplexMatrix> = basis
            .iter()
            .map(|e| {
                let mut m = ComplexMatrix::zeros(d, d);
                for &(j, k, v) in e {
                    m[(j, k)] += v;
                }
                m
            })
            .collect();
        for (i, a) in dense.iter().enumerate() {
            assert!(crate::linalg::hermiticity_defect(a) < 1e-15);
            for (j, b) in dense.iter().enumerate() {
                let ip = inner(a, b);
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn schur_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (da, db) = (2, 3);
        let x = states::random_mixed_state(da * db, 6, &mut rng);
        let w = states::random_mixed_state(da * db, 6, &mut rng);
        let basis = hermitian_basis(db);
        let prob = Problem {
            da,
            db,
            basis: basis.clone(),
            b: DVector::zeros(basis.len()),
        };
        let s = prob.schur(&x, &w);
        let lifts: Vec<ComplexMatrix> = (0..basis.len())
            .map(|i| {
                let mut v = DVector::zeros(basis.len());
                v[i] = 1.0;
                prob.lift(&prob.combine(&v))
            })
            .collect();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let dense = trace(&(&lifts[i] * &x * &lifts[j] * &w)).re;
                assert!((dense - s[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn certificate_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (da, db) in [(2, 2), (3, 2), (2, 4)] {
            let rho = states::random_mixed_state(da * db, 3, &mut rng);
            let sol = solve_hmin(&rho, da).unwrap();
            let slack = lambda_min(&(tensor(&identity(da), &sol.sigma) - &rho)).unwrap();
            assert!(slack >= -1e-12);
            assert!(sol.gap() <= GAP_LIMIT);
            assert!(sol.primal_value <= sol.dual_value + 1e-12);
        }
    }
}
