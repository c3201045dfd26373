//! Entropic uncertainty relations obtained from extractor distances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{binary_entropy, cond_von_neumann, von_neumann_mat};
use crate::error::{QcextError, Result};
use crate::extractor_lab::eval_qc_distance;
use crate::linalg::{
    c, fidelity, identity, measured_blocks, pairwise_sum, reduce_to_e, split_dims, tensor,
    ComplexMatrix, DensityOperator, SubsystemShape,
};
use crate::mubs::{build_bitwise_family, UnitaryFamily};

/// Largest K1·E·J dimension materialized as a dense matrix.
pub const MAX_DENSE_KEJ: usize = 512;

/// ρ_{K1EJ} = (1/L) Σ_j T(U_j ρ U_j†) ⊗ |j><j|, kept in block form:
/// `blocks[j][k]` is the (unnormalized) E-block for seed j and outcome k.
#[derive(Clone, Debug)]
pub struct KejState {
    pub dim_k1: usize,
    pub dim_e: usize,
    pub blocks: Vec<Vec<ComplexMatrix>>,
}

impl KejState {
    pub fn seed_count(&self) -> usize {
        self.blocks.len()
    }

    /// Dense matrix on K1 ⊗ E ⊗ J.
    pub fn to_density(&self) -> Result<DensityOperator> {
        let l = self.seed_count();
        let (dk, de) = (self.dim_k1, self.dim_e);
        let n = dk * de * l;
        if n > MAX_DENSE_KEJ {
            return Err(QcextError::Budget(format!(
                "K1 E J dimension {n} exceeds {MAX_DENSE_KEJ}"
            )));
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, row) in self.blocks.iter().enumerate() {
            for (k, b) in row.iter().enumerate() {
                for e in 0..de {
                    for f in 0..de {
                        m[((k * de + e) * l + j, (k * de + f) * l + j)] = b[(e, f)];
                    }
                }
            }
        }
        DensityOperator::new(m, SubsystemShape::new(vec![dk, de, l])?)
    }

    /// ρ_E^j = Σ_k blocks[j][k].
    fn e_marginal(&self, j: usize) -> ComplexMatrix {
        self.blocks[j]
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_e, self.dim_e), |acc, b| acc + b)
    }

    /// ι = I/|K1| ⊗ ρ_EJ in the same block form.
    pub fn ideal(&self) -> KejState {
        let blocks = (0..self.seed_count())
            .map(|j| {
                let e = self.e_marginal(j) / c(self.dim_k1 as f64, 0.0);
                vec![e; self.dim_k1]
            })
            .collect();
        KejState {
            dim_k1: self.dim_k1,
            dim_e: self.dim_e,
            blocks,
        }
    }

    /// H(K1|EJ) = (1/L) Σ_j H(K1|E)_{ρ^j}.
    pub fn cond_entropy(&self) -> Result<f64> {
        let l = self.seed_count() as f64;
        let per: Vec<f64> = (0..self.seed_count())
            .map(|j| {
                let joint: f64 = self.blocks[j]
                    .iter()
                    .map(|b| von_neumann_mat(&(b * c(l, 0.0))))
                    .sum::<Result<f64>>()?;
                let marg = von_neumann_mat(&(self.e_marginal(j) * c(l, 0.0)))?;
                Ok(joint - marg)
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&per) / l)
    }
}

pub fn build_kej_state(fam: &UnitaryFamily, rho_ae: &DensityOperator, dim_a1: usize) -> Result<KejState> {
    let d = fam.dim();
    let (_, de) = split_dims(rho_ae, d)?;
    if dim_a1 == 0 || !d.is_multiple_of(dim_a1) {
        return Err(QcextError::DimensionMismatch(format!(
            "|A1| = {dim_a1} does not divide |A| = {d}"
        )));
    }
    let scale = c(1.0 / fam.len() as f64, 0.0);
    let rho = rho_ae.mat();
    let blocks = fam
        .members()
        .par_iter()
        .map(|u| {
            let full = tensor(u, &identity(de));
            let rotated = &full * rho * full.adjoint();
            measured_blocks(&rotated, dim_a1, d / dim_a1)
                .into_iter()
                .map(|b| b * scale)
                .collect()
        })
        .collect();
    Ok(KejState {
        dim_k1: dim_a1,
        dim_e: de,
        blocks,
    })
}

/// Purified distance between two block-diagonal states with matching blocks.
fn block_purified_distance(a: &KejState, b: &KejState) -> Result<f64> {
    let mut terms = Vec::new();
    for (ra, rb) in a.blocks.iter().zip(&b.blocks) {
        for (x, y) in ra.iter().zip(rb) {
            terms.push(fidelity(x, y)?);
        }
    }
    let f = pairwise_sum(&terms);
    Ok((1.0 - f * f).max(0.0).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct MetaCheck {
    /// ε(ρ): average trace-norm distance of the family on ρ.
    pub eps_rho: f64,
    /// P(ρ_{K1EJ}, I/|K1| ⊗ ρ_EJ).
    pub purified_dist: f64,
    /// √(2 ε(ρ)).
    pub threshold: f64,
    pub holds: bool,
}

pub fn meta_minentropy_check(fam: &UnitaryFamily, rho_ae: &DensityOperator, dim_a1: usize) -> Result<MetaCheck> {
    let eps_rho = eval_qc_distance(fam, rho_ae, dim_a1)?.lhs_avg_distance;
    let kej = build_kej_state(fam, rho_ae, dim_a1)?;
    let purified_dist = block_purified_distance(&kej, &kej.ideal())?;
    let threshold = (2.0 * eps_rho).sqrt();
    Ok(MetaCheck {
        eps_rho,
        purified_dist,
        threshold,
        holds: purified_dist <= threshold + 1e-7,
    })
}

/// (1 - 4ε) log|K1| - 2h(ε) for ε ∈ [0, 1].
pub fn vn_lower_from_distance(eps_rho: f64, log_k1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps_rho) {
        return Err(QcextError::InvalidParameter(format!(
            "distance {eps_rho} outside [0, 1]"
        )));
    }
    Ok((1.0 - 4.0 * eps_rho) * log_k1 - 2.0 * binary_entropy(eps_rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UrScheme {
    TwoDesign,
    FullMub,
    Bitwise,
}

impl std::str::FromStr for UrScheme {
    type Err = QcextError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-design" | "2design" => Ok(UrScheme::TwoDesign),
            "full-mub" => Ok(UrScheme::FullMub),
            "bitwise" => Ok(UrScheme::Bitwise),
            other => Err(QcextError::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Inputs of a min-entropy uncertainty row. `dim_a` is used by the
/// two-design and full-MUB rows, `d`, `n` and `delta_prime` by the bitwise row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UrParams {
    pub dim_a: usize,
    pub d: usize,
    pub n: usize,
    pub hmin: f64,
    pub eps: f64,
    pub delta: f64,
    pub delta_prime: f64,
}

impl Default for UrParams {
    fn default() -> Self {
        UrParams {
            dim_a: 2,
            d: 2,
            n: 1,
            hmin: 0.0,
            eps: 1.0,
            delta: 0.0,
            delta_prime: 0.0,
        }
    }
}

/// Lower bound (bits) on the smooth min-entropy of the outcome given E and
/// the choice of measurement.
pub fn ur_table_bound(scheme: UrScheme, p: &UrParams) -> Result<f64> {
    let half_eps2 = p.eps * p.eps / 2.0;
    let slack = match scheme {
        UrScheme::TwoDesign | UrScheme::FullMub => half_eps2 - 2.0 * p.delta,
        UrScheme::Bitwise => half_eps2 - 2.0 * p.delta - p.delta_prime,
    };
    if !(slack > 0.0) {
        return Err(QcextError::VacuousBound(format!(
            "eps^2/2 = {half_eps2} does not exceed the smoothing terms"
        )));
    }
    let correction = (1.0 / (slack * slack)).log2();
    match scheme {
        UrScheme::TwoDesign => Ok((p.dim_a as f64).log2() + p.hmin - correction),
        UrScheme::FullMub => Ok((p.dim_a as f64 + 1.0).log2() + p.hmin - correction),
        UrScheme::Bitwise => {
            if !(p.delta_prime > 0.0) || !(p.delta < 0.5) {
                return Err(QcextError::VacuousBound(
                    "bitwise row needs delta' > 0 and delta < 1/2".into(),
                ));
            }
            let kappa = (2.0 / (p.delta_prime * p.delta_prime) + 1.0 / (1.0 - 2.0 * p.delta)).log2();
            let n = p.n as f64;
            Ok(n * ((p.d as f64 + 1.0).log2() - 1.0) + (p.hmin - kappa).min(0.0) - correction - 1.0)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VnUrCheck {
    /// (1/(d+1)^n) Σ_j H(K|E) over all bitwise measurements.
    pub lhs_avg: f64,
    /// n(log(d+1) - 1) + min{0, H(A|E)}.
    pub rhs_bound: f64,
}

/// Average H(K|E) over the (d+1)^n bitwise MUB measurements of the whole of A.
pub fn vn_ur_check(d: usize, n: usize, rho_ae: &DensityOperator) -> Result<VnUrCheck> {
    let fam = build_bitwise_family(d, n)?;
    let dim_a = fam.dim();
    let (_, de) = split_dims(rho_ae, dim_a)?;
    if dim_a * de > 64 {
        return Err(QcextError::Budget(format!(
            "d^n |E| = {} exceeds 64",
            dim_a * de
        )));
    }
    let rho = rho_ae.mat();
    let h_e = von_neumann_mat(&reduce_to_e(rho, dim_a))?;
    let per: Vec<f64> = fam
        .members()
        .par_iter()
        .map(|u| {
            let full = tensor(u, &identity(de));
            let rotated = &full * rho * full.adjoint();
            let joint = measured_blocks(&rotated, dim_a, 1)
                .iter()
                .map(von_neumann_mat)
                .sum::<Result<f64>>()?;
            Ok(joint - h_e)
        })
        .collect::<Result<_>>()?;
    let lhs_avg = pairwise_sum(&per) / per.len() as f64;
    let rhs_bound = n as f64 * ((d as f64 + 1.0).log2() - 1.0) + cond_von_neumann(rho_ae, dim_a)?.min(0.0);
    Ok(VnUrCheck { lhs_avg, rhs_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor_lab::compose_mub_perm_family;
    use crate::linalg::{hs_norm, ket_bra};
    use crate::mubs::single_qubit_mubs;
    use crate::states;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure0() -> DensityOperator {
        DensityOperator::new(ket_bra(2, 0, 0), SubsystemShape::bipartite(2, 1)).unwrap()
    }

    #[test]
    fn kej_of_maximally_mixed() {
        let fam = single_qubit_mubs();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let re = states::random_mixed_state(2, 2, &mut rng);
        let rho = DensityOperator::new(
            tensor(&(identity(2) * c(0.5, 0.0)), &re),
            SubsystemShape::bipartite(2, 2),
        )
        .unwrap();
        let kej = build_kej_state(&fam, &rho, 2).unwrap();
        let dense = kej.to_density().unwrap();
        let expect = tensor(&tensor(&(identity(2) * c(0.5, 0.0)), &re), &(identity(3) * c(1.0 / 3.0, 0.0)));
        assert!(hs_norm(&(dense.mat() - expect)) < 1e-12);
        let meta = meta_minentropy_check(&fam, &rho, 2).unwrap();
        assert!(meta.purified_dist < 1e-6);
    }

    #[test]
    fn kej_of_pure_qubit() {
        let kej = build_kej_state(&single_qubit_mubs(), &pure0(), 2).unwrap();
        let dense = kej.to_density().unwrap();
        assert_eq!(dense.dim(), 6);
        // computational basis: outcome 0 with weight 1/3
        assert!((dense.mat()[(0, 0)].re - 1.0 / 3.0).abs() < 1e-12);
        assert!(dense.mat()[(3, 3)].re.abs() < 1e-12);
        for j in 1..3 {
            assert!((dense.mat()[(j, j)].re - 1.0 / 6.0).abs() < 1e-12);
        }
        // J marginal uniform
        let j = crate::linalg::partial_trace(&dense, &[2]).unwrap();
        assert!(hs_norm(&(j.mat() - identity(3) * c(1.0 / 3.0, 0.0))) < 1e-12);
    }

    #[test]
    fn meta_check_examples() {
        let fam = compose_mub_perm_family(2, 2).unwrap();
        let m = meta_minentropy_check(&fam, &pure0(), 2).unwrap();
        assert!((m.eps_rho - 1.0 / 3.0).abs() < 1e-12);
        assert!(m.holds);
        let bell = states::maximally_entangled(2, 2);
        assert!(meta_minentropy_check(&fam, &bell, 2).unwrap().holds);
    }

    #[test]
    fn vn_lower_examples() {
        assert_eq!(vn_lower_from_distance(0.0, 3.0).unwrap(), 3.0);
        assert!((vn_lower_from_distance(0.5, 2.0).unwrap() - (-2.0 - 2.0)).abs() < 1e-15);
        assert!(vn_lower_from_distance(1.5, 1.0).is_err());
    }

    #[test]
    fn ur_rows() {
        let p = UrParams {
            dim_a: 2,
            hmin: 0.0,
            eps: 1.0,
            ..UrParams::default()
        };
        let v = ur_table_bound(UrScheme::FullMub, &p).unwrap();
        assert!((v - (3f64.log2() - 2.0)).abs() < 1e-12);
        let p2 = UrParams {
            dim_a: 4,
            hmin: 0.7,
            eps: 2f64.sqrt(),
            ..UrParams::default()
        };
        assert!((ur_table_bound(UrScheme::TwoDesign, &p2).unwrap() - 2.7).abs() < 1e-12);
        let bad = UrParams {
            eps: 0.1,
            delta: 0.01,
            ..UrParams::default()
        };
        assert!(matches!(ur_table_bound(UrScheme::FullMub, &bad), Err(QcextError::VacuousBound(_))));
        let no_dp = UrParams::default();
        assert!(ur_table_bound(UrScheme::Bitwise, &no_dp).is_err());
    }

    #[test]
    fn vn_examples() {
        let r = vn_ur_check(2, 1, &pure0()).unwrap();
        assert!((r.lhs_avg - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.rhs_bound - (3f64.log2() - 1.0)).abs() < 1e-12);
        let bell = states::maximally_entangled(2, 2);
        let r = vn_ur_check(2, 1, &bell).unwrap();
        assert!(r.lhs_avg.abs() < 1e-10);
        assert!((r.rhs_bound - (3f64.log2() - 2.0)).abs() < 1e-10);
        let mm = DensityOperator::maximally_mixed(SubsystemShape::bipartite(2, 1));
        assert!((vn_ur_check(2, 1, &mm).unwrap().lhs_avg - 1.0).abs() < 1e-12);
    }
}
