//! Random and special test states on A ⊗ E.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::designs::sample_haar_unitary;
use crate::linalg::{c, hermitian_part, trace, ComplexMatrix, DensityOperator, SubsystemShape, ZERO};

pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Normalized state of rank at most `rank`: G G† / tr for a d×rank Gaussian G.
pub fn random_mixed_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, rank.max(1), |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    hermitian_part(&(m / c(tr, 0.0)))
}

pub fn random_density<R: Rng + ?Sized>(shape: SubsystemShape, rank: usize, rng: &mut R) -> DensityOperator {
    let d = shape.total();
    DensityOperator::from_parts(random_mixed_state(d, rank, rng), shape)
}

/// (1/m) Σ_{i<m} |ii><jj| summed, m = min(|A|, |E|): maximally entangled
/// between A and E (on the first m levels of the larger side).
pub fn maximally_entangled(dim_a: usize, dim_e: usize) -> DensityOperator {
    let m = dim_a.min(dim_e);
    let mut v = DVector::from_element(dim_a * dim_e, ZERO);
    for i in 0..m {
        v[i * dim_e + i] = c(1.0 / (m as f64).sqrt(), 0.0);
    }
    DensityOperator::from_parts(&v * v.adjoint(), SubsystemShape::bipartite(dim_a, dim_e))
}

/// |i><i| on a single system of dimension d.
pub fn basis_state(d: usize, i: usize) -> DensityOperator {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, i)] = c(1.0, 0.0);
    DensityOperator::from_parts(m, SubsystemShape::single(d))
}

/// Pure state Σ_i √p_i |u_i>|i> with random Schmidt weights and a Haar-random
/// basis on A.
pub fn random_partially_entangled<R: Rng + ?Sized>(
    dim_a: usize,
    dim_e: usize,
    rng: &mut R,
) -> DensityOperator {
    let m = dim_a.min(dim_e);
    let weights: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let u = sample_haar_unitary(dim_a, rng).expect("dimension within budget");
    let mut v = DVector::from_element(dim_a * dim_e, ZERO);
    for (i, w) in weights.iter().enumerate() {
        let amp = (w / total).sqrt();
        for a in 0..dim_a {
            v[a * dim_e + i] += u[(a, i)] * amp;
        }
    }
    DensityOperator::from_parts(&v * v.adjoint(), SubsystemShape::bipartite(dim_a, dim_e))
}

/// (1-t)·(random state of rank r) + t·(random partially entangled pure state).
pub fn random_test_state<R: Rng + ?Sized>(
    dim_a: usize,
    dim_e: usize,
    t: f64,
    rng: &mut R,
) -> DensityOperator {
    let d = dim_a * dim_e;
    let rank = rng.random_range(1..=d);
    let mix = random_mixed_state(d, rank, rng);
    let ent = random_partially_entangled(dim_a, dim_e, rng);
    let m = mix * c(1.0 - t, 0.0) + ent.mat() * c(t, 0.0);
    DensityOperator::from_parts(hermitian_part(&m), SubsystemShape::bipartite(dim_a, dim_e))
}

/// `count` test states on A ⊗ E: the maximally entangled and maximally mixed
/// edge cases first, then random states cycling through t ∈ {0, 1/2, 1}.
pub fn test_state_suite<R: Rng + ?Sized>(
    dim_a: usize,
    dim_e: usize,
    count: usize,
    rng: &mut R,
) -> Vec<DensityOperator> {
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(maximally_entangled(dim_a, dim_e));
    }
    if count > 1 {
        out.push(DensityOperator::maximally_mixed(SubsystemShape::bipartite(dim_a, dim_e)));
    }
    let ts = [0.0, 0.5, 1.0];
    let mut i = 0;
    while out.len() < count {
        out.push(random_test_state(dim_a, dim_e, ts[i % 3], rng));
        i += 1;
    }
    out
}
