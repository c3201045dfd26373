//! Weak string erasure in the noisy-storage model: security parameters,
//! channel fidelities, strong-converse witnesses and an honest-party
//! simulation of the protocol.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::designs::sample_haar_unitary;
use crate::error::{QcextError, Result};
use crate::linalg::{c, hermitian_part, hs_norm, identity, ket_bra, tensor, ComplexMatrix};

pub const CHANNEL_TOL: f64 = 1e-10;

/// log2(3) - 1: the per-qubit entropy rate of the three-basis protocol.
pub fn log3_minus_1() -> f64 {
    3f64.log2() - 1.0
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(QcextError::InvalidParameter("channel needs a Kraus operator".into()));
        }
        let mut acc = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            if k.nrows() != dim_out || k.ncols() != dim_in {
                return Err(QcextError::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            acc += k.adjoint() * k;
        }
        let defect = hs_norm(&(acc - identity(dim_in)));
        if !(defect <= CHANNEL_TOL) {
            return Err(QcextError::InvalidParameter(format!(
                "Kraus operators are not trace preserving (defect {defect:e})"
            )));
        }
        Ok(Channel {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn identity(d: usize) -> Self {
        Channel {
            dim_in: d,
            dim_out: d,
            kraus: vec![identity(d)],
        }
    }

    /// Channel with the single Kraus operator V (an isometry).
    pub fn isometry(v: ComplexMatrix) -> Result<Self> {
        Channel::new(v.ncols(), v.nrows(), vec![v])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.dim_in || rho.ncols() != self.dim_in {
            return Err(QcextError::DimensionMismatch(format!(
                "channel input is {}-dimensional, state is {}x{}",
                self.dim_in,
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        Ok(hermitian_part(&out))
    }

    /// (id ⊗ N)(ρ) on R ⊗ in with R of dimension `dim_r`.
    pub fn apply_second(&self, rho: &ComplexMatrix, dim_r: usize) -> Result<ComplexMatrix> {
        if rho.nrows() != dim_r * self.dim_in {
            return Err(QcextError::DimensionMismatch(format!(
                "state dimension {} is not {dim_r} x {}",
                rho.nrows(),
                self.dim_in
            )));
        }
        let id = identity(dim_r);
        let mut out = ComplexMatrix::zeros(dim_r * self.dim_out, dim_r * self.dim_out);
        for k in &self.kraus {
            let full = tensor(&id, k);
            out += &full * rho * full.adjoint();
        }
        Ok(hermitian_part(&out))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if next.dim_in != self.dim_out {
            return Err(QcextError::DimensionMismatch(format!(
                "cannot feed a {}-dimensional output into a {}-dimensional input",
                self.dim_out, next.dim_in
            )));
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .filter(|k| hs_norm(k) > 0.0)
            .collect::<Vec<_>>();
        let kraus = if kraus.is_empty() {
            vec![ComplexMatrix::zeros(next.dim_out, self.dim_in)]
        } else {
            kraus
        };
        Ok(Channel {
            dim_in: self.dim_in,
            dim_out: next.dim_out,
            kraus,
        })
    }

    pub fn tensor(&self, other: &Channel) -> Channel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| tensor(a, b)))
            .collect();
        Channel {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            kraus,
        }
    }

    /// p·self + (1-p)·other.
    pub fn mix(&self, p: f64, other: &Channel) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QcextError::InvalidParameter(format!("mixing weight {p} outside [0, 1]")));
        }
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(QcextError::DimensionMismatch("channels act on different spaces".into()));
        }
        let a = c(p.sqrt(), 0.0);
        let b = c((1.0 - p).sqrt(), 0.0);
        let kraus = self
            .kraus
            .iter()
            .map(|k| k * a)
            .chain(other.kraus.iter().map(|k| k * b))
            .collect();
        Ok(Channel {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
        })
    }

    /// Choi state (id ⊗ N)(Φ) for the normalized maximally entangled Φ.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim_in;
        let phi = maximally_entangled_vector(d);
        let proj = &phi * phi.adjoint();
        self.apply_second(&proj, d).expect("dimensions agree by construction")
    }
}

fn maximally_entangled_vector(d: usize) -> nalgebra::DVector<num_complex::Complex64> {
    let mut v = nalgebra::DVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    v
}

/// F_c(N) = <Φ|(id ⊗ N)(Φ)|Φ>.
pub fn channel_fidelity(ch: &Channel) -> Result<f64> {
    if ch.dim_in != ch.dim_out {
        return Err(QcextError::DimensionMismatch(format!(
            "channel fidelity needs equal input and output dimensions, got {} and {}",
            ch.dim_in, ch.dim_out
        )));
    }
    let phi = maximally_entangled_vector(ch.dim_in);
    Ok((phi.adjoint() * ch.choi() * &phi)[(0, 0)].re)
}

/// ρ ↦ rρ + (1-r) I/d.
pub fn depolarizing(d: usize, r: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&r) {
        return Err(QcextError::InvalidParameter(format!("r = {r} outside [0, 1]")));
    }
    let mut kraus = vec![identity(d) * c(r.sqrt(), 0.0)];
    let w = c(((1.0 - r) / d as f64).sqrt(), 0.0);
    if r < 1.0 {
        for i in 0..d {
            for j in 0..d {
                kraus.push(ket_bra(d, i, j) * w);
            }
        }
    }
    Channel::new(d, d, kraus)
}

/// Qubit dephasing: Z applied with probability p.
pub fn dephasing(p: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QcextError::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let z = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    Channel::new(2, 2, vec![identity(2) * c((1.0 - p).sqrt(), 0.0), z * c(p.sqrt(), 0.0)])
}

/// Complete dephasing in the computational basis of dimension d.
pub fn full_dephasing(d: usize) -> Channel {
    Channel {
        dim_in: d,
        dim_out: d,
        kraus: (0..d).map(|i| ket_bra(d, i, i)).collect(),
    }
}

/// Random channel from d_in to d_out with `kraus_count` Kraus operators,
/// obtained from a Haar-random isometry into out ⊗ env.
pub fn random_channel<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<Channel> {
    let big = dim_out * kraus_count;
    if big < dim_in {
        return Err(QcextError::InvalidParameter(format!(
            "isometry from {dim_in} into {dim_out} x {kraus_count} dimensions does not exist"
        )));
    }
    let u = sample_haar_unitary(big, rng)?;
    // V = first dim_in columns; Kraus K_e = (I ⊗ <e|) V
    let kraus = (0..kraus_count)
        .map(|e| ComplexMatrix::from_fn(dim_out, dim_in, |o, i| u[(o * kraus_count + e, i)]))
        .collect();
    Channel::new(dim_in, dim_out, kraus)
}

/// Encoder that keeps the low N qubits of an NR-qubit input as storage and
/// writes the rest into the classical register: |s + 2^N m> ↦ |s>|m>.
pub fn compression_encoder(storage_dim: usize, blocks: usize) -> Result<Channel> {
    let d = storage_dim * blocks;
    let v = ComplexMatrix::from_fn(d, d, |row, col| {
        let (s, m) = (col % storage_dim, col / storage_dim);
        if row == s * blocks + m {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    Channel::isometry(v)
}

/// Inverse relabeling of [`compression_encoder`]: |s>|m> ↦ |s + 2^N m>.
pub fn embedding_decoder(storage_dim: usize, blocks: usize) -> Result<Channel> {
    let enc = compression_encoder(storage_dim, blocks)?;
    Channel::isometry(enc.kraus[0].adjoint())
}

/// γ(I_2, R) = R - 1 for the qubit identity channel.
pub fn gamma_identity(rate: f64) -> Result<f64> {
    if !(rate > 1.0) {
        return Err(QcextError::BelowCapacity(rate));
    }
    Ok(rate - 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongConverseWitness {
    pub fc: f64,
    pub bound: f64,
    pub holds: bool,
}

/// F_c of D ∘ (id_storage ⊗ Δ_M) ∘ E against 2^{-(R-1)N}.
///
/// E maps 2^{NR} dimensions into 2^N storage dimensions times a classical
/// register of `m_blocks` values (M least significant), the register is
/// dephased, and D maps back.
pub fn strong_converse_witness(
    n_cells: usize,
    rate: f64,
    m_blocks: usize,
    encode: &Channel,
    decode: &Channel,
) -> Result<StrongConverseWitness> {
    let gamma = gamma_identity(rate)?;
    let nr = n_cells as f64 * rate;
    if (nr - nr.round()).abs() > 1e-12 {
        return Err(QcextError::InvalidParameter(format!("N·R = {nr} must be an integer")));
    }
    let d_in = 1usize << nr.round() as u32;
    let storage = 1usize << n_cells;
    if encode.dim_in != d_in || encode.dim_out != storage * m_blocks {
        return Err(QcextError::DimensionMismatch(format!(
            "encoder must map {d_in} into {storage} x {m_blocks} dimensions"
        )));
    }
    if decode.dim_in != storage * m_blocks || decode.dim_out != d_in {
        return Err(QcextError::DimensionMismatch(format!(
            "decoder must map {storage} x {m_blocks} back into {d_in} dimensions"
        )));
    }
    let memory = Channel::identity(storage).tensor(&full_dephasing(m_blocks));
    let composite = encode.then(&memory)?.then(decode)?;
    let fc = channel_fidelity(&composite)?;
    let bound = (-gamma * n_cells as f64).exp2();
    Ok(StrongConverseWitness {
        fc,
        bound,
        holds: fc <= bound + 1e-9,
    })
}

/// Protocol constants κ and ξ.
#[derive(Clone, Debug, Serialize)]
pub struct WseParams {
    pub n: u64,
    pub nu: f64,
    pub eps: f64,
    pub delta_prime: f64,
    pub kappa: f64,
    pub xi: f64,
}

impl WseParams {
    pub fn new(n: u64, nu: f64, eps: f64, delta_prime: f64) -> Result<Self> {
        if n == 0 {
            return Err(QcextError::InvalidParameter("n must be at least 1".into()));
        }
        if !(delta_prime > 0.0) || !(eps * eps / 2.0 > delta_prime) {
            return Err(QcextError::InvalidParameter(format!(
                "need eps^2/2 > delta' > 0, got eps = {eps}, delta' = {delta_prime}"
            )));
        }
        let kappa = (2.0 / (delta_prime * delta_prime) + 1.0).log2();
        let slack = eps * eps / 2.0 - delta_prime;
        let xi = (1.0 / (slack * slack)).log2();
        Ok(WseParams {
            n,
            nu,
            eps,
            delta_prime,
            kappa,
            xi,
        })
    }
}

/// λ = log3 - 1 - (1/n) max{0, fc_log_term + κ} - (ξ + 1)/n, with
/// fc_log_term the attacker's best log2(2^n F_c).
pub fn wse_lambda(n: u64, fc_log_term: f64, eps: f64, delta_prime: f64) -> Result<f64> {
    let p = WseParams::new(n, 0.0, eps, delta_prime)?;
    let nf = n as f64;
    Ok(log3_minus_1() - (fc_log_term + p.kappa).max(0.0) / nf - (p.xi + 1.0) / nf)
}

/// Bounded noise-free storage of νn qubits:
/// λ = log3 - 1 - ν - (κ + ξ + 1)/n, defined for ν < log3 - 1.
pub fn wse_lambda_bounded(n: u64, nu: f64, eps: f64, delta_prime: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(QcextError::InvalidParameter(format!("storage rate {nu} is negative")));
    }
    if nu >= log3_minus_1() {
        return Err(QcextError::NoSecurity(format!(
            "storage rate {nu} is not below log2(3) - 1 = {:.6}",
            log3_minus_1()
        )));
    }
    let p = WseParams::new(n, nu, eps, delta_prime)?;
    let nf = n as f64;
    Ok(log3_minus_1() - nu - (p.kappa + p.xi + 1.0) / nf)
}

/// log2(2^n F_c) for N = νn stored qubits under F_c ≤ 2^{-(R-1)N}, R = 1/ν.
pub fn bounded_storage_fc_log_term(n: u64, nu: f64) -> Result<f64> {
    let gamma = gamma_identity(1.0 / nu)?;
    let nf = n as f64;
    Ok(nf - gamma * nu * nf)
}

/// Storage N^{⊗νn} with strong-converse parameter γ at rate 1/ν:
/// λ = log3 - 1 - max{0, 1 - νγ + κ/n} - (ξ + 1)/n.
pub fn wse_lambda_strong_converse(n: u64, nu: f64, gamma: f64, eps: f64, delta_prime: f64) -> Result<f64> {
    let nf = n as f64;
    wse_lambda(n, nf * (1.0 - nu * gamma), eps, delta_prime)
}

/// Which side conditions of the strong-converse corollary hold.
#[derive(Clone, Debug, Serialize)]
pub struct WseRegime {
    pub nu_gamma: f64,
    /// νγ > 2 - log3
    pub above_threshold: bool,
    /// νγ < 1 + κ/n
    pub below_one_plus_kappa: bool,
    /// the max{0, ·} term is active (1 - νγ + κ/n > 0)
    pub storage_term_active: bool,
}

pub fn wse_regime(n: u64, nu: f64, gamma: f64, kappa: f64) -> WseRegime {
    let nu_gamma = nu * gamma;
    let kn = kappa / n as f64;
    WseRegime {
        nu_gamma,
        above_threshold: nu_gamma > 2.0 - 3f64.log2(),
        below_one_plus_kappa: nu_gamma < 1.0 + kn,
        storage_term_active: 1.0 - nu_gamma + kn > 0.0,
    }
}

/// One honest run of the protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WseTranscript {
    pub x: Vec<u8>,
    pub theta: Vec<u8>,
    pub theta_tilde: Vec<u8>,
    /// Bob's measurement outcome for every position.
    pub bob_outcomes: Vec<u8>,
    /// Positions where the bases agree.
    pub matched: Vec<usize>,
    /// Bob's output substring on `matched`.
    pub x_matched: Vec<u8>,
}

impl WseTranscript {
    pub fn consistent(&self) -> bool {
        let expect: Vec<usize> = (0..self.x.len())
            .filter(|&i| self.theta[i] == self.theta_tilde[i])
            .collect();
        expect == self.matched
            && self.matched.len() == self.x_matched.len()
            && self
                .matched
                .iter()
                .zip(&self.x_matched)
                .all(|(&i, &b)| self.x[i] == b)
    }
}

/// Honest-party statistics: x uniform, bases uniform over three, Bob's
/// outcome equals x_i on matching bases and is a fair coin otherwise.
pub fn simulate_wse<R: Rng + ?Sized>(n: usize, rng: &mut R) -> WseTranscript {
    let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let theta: Vec<u8> = (0..n).map(|_| rng.random_range(0..3u8)).collect();
    let theta_tilde: Vec<u8> = (0..n).map(|_| rng.random_range(0..3u8)).collect();
    let bob_outcomes: Vec<u8> = (0..n)
        .map(|i| {
            if theta[i] == theta_tilde[i] {
                x[i]
            } else {
                rng.random_range(0..2u8)
            }
        })
        .collect();
    let matched: Vec<usize> = (0..n).filter(|&i| theta[i] == theta_tilde[i]).collect();
    let x_matched = matched.iter().map(|&i| bob_outcomes[i]).collect();
    WseTranscript {
        x,
        theta,
        theta_tilde,
        bob_outcomes,
        matched,
        x_matched,
    }
}

/// Transcript `index` of a batch seeded by `seed`: each transcript draws
/// from its own ChaCha stream, so batches are reproducible in parallel.
pub fn simulate_wse_indexed(n: usize, seed: u64, index: u64) -> WseTranscript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    simulate_wse(n, &mut rng)
}

pub fn simulate_wse_batch(n: usize, samples: usize, seed: u64) -> Vec<WseTranscript> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| simulate_wse_indexed(n, seed, i))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WseSummary {
    pub n: usize,
    pub samples: usize,
    pub match_rate: f64,
    pub match_rate_sigma: f64,
    pub x_one_rate: f64,
    pub unmatched_agreement: f64,
    pub all_consistent: bool,
}

pub fn summarize_wse(transcripts: &[WseTranscript]) -> WseSummary {
    let n = transcripts.first().map_or(0, |t| t.x.len());
    let total = (n * transcripts.len()).max(1) as f64;
    let matched: usize = transcripts.iter().map(|t| t.matched.len()).sum();
    let ones: usize = transcripts
        .iter()
        .map(|t| t.x.iter().filter(|&&b| b == 1).count())
        .sum();
    let (mut agree, mut unmatched) = (0usize, 0usize);
    for t in transcripts {
        for i in 0..t.x.len() {
            if t.theta[i] != t.theta_tilde[i] {
                unmatched += 1;
                agree += usize::from(t.bob_outcomes[i] == t.x[i]);
            }
        }
    }
    WseSummary {
        n,
        samples: transcripts.len(),
        match_rate: matched as f64 / total,
        match_rate_sigma: ((1.0 / 3.0) * (2.0 / 3.0) / total).sqrt(),
        x_one_rate: ones as f64 / total,
        unmatched_agreement: agree as f64 / unmatched.max(1) as f64,
        all_consistent: transcripts.iter().all(WseTranscript::consistent),
    }
}
