//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qcext_core::designs::{sample_haar_family, sample_haar_unitary, single_qubit_clifford, verify_unitary_2design};
use qcext_core::entropy::{h2_cond, hmax, hmin, hmin_given_sigma};
use qcext_core::extractor_lab::{
    bound_2design, bound_bitwise, bound_full_mub, bound_full_mub_h2, compose_bitwise_perm_family,
    compose_mub_perm_family, eval_qc_distance, seed_lower_bound_witness,
};
use qcext_core::linalg::{c, hermitian_part, identity, ket_bra, lambda_max, measured_blocks, partial_trace, reduce_to_e, tensor};
use qcext_core::mubs::{build_bitwise_family, build_full_mub_set, verify_mub_property, verify_projective_2design};
use qcext_core::noisy_storage::{
    compression_encoder, embedding_decoder, random_channel, simulate_wse_batch, strong_converse_witness,
    wse_lambda_bounded, WseParams,
};
use qcext_core::states::{maximally_entangled, random_mixed_state, random_pure_vector, random_test_state, test_state_suite};
use qcext_core::uncertainty::{build_kej_state, meta_minentropy_check, vn_lower_from_distance, vn_ur_check};
use qcext_core::{ComplexMatrix, DensityOperator, SubsystemShape, UnitaryFamily};

const MUB_TOL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1e-7;
const WITNESS_TOL: f64 = 1e-10;
const SDP_MATCH: f64 = 1e-6;
const GUESS_MATCH: f64 = 1e-4;
const UR_SLACK: f64 = 1e-8;
const LAMBDA_TOL: f64 = 5e-5;
const KAPPA_TOL: f64 = 1e-3;
const FC_TOL: f64 = 1e-9;
const CHI2_LEVEL: f64 = 1e-3;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s as f64, || {
        format!("runtime {:.1}s exceeds {limit_s}s", elapsed.as_secs_f64())
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bipartite(m: ComplexMatrix, da: usize, de: usize) -> DensityOperator {
    DensityOperator::new(m, SubsystemShape::bipartite(da, de)).expect("valid state")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64);
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let fam = build_full_mub_set(q).map_err(err)?;
        let (m, t) = (verify_mub_property(&fam), verify_projective_2design(&fam));
        ensure(m <= MUB_TOL && t <= MUB_TOL, || format!("q = {q}: overlap {m:e}, design {t:e}"))?;
        worst = (worst.0.max(m), worst.1.max(t));
    }
    within(start.elapsed(), 5)?;
    Ok(format!(
        "max overlap defect {:.1e}, max design defect {:.1e}, {:.2}s",
        worst.0,
        worst.1,
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2);
    let (mut checks, mut min_margin, mut min_h2_margin) = (0usize, f64::INFINITY, f64::INFINITY);
    for q in [2usize, 3, 4, 5] {
        let splits: Vec<usize> = (1..=q).filter(|a1| q % a1 == 0).collect();
        let families: Vec<(usize, UnitaryFamily)> = splits
            .iter()
            .map(|&a1| compose_mub_perm_family(q, a1).map(|f| (a1, f)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        for de in [1usize, 2, 4] {
            for rho in test_state_suite(q, de, 50, &mut rng) {
                let h = hmin(&rho, q).map_err(err)?.value;
                let rho_e = reduce_to_e(rho.mat(), q);
                let h2 = h2_cond(&rho, q, &rho_e).map_err(err)?;
                for (a1, fam) in &families {
                    let lhs = eval_qc_distance(fam, &rho, *a1).map_err(err)?.lhs_avg_distance;
                    let margin = bound_full_mub(q, *a1, h, 0.0) - lhs;
                    let h2_margin = bound_full_mub_h2(q, *a1, h2) - lhs;
                    ensure(margin >= -BOUND_SLACK && h2_margin >= -BOUND_SLACK, || {
                        format!("q = {q}, |E| = {de}, |A1| = {a1}: lhs {lhs}, margins {margin:e} / {h2_margin:e}")
                    })?;
                    min_margin = min_margin.min(margin);
                    min_h2_margin = min_h2_margin.min(h2_margin);
                    checks += 1;
                }
            }
        }
    }
    within(start.elapsed(), 180)?;
    Ok(format!(
        "{checks} checks, min margin {min_margin:.3e} (Hmin) / {min_h2_margin:.3e} (H2), {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let (mut checks, mut min_margin) = (0usize, f64::INFINITY);
    for n in [1usize, 2] {
        let fam = compose_bitwise_perm_family(2, n).map_err(err)?;
        let dim = fam.dim();
        let expected_len = if n == 2 { 108 } else { 6 };
        ensure(fam.len() == expected_len, || format!("n = {n}: family size {}", fam.len()))?;
        for de in [1usize, 2] {
            for rho in test_state_suite(dim, de, 50, &mut rng) {
                let h = hmin(&rho, dim).map_err(err)?.value;
                for m in 0..=n {
                    let a1 = 1usize << m;
                    let lhs = eval_qc_distance(&fam, &rho, a1).map_err(err)?.lhs_avg_distance;
                    for dp in [0.1, 0.25] {
                        let rhs = bound_bitwise(2, n, a1, h, 0.0, dp).map_err(err)?;
                        ensure(lhs <= rhs + BOUND_SLACK, || {
                            format!("n = {n}, |E| = {de}, |A1| = {a1}, delta' = {dp}: lhs {lhs} > rhs {rhs}")
                        })?;
                        min_margin = min_margin.min(rhs - lhs);
                        checks += 1;
                    }
                }
            }
        }
    }
    within(start.elapsed(), 300)?;
    Ok(format!(
        "{checks} checks, min margin {min_margin:.3e}, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let cliff = single_qubit_clifford();
    ensure(cliff.len() == 24, || format!("Clifford group has {} elements", cliff.len()))?;
    let mut dev = 0.0f64;
    for a2 in [1, 2] {
        dev = dev.max(verify_unitary_2design(&cliff, a2).map_err(err)?);
    }
    ensure(dev <= MUB_TOL, || format!("moment deviation {dev:e}"))?;
    let mut rng = rng(4);
    let mut min_margin = f64::INFINITY;
    for i in 0..100 {
        let de = 1 + i % 4;
        let rho = random_test_state(2, de, [0.0, 0.5, 1.0][i % 3], &mut rng);
        let h = hmin(&rho, 2).map_err(err)?.value;
        let lhs = eval_qc_distance(&cliff, &rho, 2).map_err(err)?.lhs_avg_distance;
        let rhs = bound_2design(2, 2, h, 0.0);
        ensure(lhs <= rhs + BOUND_SLACK, || format!("state {i}: lhs {lhs} > rhs {rhs}"))?;
        min_margin = min_margin.min(rhs - lhs);
    }
    Ok(format!("moment deviation {dev:.1e}, 100 states, min margin {min_margin:.3e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let mut checked = 0;
    for dim in [2usize, 4, 8] {
        let n = dim.trailing_zeros() as usize;
        let families = vec![
            build_full_mub_set(dim).map_err(err)?,
            build_bitwise_family(2, n).map_err(err)?,
            sample_haar_family(dim, 5, &mut rng).map_err(err)?,
        ];
        for fam in &families {
            for a1 in (2..=dim).filter(|a1| dim % a1 == 0 && a1 % 2 == 0) {
                let d = seed_lower_bound_witness(fam, a1).map_err(err)?;
                ensure((d - 1.0).abs() <= WITNESS_TOL, || {
                    format!("|A| = {dim}, |A1| = {a1}, {}: distance {d}", fam.kind())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} family/split pairs reach distance 1"))
}

/// Optimal guessing probability of X from B for a cq state with |X| = |B| = 2,
/// searched over projective measurements on a Bloch-sphere grid.
fn guessing_probability_grid(p0: f64, rho0: &ComplexMatrix, p1: f64, rho1: &ComplexMatrix) -> f64 {
    let delta = rho0 * c(p0, 0.0) - rho1 * c(p1, 0.0);
    let value = |theta: f64, phi: f64| {
        let v = DVector::from_vec(vec![
            c((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ]);
        (v.adjoint() * &delta * &v)[(0, 0)].re
    };
    let (nt, np) = (90usize, 180usize);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=nt {
        for j in 0..np {
            let (t, p) = (std::f64::consts::PI * i as f64 / nt as f64, std::f64::consts::TAU * j as f64 / np as f64);
            let v = value(t, p);
            if v > best.0 {
                best = (v, t, p);
            }
        }
    }
    let mut step = std::f64::consts::PI / nt as f64;
    for _ in 0..60 {
        let (_, t0, p0_) = best;
        for di in -4..=4 {
            for dj in -4..=4 {
                let (t, p) = (t0 + di as f64 * step / 4.0, p0_ + dj as f64 * step / 4.0);
                let v = value(t, p);
                if v > best.0 {
                    best = (v, t, p);
                }
            }
        }
        step *= 0.5;
    }
    let trivial = (p0 - p1).max(0.0);
    p1 + best.0.max(0.0).max(trivial)
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    // closed forms
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (da, db) = (rng.random_range(2..=3), rng.random_range(1..=3));
        let ra = random_mixed_state(da, rng.random_range(1..=da), &mut rng);
        let rb = random_mixed_state(db, rng.random_range(1..=db), &mut rng);
        let expect = -lambda_max(&ra).map_err(err)?.log2();
        let got = hmin(&bipartite(tensor(&ra, &rb), da, db), da).map_err(err)?.value;
        worst = worst.max((got - expect).abs());
    }
    for d in [2usize, 3] {
        let got = hmin(&maximally_entangled(d, d), d).map_err(err)?.value;
        worst = worst.max((got + (d as f64).log2()).abs());
    }
    ensure(worst <= SDP_MATCH, || format!("closed-form mismatch {worst:e}"))?;

    // collision entropy dominates, measurement gain is bounded
    for i in 0..200 {
        let (da, db) = (2 + i % 3, 1 + (i / 3) % 4);
        let rho = random_test_state(da, db, [0.0, 0.5, 1.0][i % 3], &mut rng);
        let sigma = random_mixed_state(db, db, &mut rng);
        let (hs, h2) = (
            hmin_given_sigma(&rho, da, &sigma).map_err(err)?,
            h2_cond(&rho, da, &sigma).map_err(err)?,
        );
        ensure(hs <= h2 + 1e-8, || format!("instance {i}: Hmin(rho|sigma) {hs} > H2 {h2}"))?;

        let h = hmin(&rho, da).map_err(err)?.value;
        let u = sample_haar_unitary(da, &mut rng).map_err(err)?;
        let full = tensor(&u, &identity(db));
        let rotated = &full * rho.mat() * full.adjoint();
        let mut xb = ComplexMatrix::zeros(da * db, da * db);
        for (x, block) in measured_blocks(&rotated, da, 1).iter().enumerate() {
            xb.view_mut((x * db, x * db), (db, db)).copy_from(block);
        }
        let hx = hmin(&bipartite(hermitian_part(&xb), da, db), da).map_err(err)?.value;
        ensure(hx <= h + (da as f64).log2() + SDP_MATCH, || {
            format!("instance {i}: Hmin(X|B) {hx} > Hmin(A|B) {h} + log|A|")
        })?;
    }

    // max-entropy duality against an explicitly purified state
    let mut dual_worst = 0.0f64;
    for i in 0..20 {
        let (da, db, dc) = (2, 1 + i % 3, 1 + (i / 3) % 3);
        let psi = random_pure_vector(da * db * dc, &mut rng);
        let abc = DensityOperator::pure(&psi, SubsystemShape::new(vec![da, db, dc]).map_err(err)?).map_err(err)?;
        let ab = partial_trace(&abc, &[0, 1]).map_err(err)?;
        let ac = partial_trace(&abc, &[0, 2]).map_err(err)?;
        let hm = hmax(&ab, da).map_err(err)?;
        let direct = -hmin(&ac, da).map_err(err)?.value;
        dual_worst = dual_worst.max((hm - direct).abs());
        let lower = hmin(&ab, da).map_err(err)?.value;
        ensure(hm >= lower - SDP_MATCH, || format!("instance {i}: Hmax {hm} < Hmin {lower}"))?;
    }
    ensure(dual_worst <= SDP_MATCH, || format!("duality mismatch {dual_worst:e}"))?;

    // classical-quantum states against the guessing oracle
    let mut cq_worst = 0.0f64;
    let mut cases: Vec<(f64, ComplexMatrix, ComplexMatrix)> = vec![(0.5, ket_bra(2, 0, 0), ket_bra(2, 1, 1))];
    for _ in 0..30 {
        let p0 = rng.random_range(0.05..0.95);
        let r0 = random_mixed_state(2, rng.random_range(1..=2), &mut rng);
        let r1 = random_mixed_state(2, rng.random_range(1..=2), &mut rng);
        cases.push((p0, r0, r1));
    }
    for (k, (p0, r0, r1)) in cases.iter().enumerate() {
        let p1 = 1.0 - p0;
        let mut m = ComplexMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&(r0 * c(*p0, 0.0)));
        m.view_mut((2, 2), (2, 2)).copy_from(&(r1 * c(p1, 0.0)));
        let h = hmin(&bipartite(m, 2, 2), 2).map_err(err)?.value;
        let oracle = -guessing_probability_grid(*p0, r0, p1, r1).log2();
        if k == 0 {
            ensure(h.abs() <= GUESS_MATCH, || format!("perfectly correlated cq state gives {h}"))?;
        }
        cq_worst = cq_worst.max((h - oracle).abs());
    }
    ensure(cq_worst <= GUESS_MATCH, || format!("guessing oracle mismatch {cq_worst:e}"))?;
    Ok(format!(
        "closed forms {worst:.1e}, 200 lemma instances, duality {dual_worst:.1e}, guessing {cq_worst:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut min_slack = f64::INFINITY;
    for (d, n) in [(2usize, 1usize), (3, 1), (2, 2)] {
        let dim = d.pow(n as u32);
        for i in 0..200 {
            let de = 1 + i % 4;
            let rho = random_test_state(dim, de, [0.0, 0.5, 1.0][i % 3], &mut rng);
            let chk = vn_ur_check(d, n, &rho).map_err(err)?;
            let slack = chk.lhs_avg - chk.rhs_bound;
            ensure(slack >= -UR_SLACK, || format!("(d, n) = ({d}, {n}), state {i}: slack {slack:e}"))?;
            min_slack = min_slack.min(slack);
        }
    }
    let zero = vn_ur_check(2, 1, &bipartite(ket_bra(2, 0, 0), 2, 1)).map_err(err)?;
    let log3m1 = 3f64.log2() - 1.0;
    ensure((zero.lhs_avg - 2.0 / 3.0).abs() < 1e-12 && (zero.rhs_bound - log3m1).abs() < 1e-12, || {
        format!("|0>: lhs {} rhs {}", zero.lhs_avg, zero.rhs_bound)
    })?;
    let bell = vn_ur_check(2, 1, &maximally_entangled(2, 2)).map_err(err)?;
    ensure(bell.lhs_avg.abs() < 1e-10 && (bell.rhs_bound - (log3m1 - 1.0)).abs() < 1e-10, || {
        format!("Bell: lhs {} rhs {}", bell.lhs_avg, bell.rhs_bound)
    })?;
    Ok(format!(
        "600 states, min slack {min_slack:.3e}; |0>: {:.4} vs {:.4}; Bell: {:.4} vs {:.4}",
        zero.lhs_avg, zero.rhs_bound, bell.lhs_avg, bell.rhs_bound
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let families = [
        (build_full_mub_set(2).map_err(err)?, 2usize),
        (build_full_mub_set(3).map_err(err)?, 3),
        (build_full_mub_set(4).map_err(err)?, 2),
        (compose_mub_perm_family(2, 2).map_err(err)?, 2),
    ];
    let (mut worst_ratio, mut min_gap) = (0.0f64, f64::INFINITY);
    for i in 0..50 {
        let (fam, a1) = &families[i % families.len()];
        let de = 1 + i % 3;
        let rho = random_test_state(fam.dim(), de, [0.0, 0.5, 1.0][i % 3], &mut rng);
        let meta = meta_minentropy_check(fam, &rho, *a1).map_err(err)?;
        ensure(meta.purified_dist <= meta.threshold + BOUND_SLACK, || {
            format!("instance {i}: P = {} > sqrt(2 eps) = {}", meta.purified_dist, meta.threshold)
        })?;
        if meta.threshold > 0.0 {
            worst_ratio = worst_ratio.max(meta.purified_dist / meta.threshold);
        }
        let h = build_kej_state(fam, &rho, *a1).map_err(err)?.cond_entropy().map_err(err)?;
        let log_k1 = (*a1 as f64).log2();
        // beyond eps = 1 the entropy term no longer applies and (1 - 4 eps) log|K1| is already negative
        let lower = if meta.eps_rho <= 1.0 {
            vn_lower_from_distance(meta.eps_rho, log_k1).map_err(err)?
        } else {
            (1.0 - 4.0 * meta.eps_rho) * log_k1
        };
        ensure(lower <= h + BOUND_SLACK, || format!("instance {i}: lower {lower} > H(K1|EJ) {h}"))?;
        min_gap = min_gap.min(h - lower);
    }
    Ok(format!("50 instances, max P/threshold {worst_ratio:.3}, min entropy gap {min_gap:.3e}"))
}

fn criterion_9() -> Outcome {
    let p = WseParams::new(1_000_000, 0.3, 0.1, 0.001).map_err(err)?;
    ensure((p.kappa - 20.9316).abs() <= KAPPA_TOL, || format!("kappa {}", p.kappa))?;
    ensure((p.xi - 15.9316).abs() <= KAPPA_TOL, || format!("xi {}", p.xi))?;
    let l = wse_lambda_bounded(1_000_000, 0.3, 0.1, 0.001).map_err(err)?;
    ensure((l - 0.28492).abs() <= LAMBDA_TOL, || format!("lambda {l}"))?;
    let gate = 3f64.log2() - 1.0;
    for nu in [gate, 0.585, 0.6, 0.9] {
        ensure(wse_lambda_bounded(1_000_000, nu, 0.1, 0.001).is_err(), || format!("nu = {nu} accepted"))?;
    }
    ensure(wse_lambda_bounded(1_000_000, 0.584, 0.1, 0.001).is_ok(), || "nu = 0.584 rejected".into())?;
    Ok(format!("lambda {l:.5}, kappa {:.4}, xi {:.4}, gate at {gate:.4}", p.kappa, p.xi))
}

fn criterion_10() -> Outcome {
    let mut rng = rng(10);
    let rate = 2.0;
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for n_cells in [1usize, 2] {
        let storage = 1usize << n_cells;
        let d_in = 1usize << (2 * n_cells);
        let bound = (-(n_cells as f64)).exp2();
        let blocks = d_in / storage;
        let w = strong_converse_witness(
            n_cells,
            rate,
            blocks,
            &compression_encoder(storage, blocks).map_err(err)?,
            &embedding_decoder(storage, blocks).map_err(err)?,
        )
        .map_err(err)?;
        ensure(w.fc <= bound + FC_TOL, || format!("N = {n_cells} compression: F_c {}", w.fc))?;
        worst = worst.max(w.fc - bound);
        for s in 0..20 {
            let m_blocks = 1 + s % 3;
            let out = storage * m_blocks;
            let enc = random_channel(d_in, out, d_in.div_ceil(out) + s % 2, &mut rng).map_err(err)?;
            let dec = random_channel(out, d_in, out.div_ceil(d_in) + s % 2, &mut rng).map_err(err)?;
            let w = strong_converse_witness(n_cells, rate, m_blocks, &enc, &dec).map_err(err)?;
            ensure(w.fc <= bound + FC_TOL, || format!("N = {n_cells}, sample {s}: F_c {}", w.fc))?;
            worst = worst.max(w.fc - bound);
            count += 1;
        }
    }
    Ok(format!("{count} sampled strategies plus compression, max F_c - bound {worst:.3e}"))
}

fn chi2_pvalue(observed: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

fn criterion_11() -> Outcome {
    let (n, samples) = (8usize, 100_000usize);
    let ts = simulate_wse_batch(n, samples, 11);
    ensure(ts.iter().all(|t| t.consistent()), || "inconsistent transcript".into())?;

    let total = (n * samples) as f64;
    let matched: usize = ts.iter().map(|t| t.matched.len()).sum();
    let rate = matched as f64 / total;
    let sigma = ((1.0 / 3.0) * (2.0 / 3.0) / total).sqrt();
    ensure((rate - 1.0 / 3.0).abs() <= 3.0 * sigma, || format!("Pr[i in I] = {rate}, sigma {sigma}"))?;

    let pack = |bits: &mut dyn Iterator<Item = bool>| bits.fold(0usize, |acc, b| (acc << 1) | usize::from(b));
    let mut x_counts = vec![0u64; 1 << n];
    let mut i_counts = vec![0u64; 1 << n];
    for t in &ts {
        x_counts[pack(&mut t.x.iter().map(|&b| b == 1))] += 1;
        i_counts[pack(&mut (0..n).map(|i| t.theta[i] == t.theta_tilde[i]))] += 1;
    }
    let x_expected = vec![samples as f64 / (1 << n) as f64; 1 << n];
    let px = chi2_pvalue(&x_counts, &x_expected);
    ensure(px >= CHI2_LEVEL, || format!("X uniformity p-value {px:e}"))?;
    let i_expected: Vec<f64> = (0..1usize << n)
        .map(|s| {
            let k = s.count_ones() as i32;
            samples as f64 * (1.0f64 / 3.0).powi(k) * (2.0f64 / 3.0).powi(n as i32 - k)
        })
        .collect();
    let pi = chi2_pvalue(&i_counts, &i_expected);
    ensure(pi >= CHI2_LEVEL, || format!("I distribution p-value {pi:e}"))?;
    Ok(format!("Pr[i in I] = {rate:.5} (3 sigma = {:.5}), chi2 p-values X {px:.3}, I {pi:.3}", 3.0 * sigma))
}

fn main() {
    let criteria: [Check; 11] = [
        ("MUB validity", criterion_1),
        ("full MUB extractor bound", criterion_2),
        ("bitwise extractor bound", criterion_3),
        ("Clifford 2-design extractor", criterion_4),
        ("seed-size witness", criterion_5),
        ("entropy engine", criterion_6),
        ("von Neumann uncertainty relation", criterion_7),
        ("meta uncertainty relation", criterion_8),
        ("WSE parameters", criterion_9),
        ("strong converse witness", criterion_10),
        ("protocol simulation", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {reason} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
