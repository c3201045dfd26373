use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use qcext_core::designs::{sample_haar_family, single_qubit_clifford, verify_unitary_2design};
use qcext_core::entropy::{h2_cond, hmin};
use qcext_core::extractor_lab::{
    bound_2design, bound_bitwise, bound_full_mub, compose_bitwise_perm_family, compose_mub_perm_family,
    eval_qc_distance, eval_qc_distance_sampled, sample_bitwise_perm_family, EntropyInputs,
};
use qcext_core::io::{parse_state, FamilyExport};
use qcext_core::linalg::{ket_bra, reduce_to_e};
use qcext_core::mubs::{build_bitwise_family, build_full_mub_set, verify_mub_property, verify_projective_2design};
use qcext_core::noisy_storage::{
    log3_minus_1, simulate_wse_batch, summarize_wse, wse_lambda_bounded, wse_lambda_strong_converse, wse_regime,
    WseParams,
};
use qcext_core::perms::{build_affine_family, verify_pairwise_independence};
use qcext_core::states::{maximally_entangled, test_state_suite};
use qcext_core::uncertainty::{ur_table_bound, vn_ur_check, UrParams, UrScheme};
use qcext_core::{DensityOperator, EntropyReport, ExtractorEvalReport, QcextError, SubsystemShape, UnitaryFamily};

use crate::args::*;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DESIGN_TOL: f64 = 1e-9;

pub struct Failure {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure {
            code: "usage".into(),
            message,
            exit: 2,
        }
    }

    pub fn internal(code: &str, message: String) -> Self {
        Failure {
            code: code.into(),
            message,
            exit: 1,
        }
    }
}

impl From<QcextError> for Failure {
    fn from(e: QcextError) -> Self {
        let mut message = e.to_string();
        if let QcextError::Budget(_) = e {
            message.push_str("; try a smaller dimension or --samples for subsampled evaluation");
        }
        Failure {
            code: e.code().into(),
            message,
            exit: if e.is_internal() { 1 } else { 2 },
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::internal("io", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn envelope<C: Serialize>(command: &str, config: &C, result: Value) -> Value {
    json!({
        "tool": "qcext",
        "version": VERSION,
        "command": command,
        "config": config,
        "result": result,
    })
}

fn emit_json<C: Serialize>(out: Option<&Path>, command: &str, config: &C, result: Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(&envelope(command, config, result))
        .map_err(|e| Failure::internal("serialize", e.to_string()))?;
    text.push('\n');
    emit(out, &text)
}

/// CSV with a leading comment line echoing the configuration.
fn emit_csv<C: Serialize>(out: Option<&Path>, command: &str, config: &C, header: &[&str], rows: Vec<Vec<String>>) -> Outcome {
    let echo = serde_json::to_string(config).map_err(|e| Failure::internal("serialize", e.to_string()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::internal("serialize", e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    let body = w.into_inner().map_err(|e| Failure::internal("serialize", e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| Failure::internal("serialize", e.to_string()))?;
    emit(out, &format!("# qcext {VERSION} {command} {echo}\n{body}"))
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::internal("serialize", e.to_string()))
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Mub(a) => mub(&a),
        Command::Perms(a) => perms(&a),
        Command::Design(a) => design(&a),
        Command::Entropy(a) => entropy(&a),
        Command::Extract(a) => extract(&a),
        Command::UrTable(a) => ur_table(&a),
        Command::UrCheck(a) => ur_check(&a),
        Command::WseParams(a) => wse_params(&a),
        Command::WseSimulate(a) => wse_simulate(&a),
    }
}

fn mub(a: &MubArgs) -> Outcome {
    let fam = build_full_mub_set(a.dim)?;
    let mut result = json!({ "kind": fam.kind(), "dim": fam.dim(), "count": fam.len() });
    if a.verify {
        let (m, d) = (verify_mub_property(&fam), verify_projective_2design(&fam));
        result["max_mub_dev"] = json!(m);
        result["design_dev"] = json!(d);
        result["valid"] = json!(m <= DESIGN_TOL && d <= DESIGN_TOL);
    }
    if a.export {
        result["members"] = to_value(&FamilyExport::new(&fam).members)?;
    }
    emit_json(a.output.out.as_deref(), "mub", a, result)
}

fn perms(a: &PermsArgs) -> Outcome {
    let fam = build_affine_family(a.q)?;
    let deviation = verify_pairwise_independence(&fam, a.q);
    let permutations: Vec<Value> = fam
        .iter()
        .map(|p| {
            let r = p.record();
            json!({ "a": r.a, "b": r.b, "images": p.images() })
        })
        .collect();
    let result = json!({
        "q": a.q,
        "count": fam.len(),
        "pairwise_deviation": deviation,
        "pairwise_independent": deviation == 0.0,
        "permutations": permutations,
    });
    emit_json(a.output.out.as_deref(), "perms", a, result)
}

fn qudit_count(dim: usize, d: usize) -> Result<usize, Failure> {
    let mut n = 0;
    let mut pow = 1usize;
    while pow < dim && d > 1 {
        pow *= d;
        n += 1;
    }
    if pow != dim || n == 0 {
        return Err(QcextError::DimensionMismatch(format!("{dim} is not a positive power of d = {d}")).into());
    }
    Ok(n)
}

fn build_family(
    kind: FamilyArg,
    dim: usize,
    dim_a1: usize,
    d: usize,
    count: usize,
    samples: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<UnitaryFamily, Failure> {
    Ok(match kind {
        FamilyArg::FullMub => build_full_mub_set(dim)?,
        FamilyArg::MubPerm => compose_mub_perm_family(dim, dim_a1)?,
        FamilyArg::Bitwise => build_bitwise_family(d, qudit_count(dim, d)?)?,
        FamilyArg::BitwisePerm => {
            let n = qudit_count(dim, d)?;
            match samples {
                Some(s) => sample_bitwise_perm_family(d, n, s, rng)?,
                None => compose_bitwise_perm_family(d, n)?,
            }
        }
        FamilyArg::Clifford => {
            if dim != 2 {
                return Err(QcextError::DimensionMismatch(format!("the Clifford family acts on dimension 2, not {dim}")).into());
            }
            single_qubit_clifford()
        }
        FamilyArg::Haar => sample_haar_family(dim, count, rng)?,
    })
}

fn design(a: &DesignArgs) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let fam = build_family(a.family, a.dim, 1, a.d, a.count, None, &mut rng)?;
    let dev = verify_unitary_2design(&fam, a.dim_a2)?;
    let result = json!({
        "family": fam.kind(),
        "dim": fam.dim(),
        "count": fam.len(),
        "dim_a2": a.dim_a2,
        "moment_deviation": dev,
        "is_design": dev <= DESIGN_TOL,
    });
    emit_json(a.output.out.as_deref(), "design", a, result)
}

fn parse_split(s: &str) -> Result<Vec<usize>, Failure> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("--split expects dA,dB, got {s:?}")))?;
    if dims.len() != 2 {
        return Err(Failure::usage(format!("--split expects two dimensions, got {s:?}")));
    }
    Ok(dims)
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: "io".into(),
        message: format!("{}: {e}", path.display()),
        exit: 2,
    })
}

fn entropy(a: &EntropyArgs) -> Outcome {
    let dims = parse_split(&a.split)?;
    let rho = parse_state(&read_file(&a.state)?, dims.clone())?;
    let report = EntropyReport::compute(&rho, dims[0])?;
    emit_json(a.output.out.as_deref(), "entropy", a, to_value(&report)?)
}

fn named_state(name: &str, dim_a: usize, dim_e: usize) -> Result<DensityOperator, Failure> {
    let shape = SubsystemShape::bipartite(dim_a, dim_e);
    match name {
        "pure0" => Ok(DensityOperator::new(ket_bra(dim_a * dim_e, 0, 0), shape)?),
        "mixed" => Ok(DensityOperator::maximally_mixed(shape)),
        "maxent" => Ok(maximally_entangled(dim_a, dim_e)),
        other => Err(Failure::usage(format!("unknown state {other:?}; use pure0, mixed or maxent"))),
    }
}

fn attach_bound(
    a: &ExtractArgs,
    fam: &UnitaryFamily,
    rho: &DensityOperator,
    report: ExtractorEvalReport,
) -> Result<ExtractorEvalReport, Failure> {
    let dim = fam.dim();
    let h = hmin(rho, dim)?;
    let mut inputs = EntropyInputs {
        hmin: h.value,
        solver_gap: h.gap,
        h2_rho_e: None,
    };
    let (name, rhs) = match a.family {
        FamilyArg::FullMub | FamilyArg::MubPerm => {
            inputs.h2_rho_e = Some(h2_cond(rho, dim, &reduce_to_e(rho.mat(), dim))?);
            // without the permutations the bound is only guaranteed when all of A is measured
            let name = if a.family == FamilyArg::FullMub && a.dim_a1 < dim { "full-mub-reference" } else { "full-mub" };
            (name, bound_full_mub(dim, a.dim_a1, h.value, 0.0))
        }
        FamilyArg::Bitwise | FamilyArg::BitwisePerm => (
            "bitwise",
            bound_bitwise(a.d, qudit_count(dim, a.d)?, a.dim_a1, h.value, 0.0, a.delta_prime)?,
        ),
        FamilyArg::Clifford => ("two-design", bound_2design(dim, a.dim_a1, h.value, 0.0)),
        FamilyArg::Haar => ("two-design-reference", bound_2design(dim, a.dim_a1, h.value, 0.0)),
    };
    Ok(report.with_bound(name, rhs, inputs))
}

fn extract(a: &ExtractArgs) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let fam = build_family(a.family, a.dim_a, a.dim_a1, a.d, a.count, a.samples, &mut rng)?;
    let inputs: Vec<DensityOperator> = if let Some(name) = &a.state {
        vec![named_state(name, a.dim_a, a.dim_e)?]
    } else if let Some(path) = &a.state_file {
        vec![parse_state(&read_file(path)?, vec![a.dim_a, a.dim_e])?]
    } else {
        if a.dim_a * a.dim_e > qcext_core::entropy::MAX_SDP_DIM {
            return Err(QcextError::Budget(format!("|A||E| = {} exceeds 64", a.dim_a * a.dim_e)).into());
        }
        test_state_suite(a.dim_a, a.dim_e, a.trials, &mut rng)
    };
    let subsample = a.samples.filter(|_| a.family != FamilyArg::BitwisePerm);
    let mut reports = Vec::with_capacity(inputs.len());
    for rho in &inputs {
        let rep = match subsample {
            Some(s) => eval_qc_distance_sampled(&fam, rho, a.dim_a1, s, &mut rng)?,
            None => eval_qc_distance(&fam, rho, a.dim_a1)?,
        };
        let mut rep = attach_bound(a, &fam, rho, rep)?;
        if a.samples.is_some() {
            rep.certified = false;
        }
        reports.push(rep);
    }
    let out = a.output.out.as_deref();
    match a.format {
        Format::Json => {
            let all_within = reports
                .iter()
                .all(|r| r.margin.is_some_and(|m| m >= -1e-7));
            let result = json!({ "reports": reports, "all_within_bound": all_within });
            emit_json(out, "extract", a, result)
        }
        Format::Csv => {
            let header = [
                "trial", "family", "dim_a", "dim_a1", "dim_e", "seed_count", "hmin", "lhs", "rhs", "margin", "certified",
            ];
            let rows = reports
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        i.to_string(),
                        r.family_label.clone(),
                        r.dim_a.to_string(),
                        r.dim_a1.to_string(),
                        r.dim_e.to_string(),
                        r.seed_count.to_string(),
                        r.entropy_inputs.as_ref().map_or(String::new(), |e| num(e.hmin)),
                        num(r.lhs_avg_distance),
                        r.rhs_bound.map_or(String::new(), num),
                        r.margin.map_or(String::new(), num),
                        r.certified.to_string(),
                    ]
                })
                .collect();
            emit_csv(out, "extract", a, &header, rows)
        }
    }
}

fn parse_ur_params(text: &str) -> Result<UrParams, Failure> {
    let mut p = UrParams::default();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("expected key=value, got {item:?}")))?;
        let bad = || Failure::usage(format!("bad value for {key}: {value:?}"));
        let float = || value.trim().parse::<f64>().map_err(|_| bad());
        let int = || value.trim().parse::<usize>().map_err(|_| bad());
        match key.trim() {
            "k" | "hmin" => p.hmin = float()?,
            "eps" => p.eps = float()?,
            "delta" => p.delta = float()?,
            "delta-prime" | "delta_prime" => p.delta_prime = float()?,
            "dim-a" | "dim_a" | "dimA" => p.dim_a = int()?,
            "d" => p.d = int()?,
            "n" => p.n = int()?,
            other => return Err(Failure::usage(format!("unknown parameter {other:?}"))),
        }
    }
    Ok(p)
}

fn ur_table(a: &UrTableArgs) -> Outcome {
    let scheme: UrScheme = a.scheme.parse()?;
    let p = parse_ur_params(&a.params)?;
    let bound = ur_table_bound(scheme, &p)?;
    let label = to_value(&scheme)?.as_str().unwrap_or_default().to_string();
    let header = ["scheme", "dim_a", "d", "n", "k", "eps", "delta", "delta_prime", "bound"];
    let row = vec![
        label,
        p.dim_a.to_string(),
        p.d.to_string(),
        p.n.to_string(),
        num(p.hmin),
        num(p.eps),
        num(p.delta),
        num(p.delta_prime),
        num(bound),
    ];
    emit_csv(a.output.out.as_deref(), "ur-table", a, &header, vec![row])
}

fn ur_check(a: &UrCheckArgs) -> Outcome {
    if a.d < 2 || a.n == 0 || a.dim_e == 0 {
        return Err(Failure::usage("need d >= 2, n >= 1 and dimE >= 1".into()));
    }
    let dim = a.d.checked_pow(a.n as u32).unwrap_or(usize::MAX);
    if dim.saturating_mul(a.dim_e) > 64 {
        return Err(QcextError::Budget(format!("d^n |E| = {} exceeds 64", dim.saturating_mul(a.dim_e))).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::with_capacity(a.trials);
    let (mut min_slack, mut failures) = (f64::INFINITY, 0usize);
    for i in 0..a.trials {
        let de = 1 + i % a.dim_e;
        let t = [0.0, 0.5, 1.0][i % 3];
        let rho = qcext_core::states::random_test_state(dim, de, t, &mut rng);
        let chk = vn_ur_check(a.d, a.n, &rho)?;
        let slack = chk.lhs_avg - chk.rhs_bound;
        min_slack = min_slack.min(slack);
        if slack < -1e-8 {
            failures += 1;
        }
        rows.push(json!({ "dim_e": de, "lhs": chk.lhs_avg, "rhs": chk.rhs_bound, "slack": slack }));
    }
    let result = json!({
        "pass": failures == 0,
        "trials": a.trials,
        "failures": failures,
        "min_slack": if a.trials > 0 { json!(min_slack) } else { Value::Null },
        "instances": rows,
    });
    emit_json(a.output.out.as_deref(), "ur-check", a, result)
}

fn wse_params(a: &WseParamsArgs) -> Outcome {
    let p = WseParams::new(a.n, a.nu, a.eps, a.delta_prime)?;
    let mut result = json!({
        "kappa": p.kappa,
        "xi": p.xi,
        "rate_limit": log3_minus_1(),
    });
    match a.gamma {
        None => match wse_lambda_bounded(a.n, a.nu, a.eps, a.delta_prime) {
            Ok(l) => {
                result["lambda"] = json!(l);
                result["valid"] = json!(l > 0.0);
            }
            Err(QcextError::NoSecurity(reason)) => {
                result["lambda"] = Value::Null;
                result["valid"] = json!(false);
                result["reason"] = json!(reason);
            }
            Err(e) => return Err(e.into()),
        },
        Some(gamma) => {
            let l = wse_lambda_strong_converse(a.n, a.nu, gamma, a.eps, a.delta_prime)?;
            let regime = wse_regime(a.n, a.nu, gamma, p.kappa);
            result["lambda"] = json!(l);
            result["valid"] = json!(l > 0.0);
            result["regime"] = to_value(&regime)?;
        }
    }
    emit_json(a.output.out.as_deref(), "wse-params", a, result)
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

fn wse_simulate(a: &WseSimulateArgs) -> Outcome {
    if a.n == 0 || a.samples == 0 {
        return Err(Failure::usage("n and samples must be at least 1".into()));
    }
    let ts = simulate_wse_batch(a.n, a.samples, a.seed);
    if let Some(path) = &a.transcripts {
        let header = ["index", "x", "theta", "theta_tilde", "bob", "matched", "x_matched"];
        let rows = ts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let matched: Vec<String> = t.matched.iter().map(usize::to_string).collect();
                vec![
                    i.to_string(),
                    bits(&t.x),
                    bits(&t.theta),
                    bits(&t.theta_tilde),
                    bits(&t.bob_outcomes),
                    matched.join(" "),
                    bits(&t.x_matched),
                ]
            })
            .collect();
        emit_csv(Some(path), "wse-simulate", a, &header, rows)?;
    }
    let summary = summarize_wse(&ts);
    let mut result = to_value(&summary)?;
    result["match_rate_within_3sigma"] =
        json!((summary.match_rate - 1.0 / 3.0).abs() <= 3.0 * summary.match_rate_sigma);
    emit_json(a.output.out.as_deref(), "wse-simulate", a, result)
}
