//! Estimator-facing commands: the FOFE/DFE comparison, single runs and norms.

use super::{
    build_target, check_dense_qubits, depolarizing_p, noisy_input, rng_for, subseed, Target,
    TargetKind,
};
use crate::config::{positive, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::ResultTable;
use fidest_core::estimation::{
    run_estimator_values, DfePath, FrameOrdering, RunConfig, Scheme, NLDFE_MAX_QUBITS,
};
use fidest_core::magic::{dfe_variance_bound, norms};
use fidest_core::pauli::COEFF_CAP;
use fidest_core::states::StateFile;

/// Fidelity of the depolarized input in the reference FOFE/DFE comparison.
pub const FIG2A_FIDELITY: f64 = 0.8955;

fn alpha(cfg: &ExperimentConfig) -> CliResult<f64> {
    let a = cfg.params.alpha.unwrap_or(0.5);
    if a != 0.5 && a != 1.0 {
        return config_err(format!("--alpha must be 0.5 or 1, got {a}"));
    }
    Ok(a)
}

pub(crate) fn scheme(cfg: &ExperimentConfig, default: &str) -> CliResult<Scheme> {
    let alpha = alpha(cfg)?;
    Ok(match cfg.params.scheme.as_deref().unwrap_or(default) {
        "dfe" => Scheme::Dfe {
            alpha,
            path: match cfg.params.path.as_deref().unwrap_or("frame") {
                "frame" => DfePath::Frame,
                "bernoulli" => DfePath::Bernoulli,
                other => return config_err(format!("unknown DFE path {other:?}; expected frame or bernoulli")),
            },
        },
        "fofe" => Scheme::Fofe { alpha },
        "nldfe" => Scheme::Nldfe { ordering: ordering(cfg)? },
        other => return config_err(format!("unknown scheme {other:?}; expected dfe, fofe or nldfe")),
    })
}

pub(crate) fn ordering(cfg: &ExperimentConfig) -> CliResult<FrameOrdering> {
    match cfg.params.ordering.as_deref().unwrap_or("greedy") {
        "greedy" => Ok(FrameOrdering::GreedyWeight),
        "canonical" => Ok(FrameOrdering::Canonical),
        other => config_err(format!("unknown ordering {other:?}; expected greedy or canonical")),
    }
}

const REPORT_COLUMNS: [&str; 10] = [
    "mean",
    "stderr",
    "variance",
    "mom",
    "min_shot",
    "max_shot",
    "exact_fidelity",
    "variance_bound",
    "circuit_executions",
    "health_warnings",
];

pub fn cmd_fig2a(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let n = cfg.params.n.unwrap_or(7);
    check_dense_qubits(n)?;
    if cfg.params.edges.is_none() && n < 3 {
        return config_err("the complete 3-uniform target needs --n ≥ 3");
    }
    let shots = positive("shots", cfg.params.shots.unwrap_or(5000))?;
    let batches = positive("batches", cfg.params.batches.unwrap_or(1))?;
    let alpha = alpha(cfg)?;
    let p = depolarizing_p(cfg, n, FIG2A_FIDELITY)?;

    let Target { state, label } = build_target(cfg, TargetKind::Hypergraph, n, &mut rng_for(cfg, 0))?;
    let rho = noisy_input(&state, p)?;
    let mut cols = vec!["scheme", "shots", "all_plus_minus_one"];
    cols.extend(REPORT_COLUMNS);
    let mut t = ResultTable::new("fig2a", &cols);
    t.meta("target", &label);
    t.meta("depolarizing_p", p);
    let mut variances = Vec::new();
    for (i, s) in [Scheme::Fofe { alpha }, Scheme::Dfe { alpha, path: DfePath::Frame }].iter().enumerate() {
        let run = RunConfig { shots, batches, seed: subseed(cfg, 1 + i as u64) };
        let (r, values) = run_estimator_values(s, &state, &rho, &run)?;
        let pm1 = values.iter().all(|v| (v.abs() - 1.0).abs() < 1e-12);
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        variances.push(r.variance);
        t.push(vec![
            (if i == 0 { "fofe" } else { "dfe" }).into(),
            shots.into(),
            pm1.into(),
            r.mean.into(),
            r.stderr.into(),
            r.variance.into(),
            r.mom.into(),
            lo.into(),
            hi.into(),
            r.exact_fidelity.into(),
            r.variance_bound.into(),
            r.circuit_executions.into(),
            r.health_warnings.into(),
        ])?;
    }
    t.meta("dfe_over_fofe_variance", variances[1] / variances[0]);
    Ok(t)
}

pub fn cmd_run(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let n = cfg.params.n.unwrap_or(4);
    check_dense_qubits(n)?;
    let kind = TargetKind::parse(cfg.params.target.as_deref().unwrap_or("hypergraph"))?;
    if kind == TargetKind::Hypergraph && cfg.params.edges.is_none() && n < 3 {
        return config_err("the complete 3-uniform target needs --n ≥ 3 (or pass --edges)");
    }
    let scheme = scheme(cfg, "fofe")?;
    if matches!(scheme, Scheme::Nldfe { .. }) {
        cap("NLDFE qubits", n, NLDFE_MAX_QUBITS)?;
    }
    let shots = positive("shots", cfg.params.shots.unwrap_or(10_000))?;
    let batches = positive("batches", cfg.params.batches.unwrap_or(1))?;
    let p = depolarizing_p(cfg, n, 0.9)?;

    let Target { state, label } = build_target(cfg, kind, n, &mut rng_for(cfg, 0))?;
    let rho = noisy_input(&state, p)?;
    let run = RunConfig { shots, batches, seed: subseed(cfg, 1) };
    let (r, values) = run_estimator_values(&scheme, &state, &rho, &run)?;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut cols = vec!["scheme", "target", "n", "shots", "batches"];
    cols.extend(REPORT_COLUMNS);
    let mut t = ResultTable::new("run", &cols);
    t.meta("depolarizing_p", p);
    t.push(vec![
        r.scheme.clone().into(),
        label.into(),
        n.into(),
        shots.into(),
        batches.into(),
        r.mean.into(),
        r.stderr.into(),
        r.variance.into(),
        r.mom.into(),
        lo.into(),
        hi.into(),
        r.exact_fidelity.into(),
        r.variance_bound.into(),
        r.circuit_executions.into(),
        r.health_warnings.into(),
    ])?;
    Ok(t)
}

pub fn cmd_norms(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let alphas = cfg.params.alphas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
        return config_err(format!("Rényi order {a} must be finite and nonnegative"));
    }
    let (state, label) = match &cfg.params.state {
        Some(path) => {
            let psi = StateFile::load(path)?.to_state::<f64>()?;
            cap("state qubits", psi.n(), COEFF_CAP)?;
            (psi, format!("file {}", path.display()))
        }
        None => {
            let n = cfg.params.n.unwrap_or(3);
            check_dense_qubits(n)?;
            let kind = TargetKind::parse(cfg.params.target.as_deref().unwrap_or("hypergraph"))?;
            if kind == TargetKind::Hypergraph && cfg.params.edges.is_none() && n < 3 {
                return config_err("the complete 3-uniform target needs --n ≥ 3 (or pass --edges)");
            }
            let t = build_target(cfg, kind, n, &mut rng_for(cfg, 0))?;
            (t.state, t.label)
        }
    };
    let r = norms(&state, &alphas)?;
    let mut t = ResultTable::new("norms", &["quantity", "value"]);
    t.meta("target", label);
    t.push(vec!["n".into(), r.n.into()])?;
    t.push(vec!["l0".into(), r.l0.into()])?;
    t.push(vec!["l1".into(), r.l1.into()])?;
    t.push(vec!["l2".into(), r.l2.into()])?;
    for (a, m) in &r.sre {
        t.push(vec![format!("sre_alpha_{a}").into(), (*m).into()])?;
    }
    t.push(vec!["dfe_variance_bound_alpha_0.5".into(), dfe_variance_bound(&state, 0.5)?.into()])?;
    t.push(vec!["dfe_variance_bound_alpha_1".into(), dfe_variance_bound(&state, 1.0)?.into()])?;
    Ok(t)
}
