//! Experiment runners. Each `cmd_*` validates its settings against module
//! caps first, then computes a [`ResultTable`].

mod estimators;
mod haar;
mod hypergraph;
mod nldfe;
mod samplers;
mod tomography;

pub use estimators::{cmd_fig2a, cmd_norms, cmd_run, FIG2A_FIDELITY};
pub use haar::{cmd_haar_scan, EXACT_L1_MAX_QUBITS, EXACT_STRIPPED_MAX_QUBITS};
pub use hypergraph::{cmd_hypergraph_bounds, rank_counts_sum_to_total, EMPIRICAL_MAX_QUBITS};
pub use nldfe::cmd_nldfe_compare;
pub use samplers::{cmd_dicke, cmd_mps_sample, time_draws, ENUMERATION_MAX_QUBITS};
pub use tomography::cmd_tomography;

use crate::config::{parse_edges, Command, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::ResultTable;
use fidest_core::pauli::COEFF_CAP;
use fidest_core::rng::{stream, StreamRng};
use fidest_core::states::{
    complete_hypergraph_edges, depolarize, depolarizing_for_fidelity, hypergraph_state,
    mps_to_statevector, phase_state, random_real_mps, random_real_stabilizer, DensityState,
    PhaseFunction, StateVector,
};
use rand::Rng;
use std::f64::consts::TAU;

/// Runs the configured experiment and stamps seed and config echo.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let mut table = match cfg.command {
        Command::Fig2a => cmd_fig2a(cfg)?,
        Command::HaarScan => cmd_haar_scan(cfg)?,
        Command::NldfeCompare => cmd_nldfe_compare(cfg)?,
        Command::HypergraphBounds => cmd_hypergraph_bounds(cfg)?,
        Command::Run => cmd_run(cfg)?,
        Command::Tomography => cmd_tomography(cfg)?,
        Command::MpsSample => cmd_mps_sample(cfg)?,
        Command::Dicke => cmd_dicke(cfg)?,
        Command::Norms => cmd_norms(cfg)?,
    };
    let mut head = vec![
        ("seed".to_string(), cfg.seed().to_string()),
        ("config".to_string(), cfg.echo()),
    ];
    head.append(&mut table.metadata);
    table.metadata = head;
    Ok(table)
}

/// Independent RNG stream for one part of an experiment.
pub(crate) fn rng_for(cfg: &ExperimentConfig, tag: u64) -> StreamRng {
    stream(cfg.seed(), tag)
}

/// Sub-seed for APIs that take a seed and fan out their own streams.
pub(crate) fn subseed(cfg: &ExperimentConfig, tag: u64) -> u64 {
    rng_for(cfg, tag).random()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TargetKind {
    Hypergraph,
    Haar,
    Dicke,
    Phase,
    Stabilizer,
    Mps,
    Plus,
}

impl TargetKind {
    pub(crate) fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "hypergraph" => Self::Hypergraph,
            "haar" => Self::Haar,
            "dicke" => Self::Dicke,
            "phase" => Self::Phase,
            "stabilizer" => Self::Stabilizer,
            "mps" => Self::Mps,
            "plus" => Self::Plus,
            other => {
                return config_err(format!(
                    "unknown target {other:?}; expected hypergraph, haar, dicke, phase, stabilizer, mps or plus"
                ))
            }
        })
    }
}

/// Target state plus a human-readable description.
pub(crate) struct Target {
    pub state: StateVector<f64>,
    pub label: String,
}

pub(crate) fn hyperedges(cfg: &ExperimentConfig, n: usize) -> CliResult<Vec<Vec<usize>>> {
    match &cfg.params.edges {
        Some(e) => parse_edges(e),
        None => Ok(complete_hypergraph_edges(n, 3)),
    }
}

/// Caps shared by every dense-target command.
pub(crate) fn check_dense_qubits(n: usize) -> CliResult<()> {
    if n == 0 {
        return config_err("--n must be at least 1");
    }
    cap("dense target qubits", n, COEFF_CAP)
}

pub(crate) fn build_target(
    cfg: &ExperimentConfig,
    kind: TargetKind,
    n: usize,
    rng: &mut StreamRng,
) -> CliResult<Target> {
    let (state, label) = match kind {
        TargetKind::Hypergraph => {
            let edges = hyperedges(cfg, n)?;
            let label = match &cfg.params.edges {
                Some(e) => format!("hypergraph({e})"),
                None => format!("complete 3-uniform hypergraph K{n}"),
            };
            (hypergraph_state(n, &edges)?.0, label)
        }
        TargetKind::Haar => (StateVector::haar_random(n, rng), "Haar random".to_string()),
        TargetKind::Dicke => {
            let k = cfg.params.k.unwrap_or(n / 2);
            (StateVector::dicke(n, k)?, format!("Dicke({n},{k})"))
        }
        TargetKind::Phase => {
            let angles = (0..1usize << n).map(|_| rng.random::<f64>() * TAU).collect();
            (phase_state(&PhaseFunction::table(n, angles)?)?, "random phase state".to_string())
        }
        TargetKind::Stabilizer => (
            random_real_stabilizer(n, 10 * n, rng)?,
            "random real stabilizer".to_string(),
        ),
        TargetKind::Mps => {
            let chi = cfg.params.chi.unwrap_or(2);
            let m = random_real_mps::<f64, _>(n, chi, rng)?;
            (mps_to_statevector(&m)?, format!("random real MPS chi={chi}"))
        }
        TargetKind::Plus => (StateVector::plus(n), "|+>^n".to_string()),
    };
    Ok(Target { state, label })
}

/// Depolarizing strength from `--p`, else from `--fidelity`, else the default fidelity.
pub(crate) fn depolarizing_p(cfg: &ExperimentConfig, n: usize, default_fidelity: f64) -> CliResult<f64> {
    let p = match (cfg.params.p, cfg.params.fidelity) {
        (Some(p), _) => p,
        (None, f) => depolarizing_for_fidelity(n, f.unwrap_or(default_fidelity))?,
    };
    if !(0.0..=1.0).contains(&p) {
        return config_err(format!("depolarizing probability {p} outside [0, 1]"));
    }
    Ok(p)
}

pub(crate) fn noisy_input(target: &StateVector<f64>, p: f64) -> CliResult<DensityState<f64>> {
    Ok(depolarize(target, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Params;

    fn cfg(params: Params) -> ExperimentConfig {
        ExperimentConfig::new(Command::Run, params)
    }

    #[test]
    fn every_target_kind_builds() {
        let c = cfg(Params::default());
        let mut rng = rng_for(&c, 0);
        for name in ["hypergraph", "haar", "dicke", "phase", "stabilizer", "mps", "plus"] {
            let t = build_target(&c, TargetKind::parse(name).unwrap(), 4, &mut rng).unwrap();
            assert!((t.state.norm_sqr() - 1.0).abs() < 1e-9, "{name}");
        }
        assert!(TargetKind::parse("ghz").is_err());
    }

    #[test]
    fn depolarizing_precedence() {
        let c = cfg(Params { p: Some(0.3), fidelity: Some(0.9), ..Default::default() });
        assert_eq!(depolarizing_p(&c, 3, 0.5).unwrap(), 0.3);
        let c = cfg(Params { fidelity: Some(1.0), ..Default::default() });
        assert_eq!(depolarizing_p(&c, 3, 0.5).unwrap(), 0.0);
        let c = cfg(Params { p: Some(1.5), ..Default::default() });
        assert!(depolarizing_p(&c, 3, 0.5).is_err());
    }
}
