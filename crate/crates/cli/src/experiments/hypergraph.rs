use super::{rng_for, subseed};
use crate::config::{positive, range, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::ResultTable;
use fidest_core::estimation::{run_estimator_values, DfePath, RunConfig, Scheme};
use fidest_core::magic::{
    complete3_variance_bounds, hollow_symmetric_rank_count, hypergraph_variance_bounds, HypergraphPoly,
};
use fidest_core::states::{complete_hypergraph_edges, hypergraph_state, DensityState};
use num_bigint::BigUint;
use rand::Rng;

/// Largest n for the shot-based 1/2-DFE second moment on K_n.
pub const EMPIRICAL_MAX_QUBITS: usize = 7;
/// Largest n for the exact ℓ₁ of K_n (enumerates all 2^n directions).
const EXACT_L1_MAX_QUBITS: usize = 16;
const MAX_VERTICES: usize = 64;

/// `Σ_h N(n, 2h) = 2^{n(n−1)/2}`.
pub fn rank_counts_sum_to_total(n: usize) -> CliResult<bool> {
    let mut sum = BigUint::from(0u8);
    for r in 0..=n {
        sum += hollow_symmetric_rank_count(n, r)?;
    }
    Ok(sum == BigUint::from(1u8) << (n * n.saturating_sub(1) / 2))
}

pub fn cmd_hypergraph_bounds(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let (lo, hi) = range(cfg, 3, 10)?;
    if lo < 3 {
        return config_err("3-uniform hypergraphs need --n-min ≥ 3");
    }
    cap("hypergraph vertices", hi, MAX_VERTICES)?;
    let samples = positive("samples", cfg.params.samples.unwrap_or(2000))?;
    let shots = positive("shots", cfg.params.shots.unwrap_or(100_000))?;

    let mut t = ResultTable::new(
        "hypergraph-bounds",
        &[
            "n",
            "rank_sum_ok",
            "sampled_lower",
            "sampled_upper",
            "complete_lower",
            "complete_upper",
            "complete_norm_lower",
            "complete_norm_upper",
            "exact_l1_squared",
            "empirical_second_moment",
            "empirical_stderr",
            "bracketed",
        ],
    );
    for n in lo..=hi {
        let mut rng = rng_for(cfg, 40 + n as u64);
        let random_edges: Vec<Vec<usize>> = complete_hypergraph_edges(n, 3)
            .into_iter()
            .filter(|_| rng.random::<bool>())
            .collect();
        let sampled = hypergraph_variance_bounds(&HypergraphPoly::new(n, &random_edges)?, samples, &mut rng)?;
        let complete = complete3_variance_bounds(n)?;
        let (norm_lo, norm_hi) = complete.normalized(n);
        let edges = complete_hypergraph_edges(n, 3);
        let exact = (n <= EXACT_L1_MAX_QUBITS).then(|| HypergraphPoly::new(n, &edges).map(|p| p.exact_l1().powi(2)));
        let exact = exact.transpose()?;
        let (m2, se) = if n <= EMPIRICAL_MAX_QUBITS {
            let (psi, _) = hypergraph_state::<f64>(n, &edges)?;
            let rho = DensityState::pure(psi.clone());
            let run = RunConfig { shots, batches: 1, seed: subseed(cfg, 50 + n as u64) };
            let (_, values) = run_estimator_values(&Scheme::Dfe { alpha: 0.5, path: DfePath::Frame }, &psi, &rho, &run)?;
            let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
            let s = fidest_core::stats::MeanStderr::from_values(&sq);
            (Some(s.mean), Some(s.stderr))
        } else {
            (None, None)
        };
        let bracketed = m2.zip(se).map(|(m, s)| complete.contains(m, 3.0 * s));
        t.push(vec![
            n.into(),
            rank_counts_sum_to_total(n)?.into(),
            sampled.lower.into(),
            sampled.upper.into(),
            complete.lower.into(),
            complete.upper.into(),
            norm_lo.into(),
            norm_hi.into(),
            exact.into(),
            m2.into(),
            se.into(),
            bracketed.into(),
        ])?;
    }
    t.meta("rank_samples", samples);
    t.meta("shots", shots);
    Ok(t)
}
