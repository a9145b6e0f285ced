//! Fidelity estimators built from single-shot procedures: α-DFE, FOFE and
//! NLDFE, plus aggregation and a deterministic parallel runner.

mod dfe;
mod fofe;
mod nldfe;

pub use dfe::{dfe_exact_expectation, dfe_shot, parity_distribution, DfePath};
pub use fofe::{
    controlled_pauli_layout, fofe_exact_expectation, fofe_multi_target, fofe_shot, FofeContext,
};
pub use nldfe::{
    build_qwc_partition, nldfe_exact_expectation, nldfe_shot, FrameOrdering, QWCGroup,
    QWCPartition, NLDFE_MAX_QUBITS,
};

use crate::error::{invalid, Result};
use crate::magic::dfe_variance_bound;
use crate::pauli::{pauli_coefficients, PauliPoint};
use crate::rng::{stream, StreamRng};
use crate::samplers::{exact_sampler, uniform_x_sampler, PhasePointSampler};
use crate::states::{exact_fidelity, phase_strip, DensityState, StateVector};
use crate::stats::{mean_variance, median};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which half of a FOFE shot produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Single,
    Real,
    Imag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub value: f64,
    /// Sampled phase point (DFE, FOFE).
    pub point: Option<PauliPoint>,
    /// Sampled group (NLDFE).
    pub group: Option<usize>,
    /// Per-branch contributions and raw outcome words; the ancilla bit of a
    /// FOFE branch is stored separately from the system word.
    pub branches: Vec<BranchOutcome>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchOutcome {
    pub branch: Branch,
    pub value: f64,
    pub ancilla: Option<bool>,
    pub bits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub scheme: String,
    pub shots: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    /// Median of `batches` means over consecutive batches of `batch_size`.
    pub mom: f64,
    pub batch_size: usize,
    pub batches: usize,
    pub exact_fidelity: Option<f64>,
    /// Analytic bound on the single-shot second moment of the scheme.
    pub variance_bound: Option<f64>,
    pub max_abs_shot: f64,
    pub circuit_executions: usize,
    pub health_warnings: usize,
}

impl EstimateReport {
    /// Summarizes shot values; `batches = 1` gives the plain mean as MOM.
    pub fn from_values(scheme: &str, values: &[f64], batches: usize) -> Result<Self> {
        if values.is_empty() {
            return invalid("no shots to summarize");
        }
        let batches = batches.max(1);
        let batch_size = values.len() / batches;
        let (mean, variance) = mean_variance(values);
        Ok(Self {
            scheme: scheme.to_string(),
            shots: values.len(),
            mean,
            variance,
            stderr: (variance / values.len() as f64).sqrt(),
            mom: median_of_means(values, batch_size, batches)?,
            batch_size,
            batches,
            exact_fidelity: None,
            variance_bound: None,
            max_abs_shot: values.iter().fold(0.0, |m, v| m.max(v.abs())),
            circuit_executions: values.len(),
            health_warnings: 0,
        })
    }
}

/// Median of `k` means over consecutive batches of `n` values.
pub fn median_of_means(values: &[f64], n: usize, k: usize) -> Result<f64> {
    if n == 0 || k == 0 {
        return invalid("batch size and batch count must be positive");
    }
    if values.len() < n * k {
        return invalid(format!("need {} values for {k} batches of {n}, got {}", n * k, values.len()));
    }
    let means: Vec<f64> = values
        .chunks_exact(n)
        .take(k)
        .map(|b| b.iter().sum::<f64>() / n as f64)
        .collect();
    Ok(median(&means))
}

/// Shots executed per RNG stream. Fixed, so the output depends only on the
/// seed and never on the number of worker threads.
pub const SHOTS_PER_STREAM: usize = 64;

/// Runs `shots` independent shots in parallel, in a fixed order.
pub fn run_shots<T, F>(shots: usize, seed: u64, shot: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut StreamRng) -> Result<T> + Sync,
{
    if shots == 0 {
        return invalid("shot count must be positive");
    }
    let chunks = shots.div_ceil(SHOTS_PER_STREAM);
    let nested: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u64);
            let count = SHOTS_PER_STREAM.min(shots - c * SHOTS_PER_STREAM);
            (0..count).map(|_| shot(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(shots);
    for chunk in nested {
        out.extend(chunk?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    Dfe { alpha: f64, path: DfePath },
    Fofe { alpha: f64 },
    Nldfe { ordering: FrameOrdering },
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::Dfe { alpha, .. } => format!("dfe(alpha={alpha})"),
            Scheme::Fofe { alpha } => format!("fofe(alpha={alpha})"),
            Scheme::Nldfe { ordering } => format!("nldfe({ordering:?})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub shots: usize,
    /// Median-of-means batch count; one means the plain mean.
    pub batches: usize,
    pub seed: u64,
}

/// Sampler over the phase-stripped target: the uniform X sampler when the
/// stripped state is `|+⟩^{⊗n}`, otherwise the enumerated table.
pub fn stripped_sampler(
    stripped: &StateVector<f64>,
    alpha: f64,
) -> Result<PhasePointSampler> {
    let n = stripped.n();
    if stripped.distance(&StateVector::plus(n)) < 1e-12 {
        let mut s = uniform_x_sampler(n)?;
        if alpha != 0.5 {
            // Uniform magnitudes make the ℓ₂ and ℓ₁ distributions coincide;
            // only the weight normalization differs.
            s = exact_sampler(&pauli_coefficients(stripped)?, alpha)?;
        }
        return Ok(s);
    }
    exact_sampler(&pauli_coefficients(stripped)?, alpha)
}

/// End-to-end estimate of `⟨ψ|ρ|ψ⟩` with one of the three schemes.
pub fn run_estimator(
    scheme: &Scheme,
    target: &StateVector<f64>,
    rho: &DensityState<f64>,
    cfg: &RunConfig,
) -> Result<EstimateReport> {
    Ok(run_estimator_values(scheme, target, rho, cfg)?.0)
}

/// [`run_estimator`] that also hands back the per-shot values in shot order.
pub fn run_estimator_values(
    scheme: &Scheme,
    target: &StateVector<f64>,
    rho: &DensityState<f64>,
    cfg: &RunConfig,
) -> Result<(EstimateReport, Vec<f64>)> {
    if cfg.shots == 0 {
        return invalid("shot count must be positive");
    }
    let (records, bound, executions, warnings) = match *scheme {
        Scheme::Dfe { alpha, path } => {
            let sampler = exact_sampler(&pauli_coefficients(target)?, alpha)?;
            let rec = run_shots(cfg.shots, cfg.seed, |rng| dfe_shot(rho, &sampler, path, rng))?;
            (rec, Some(dfe_variance_bound(target, alpha)?), cfg.shots, 0)
        }
        Scheme::Fofe { alpha } => {
            let (stripped, phase) = phase_strip(target);
            let sampler = stripped_sampler(&stripped, alpha)?;
            let ctx = FofeContext::new(&sampler, &[phase])?;
            let rec = run_shots(cfg.shots, cfg.seed, |rng| {
                Ok(fofe_shot(rho, &ctx, rng)?.remove(0))
            })?;
            let copies = cfg.shots * ctx.branches_per_shot();
            (rec, ctx.second_moment_bound(), copies, sampler.health_warnings())
        }
        Scheme::Nldfe { ordering } => {
            let part = build_qwc_partition(&pauli_coefficients(target)?, ordering)?;
            let rec = run_shots(cfg.shots, cfg.seed, |rng| nldfe_shot(rho, &part, rng))?;
            (rec, Some(part.total_weight.powi(2)), cfg.shots, 0)
        }
    };
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    let mut report = EstimateReport::from_values(&scheme.label(), &values, cfg.batches)?;
    report.exact_fidelity = Some(exact_fidelity(rho, target)?);
    report.variance_bound = bound;
    report.circuit_executions = executions;
    report.health_warnings = warnings;
    Ok((report, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, Pareto};

    #[test]
    fn mom_basics() {
        assert_eq!(median_of_means(&[2.5; 12], 3, 4).unwrap(), 2.5);
        let v = [1.0, 2.0, 3.0, 10.0];
        assert_eq!(median_of_means(&v, 4, 1).unwrap(), 4.0);
        assert!(median_of_means(&v, 3, 2).is_err());
        assert!(median_of_means(&v, 0, 1).is_err());
    }

    #[test]
    fn mom_beats_mean_on_heavy_tails() {
        // Symmetric contamination: 2% of values get a ±50·Pareto(1, 1.5) kick.
        // The true mean stays zero while the plain mean has infinite variance.
        let mut rng = stream(1, 0);
        let pareto = Pareto::new(1.0, 1.5).unwrap();
        let mut wins = 0;
        for _ in 0..1000 {
            let v: Vec<f64> = (0..200)
                .map(|_| {
                    let base: f64 = rand_distr::StandardNormal.sample(&mut rng);
                    if rng.random::<f64>() < 0.02 {
                        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        base + s * 50.0 * pareto.sample(&mut rng)
                    } else {
                        base
                    }
                })
                .collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let mom = median_of_means(&v, 20, 10).unwrap();
            if mom.abs() <= mean.abs() {
                wins += 1;
            }
        }
        assert!(wins >= 600, "MOM won {wins} of 1000");
    }

    #[test]
    fn runner_is_deterministic_across_thread_counts() {
        let f = |rng: &mut StreamRng| -> Result<ShotRecord> {
            Ok(ShotRecord {
                value: rng.random(),
                point: None,
                group: None,
                branches: vec![],
            })
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_shots(1000, 9, f)).unwrap();
        let b = four.install(|| run_shots(1000, 9, f)).unwrap();
        assert_eq!(a, b);
        assert!(run_shots(0, 9, f).is_err());
    }
}
