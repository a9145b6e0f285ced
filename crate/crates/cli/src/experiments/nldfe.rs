use super::estimators::ordering;
use super::{depolarizing_p, noisy_input, rng_for, subseed};
use crate::config::{positive, range, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::ResultTable;
use fidest_core::estimation::{
    build_qwc_partition, run_estimator, DfePath, RunConfig, Scheme, NLDFE_MAX_QUBITS,
};
use fidest_core::magic::norms_from_coeffs;
use fidest_core::pauli::pauli_coefficients;
use fidest_core::rng::stream;
use fidest_core::states::{random_real_stabilizer, StateVector};
use rayon::prelude::*;

pub fn cmd_nldfe_compare(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let (lo, hi) = range(cfg, 3, 6)?;
    if lo == 0 {
        return config_err("--n-min must be at least 1");
    }
    cap("NLDFE qubits", hi, NLDFE_MAX_QUBITS)?;
    let samples = positive("samples", cfg.params.samples.unwrap_or(100))?;
    let shots = positive("shots", cfg.params.shots.unwrap_or(2000))?;
    let order = ordering(cfg)?;

    let mut t = ResultTable::new(
        "nldfe-compare",
        &[
            "n",
            "samples",
            "mean_l1",
            "mean_w",
            "improvement",
            "max_w_minus_l1",
            "stabilizer_w",
            "nldfe_variance",
            "dfe_variance",
        ],
    );
    t.meta("ordering", format!("{order:?}"));
    for n in lo..=hi {
        let seed = subseed(cfg, 10 + n as u64);
        let pairs = (0..samples)
            .into_par_iter()
            .map(|s| {
                let psi = StateVector::<f64>::haar_random(n, &mut stream(seed, s as u64));
                let c = pauli_coefficients(&psi)?;
                let l1 = norms_from_coeffs(&c, &[])?.l1;
                Ok((l1, build_qwc_partition(&c, order)?.total_weight))
            })
            .collect::<fidest_core::Result<Vec<(f64, f64)>>>()?;
        let mean_l1 = pairs.iter().map(|p| p.0).sum::<f64>() / samples as f64;
        let mean_w = pairs.iter().map(|p| p.1).sum::<f64>() / samples as f64;
        let worst = pairs.iter().map(|(l, w)| w - l).fold(f64::NEG_INFINITY, f64::max);

        let mut rng = rng_for(cfg, 20 + n as u64);
        let stab = random_real_stabilizer::<f64, _>(n, 10 * n, &mut rng)?;
        let stab_w = build_qwc_partition(&pauli_coefficients(&stab)?, order)?.total_weight;

        let target = StateVector::<f64>::haar_random(n, &mut rng);
        let rho = noisy_input(&target, depolarizing_p(cfg, n, 0.9)?)?;
        let run = RunConfig { shots, batches: 1, seed: subseed(cfg, 30 + n as u64) };
        let nl = run_estimator(&Scheme::Nldfe { ordering: order }, &target, &rho, &run)?;
        let dfe = run_estimator(&Scheme::Dfe { alpha: 0.5, path: DfePath::Frame }, &target, &rho, &run)?;
        t.push(vec![
            n.into(),
            samples.into(),
            mean_l1.into(),
            mean_w.into(),
            (mean_l1 / mean_w).into(),
            worst.into(),
            stab_w.into(),
            nl.variance.into(),
            dfe.variance.into(),
        ])?;
    }
    Ok(t)
}
