use super::{rng_for, subseed};
use crate::config::{positive, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::ResultTable;
use fidest_core::pauli::pauli_coefficients;
use fidest_core::rng::stream;
use fidest_core::samplers::{
    dicke_sampler, exact_sampler, mps_l2_sampler, total_variation, PhasePointSampler, DICKE_MAX_QUBITS,
};
use fidest_core::states::{mps_to_statevector, random_real_mps, StateVector};
use std::collections::HashSet;
use std::time::Instant;

/// Largest n for `--verify` (all 4^n points are enumerated).
pub const ENUMERATION_MAX_QUBITS: usize = 8;
const MPS_MAX_QUBITS: usize = 64;
const MPS_MAX_CHI: usize = 64;
const VERIFY_MAX_CHI: usize = 8;

/// Distinct points and mean |coefficient| over `samples` draws.
fn draw_summary(s: &PhasePointSampler, samples: usize, seed: u64) -> (usize, f64) {
    let mut rng = stream(seed, 0);
    let mut seen = HashSet::new();
    let mut acc = 0.0;
    for _ in 0..samples {
        let d = s.draw(&mut rng);
        seen.insert((d.point.ax(), d.point.az()));
        acc += d.coeff.abs();
    }
    (seen.len(), acc / samples as f64)
}

/// Nanoseconds per draw, best of three passes.
pub fn time_draws(s: &PhasePointSampler, samples: usize, seed: u64) -> f64 {
    (0..3)
        .map(|pass| {
            let mut rng = stream(seed, pass);
            let start = Instant::now();
            let mut sink = 0u64;
            for _ in 0..samples {
                sink ^= s.draw(&mut rng).point.ax();
            }
            std::hint::black_box(sink);
            start.elapsed().as_nanos() as f64 / samples as f64
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn cmd_mps_sample(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let n = cfg.params.n.unwrap_or(6);
    let chi = cfg.params.chi.unwrap_or(4);
    if n == 0 || chi == 0 {
        return config_err("--n and --chi must be positive");
    }
    cap("MPS qubits", n, MPS_MAX_QUBITS)?;
    cap("MPS bond dimension", chi, MPS_MAX_CHI)?;
    let verify = cfg.params.verify;
    if verify {
        cap("--verify qubits", n, ENUMERATION_MAX_QUBITS)?;
        cap("--verify bond dimension", chi, VERIFY_MAX_CHI)?;
    }
    let samples = positive("samples", cfg.params.samples.unwrap_or(1000))?;

    let mps = random_real_mps::<f64, _>(n, chi, &mut rng_for(cfg, 0))?;
    let sampler = mps_l2_sampler(&mps)?;
    let (distinct, mean_abs) = draw_summary(&sampler, samples, subseed(cfg, 1));
    let tv = if verify {
        let psi = mps_to_statevector(&mps)?;
        Some(total_variation(&sampler, &exact_sampler(&pauli_coefficients(&psi)?, 1.0)?)?)
    } else {
        None
    };
    let timing = cfg.params.timing.then(|| time_draws(&sampler, samples, subseed(cfg, 2)));
    let mut t = ResultTable::new(
        "mps-sample",
        &["n", "chi", "samples", "distinct_points", "mean_abs_coeff", "drift_warnings", "tv_vs_enumeration", "draw_ns"],
    );
    t.push(vec![
        n.into(),
        chi.into(),
        samples.into(),
        distinct.into(),
        mean_abs.into(),
        sampler.health_warnings().into(),
        tv.into(),
        timing.into(),
    ])?;
    Ok(t)
}

pub fn cmd_dicke(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let n = cfg.params.n.unwrap_or(8);
    if n == 0 {
        return config_err("--n must be positive");
    }
    cap("Dicke qubits", n, DICKE_MAX_QUBITS)?;
    let k = cfg.params.k.unwrap_or(if n >= 4 { 2 } else { n / 2 });
    if k > n / 2 {
        return config_err(format!(
            "--k {k} exceeds n/2; Dic(n,k) is Dic(n,n−k) with every qubit flipped, so use k = {}",
            n - k
        ));
    }
    let verify = cfg.params.verify;
    if verify {
        cap("--verify qubits", n, ENUMERATION_MAX_QUBITS)?;
    }
    let samples = positive("samples", cfg.params.samples.unwrap_or(1000))?;

    let sampler = dicke_sampler(n, k)?;
    let (distinct, mean_abs) = draw_summary(&sampler, samples, subseed(cfg, 1));
    let (l1_enum, tv) = if verify {
        let c = pauli_coefficients(&StateVector::<f64>::dicke(n, k)?)?;
        let tv = total_variation(&sampler, &exact_sampler(&c, 0.5)?)?;
        (Some(c.l1_norm()), Some(tv))
    } else {
        (None, None)
    };
    let timing = cfg.params.timing.then(|| time_draws(&sampler, samples, subseed(cfg, 2)));
    let mut t = ResultTable::new(
        "dicke",
        &["n", "k", "l1", "l1_enumerated", "samples", "distinct_points", "mean_abs_coeff", "tv_vs_enumeration", "draw_ns"],
    );
    t.push(vec![
        n.into(),
        k.into(),
        sampler.normalizer().into(),
        l1_enum.into(),
        samples.into(),
        distinct.into(),
        mean_abs.into(),
        tv.into(),
        timing.into(),
    ])?;
    Ok(t)
}
