use super::{rng_for, subseed};
use crate::config::{positive, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::{Cell, ResultTable};
use fidest_core::rng::StreamRng;
use fidest_core::states::{DensityFile, DensityState, StateVector};
use fidest_core::stats::{linear_fit, MeanStderr};
use fidest_core::tomography::{
    fofe_coefficients, mub_family, psd_project, reconstruct, tomography_pipeline,
    MubFamily, MUB_MAX_QUBITS,
};
use rand::Rng;

/// Mixture of a random number of Haar states with random weights.
pub fn random_density(n: usize, rng: &mut StreamRng) -> fidest_core::Result<DensityState<f64>> {
    let rank = 1 + rng.random_range(0..1usize << n);
    let parts: Vec<(f64, StateVector<f64>)> = (0..rank)
        .map(|_| (rng.random::<f64>() + 0.05, StateVector::haar_random(n, rng)))
        .collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    DensityState::mixture(parts.into_iter().map(|(w, s)| (w / total, s)).collect())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Path {
    Direct,
    Fofe,
}

/// (psd-projected error, linear error, reconstruction).
fn one_run(
    rho: &DensityState<f64>,
    fam: &MubFamily,
    path: Path,
    shots: usize,
    seed: u64,
) -> CliResult<(f64, f64, DensityState<f64>)> {
    if path == Path::Direct {
        let r = tomography_pipeline(rho, Some(shots), seed)?;
        return Ok((r.l2_error, r.linear_l2_error, r.state));
    }
    let table = fofe_coefficients(rho, fam, shots, seed)?;
    let truth = rho.to_dense();
    let linear = reconstruct(&table, fam)?;
    let state = psd_project(&linear)?;
    let err = state.to_dense().sub(&truth)?.frobenius_norm();
    Ok((err, linear.sub(&truth)?.frobenius_norm(), state))
}

pub fn cmd_tomography(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let n = cfg.params.n.unwrap_or(2);
    if n == 0 {
        return config_err("--n must be at least 1");
    }
    cap("tomography qubits", n, MUB_MAX_QUBITS)?;
    let ladder = cfg
        .params
        .shot_ladder
        .clone()
        .unwrap_or_else(|| vec![1_000, 3_000, 10_000, 30_000, 100_000]);
    if ladder.is_empty() || ladder.contains(&0) {
        return config_err("--shot-ladder needs positive shot counts");
    }
    let reps = positive("repetitions", cfg.params.repetitions.unwrap_or(10))?;
    let path = match cfg.params.path.as_deref().unwrap_or("direct") {
        "direct" => Path::Direct,
        "fofe" => Path::Fofe,
        other => return config_err(format!("unknown tomography path {other:?}; expected direct or fofe")),
    };

    let rho = random_density(n, &mut rng_for(cfg, 60))?;
    let fam = mub_family(n)?;
    let mut t = ResultTable::new(
        "tomography",
        &["mode", "shots", "repetitions", "mean_l2_error", "l2_stderr", "mean_linear_l2_error"],
    );
    let exact = tomography_pipeline(&rho, None, 0)?;
    t.push(vec![
        "exact".into(),
        Cell::Missing,
        1usize.into(),
        exact.l2_error.into(),
        0.0.into(),
        exact.linear_l2_error.into(),
    ])?;
    let mut last = exact.state;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, &shots) in ladder.iter().enumerate() {
        let mut errs = Vec::with_capacity(reps);
        let mut linear = 0.0;
        for r in 0..reps {
            let seed = subseed(cfg, 1000 * (i as u64 + 1) + r as u64);
            let (e, l, s) = one_run(&rho, &fam, path, shots, seed)?;
            errs.push(e);
            linear += l / reps as f64;
            last = s;
        }
        let s = MeanStderr::from_values(&errs);
        xs.push((shots as f64).ln());
        ys.push(linear.ln());
        t.push(vec![
            (if path == Path::Direct { "direct" } else { "fofe" }).into(),
            shots.into(),
            reps.into(),
            s.mean.into(),
            s.stderr.into(),
            linear.into(),
        ])?;
    }
    if xs.len() >= 2 {
        t.meta("linear_error_slope", linear_fit(&xs, &ys).0);
    }
    if let Some(out) = &cfg.params.state_out {
        std::fs::write(out, DensityFile::from_density(&last).to_json()?)?;
        t.meta("state_out", out.display());
    }
    Ok(t)
}
