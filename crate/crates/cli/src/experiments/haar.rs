use super::subseed;
use crate::config::{positive, range, ExperimentConfig};
use crate::error::{cap, config_err, CliResult};
use crate::table::ResultTable;
use fidest_core::magic::{
    haar_l1_asymptote, haar_l1_mean_closed_form, haar_l1_monte_carlo, haar_stripped_l1_estimate,
    haar_stripped_l1_monte_carlo, StrippedPrefactor, DIRICHLET_MAX_QUBITS,
};

/// Largest n averaged with exact ℓ₁ norms.
pub const EXACT_L1_MAX_QUBITS: usize = 8;
/// Largest n whose stripped norm is averaged exactly rather than estimated.
pub const EXACT_STRIPPED_MAX_QUBITS: usize = 6;
/// Only rows with at least this many qubits enter the prefactor fit.
const FIT_MIN_QUBITS: usize = 4;

fn prefactor(cfg: &ExperimentConfig) -> CliResult<StrippedPrefactor> {
    match cfg.params.prefactor.as_deref().unwrap_or("classcount") {
        "classcount" => Ok(StrippedPrefactor::ClassCount),
        "rederived" => Ok(StrippedPrefactor::Rederived),
        "literal" => Ok(StrippedPrefactor::Literal),
        other => config_err(format!("unknown prefactor {other:?}; expected classcount, rederived or literal")),
    }
}

/// Least-squares `A` in `y ≈ A·2^{n/2}`.
pub(crate) fn fit_prefactor(points: &[(usize, f64)]) -> Option<f64> {
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(n, y)| {
        let s = (n as f64 / 2.0).exp2();
        (a + y * s, b + s * s)
    });
    (den > 0.0).then(|| num / den)
}

pub fn cmd_haar_scan(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let (lo, hi) = range(cfg, 1, 16)?;
    if lo == 0 {
        return config_err("--n-min must be at least 1");
    }
    cap("Haar scan qubits", hi, DIRICHLET_MAX_QUBITS)?;
    let samples = positive("samples", cfg.params.samples.unwrap_or(10_000))?;
    let exact_samples = positive("exact-samples", cfg.params.exact_samples.unwrap_or(100))?;
    let pf = prefactor(cfg)?;

    let mut t = ResultTable::new(
        "haar-scan",
        &[
            "n",
            "l1_closed_form",
            "l1_monte_carlo",
            "l1_mc_stderr",
            "l1_scaled",
            "l1_asymptote",
            "stripped_l1",
            "stripped_stderr",
            "stripped_method",
            "ratio",
            "dominant_ratio",
            "dominant_stderr",
        ],
    );
    let mut fit = Vec::new();
    for n in lo..=hi {
        let closed = haar_l1_mean_closed_form(n)?;
        let mc = if n <= EXACT_L1_MAX_QUBITS {
            Some(haar_l1_monte_carlo(n, exact_samples, subseed(cfg, 100 + n as u64))?)
        } else {
            None
        };
        if let (Some(m), true) = (&mc, n >= FIT_MIN_QUBITS) {
            fit.push((n, m.mean));
        }
        let dirichlet = if n >= 2 {
            Some(haar_stripped_l1_estimate(n, samples, subseed(cfg, 200 + n as u64), pf)?)
        } else {
            None
        };
        let (stripped, method) = if n <= EXACT_STRIPPED_MAX_QUBITS {
            (haar_stripped_l1_monte_carlo(n, exact_samples, subseed(cfg, 300 + n as u64))?, "exact")
        } else {
            (dirichlet.as_ref().expect("n ≥ 2").total, "dirichlet")
        };
        t.push(vec![
            n.into(),
            closed.into(),
            mc.map(|m| m.mean).into(),
            mc.map(|m| m.stderr).into(),
            (closed / (n as f64 / 2.0).exp2()).into(),
            haar_l1_asymptote(n).into(),
            stripped.mean.into(),
            stripped.stderr.into(),
            method.into(),
            (stripped.mean / closed).into(),
            dirichlet.as_ref().map(|d| d.dominant.mean / closed).into(),
            dirichlet.as_ref().map(|d| d.dominant.stderr / closed).into(),
        ])?;
    }
    t.meta("prefactor", format!("{pf:?}"));
    t.meta("exact_samples", exact_samples);
    t.meta("dirichlet_samples", samples);
    t.meta("fit_prefactor", fit_prefactor(&fit).map_or_else(String::new, |a| a.to_string()));
    Ok(t)
}
