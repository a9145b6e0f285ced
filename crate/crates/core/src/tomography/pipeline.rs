//! Coefficient estimation, linear reconstruction and the full tomography
//! chain.

use super::mub::{MubFamily, MUB_MAX_QUBITS};
use super::projection::{psd_project, simplex_project};
use crate::error::{check_dim, invalid, Error, Result};
use crate::estimation::fofe_multi_target;
use crate::linalg::CMatrix;
use crate::rng::stream;
use crate::samplers::uniform_x_sampler;
use crate::states::{phase_strip, DensityState};
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

/// Per-basis rows of estimated Born probabilities, raw and simplex-projected.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub raw: Vec<Vec<f64>>,
    pub projected: Vec<Vec<f64>>,
}

impl CoefficientTable {
    fn from_raw(raw: Vec<Vec<f64>>) -> Result<Self> {
        let projected = raw.iter().map(|r| simplex_project(r)).collect::<Result<_>>()?;
        Ok(Self { raw, projected })
    }
}

#[derive(Clone, Debug)]
pub struct TomographyResult {
    pub state: DensityState<f64>,
    /// `‖ρ̂ − ρ‖₂` after the PSD projection.
    pub l2_error: f64,
    /// Same distance for the linear reconstruction before the PSD projection.
    pub linear_l2_error: f64,
}

fn check_family(rho: &DensityState<f64>, fam: &MubFamily) -> Result<()> {
    check_dim(fam.n, rho.n())
}

/// Infinite-statistics rows `⟨φ|ρ|φ⟩`.
pub fn exact_coefficients(rho: &DensityState<f64>, fam: &MubFamily) -> Result<CoefficientTable> {
    check_family(rho, fam)?;
    let raw = fam.bases.iter().map(|b| b.probabilities(rho)).collect::<Result<_>>()?;
    CoefficientTable::from_raw(raw)
}

/// Multinomial counts drawn as a chain of conditional binomials.
fn multinomial(probs: &[f64], shots: u64, rng: &mut impl rand::Rng) -> Result<Vec<u64>> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        let k = if i + 1 == probs.len() || left == 0 {
            left
        } else {
            let q = (p.max(0.0) / mass).clamp(0.0, 1.0);
            Binomial::new(left, q)
                .map_err(|e| Error::Numerical(format!("binomial parameter {q}: {e}")))?
                .sample(rng)
        };
        out.push(k);
        left -= k;
        mass -= p.max(0.0);
        if mass <= 0.0 {
            mass = f64::MIN_POSITIVE;
        }
    }
    Ok(out)
}

/// Measures `ρ` `shots` times in every basis; basis `b` draws from stream `b`
/// of `seed`, so the table does not depend on the thread count.
pub fn estimate_coefficients(
    rho: &DensityState<f64>,
    fam: &MubFamily,
    shots: usize,
    seed: u64,
) -> Result<CoefficientTable> {
    if shots == 0 {
        return invalid("need at least one shot per basis");
    }
    check_family(rho, fam)?;
    let raw = fam
        .bases
        .par_iter()
        .enumerate()
        .map(|(b, basis)| {
            let probs = basis.probabilities(rho)?;
            let counts = multinomial(&probs, shots as u64, &mut stream(seed, b as u64))?;
            Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
        })
        .collect::<Result<_>>()?;
    CoefficientTable::from_raw(raw)
}

/// Integration path through FOFE: every non-computational basis vector is a
/// phase state `D(φ)|+⟩^n`, so one batch of Hadamard-test shots estimates all
/// of their fidelities at once. The computational row is measured directly.
pub fn fofe_coefficients(
    rho: &DensityState<f64>,
    fam: &MubFamily,
    shots: usize,
    seed: u64,
) -> Result<CoefficientTable> {
    check_family(rho, fam)?;
    let mut phases = Vec::new();
    let mut slots = Vec::new();
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(fam.bases.len());
    for (b, basis) in fam.bases.iter().enumerate() {
        if basis.is_computational() {
            let probs = basis.probabilities(rho)?;
            let counts = multinomial(&probs, shots as u64, &mut stream(seed ^ 0x5a5a, b as u64))?;
            raw.push(counts.into_iter().map(|c| c as f64 / shots as f64).collect());
            continue;
        }
        raw.push(vec![0.0; basis.vectors.len()]);
        for (j, v) in basis.vectors.iter().enumerate() {
            phases.push(phase_strip(v).1);
            slots.push((b, j));
        }
    }
    let sampler = uniform_x_sampler(fam.n)?;
    let reports = fofe_multi_target(rho, &sampler, &phases, shots, 1, seed)?;
    for ((b, j), r) in slots.into_iter().zip(reports) {
        raw[b][j] = r.mean;
    }
    CoefficientTable::from_raw(raw)
}

/// `ρ̂ = Σ_φ b′⁺_φ |φ⟩⟨φ| − I` over all `2^n(2^n + 1)` basis vectors.
pub fn reconstruct(table: &CoefficientTable, fam: &MubFamily) -> Result<CMatrix<f64>> {
    check_dim(fam.bases.len(), table.projected.len())?;
    let d = 1usize << fam.n;
    let mut acc = CMatrix::<f64>::identity(d).scale(-1.0);
    for (row, basis) in table.projected.iter().zip(&fam.bases) {
        check_dim(d, row.len())?;
        for (&w, v) in row.iter().zip(&basis.vectors) {
            acc = acc.add(&CMatrix::outer(v.amplitudes()).scale(w))?;
        }
    }
    Ok(acc)
}

/// MUB family, estimation (`shots = None` uses exact rows), simplex
/// projection, reconstruction and PSD projection.
pub fn tomography_pipeline(
    rho: &DensityState<f64>,
    shots: Option<usize>,
    seed: u64,
) -> Result<TomographyResult> {
    let n = rho.n();
    if n > MUB_MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "tomography qubits",
            requested: n,
            cap: MUB_MAX_QUBITS,
            cost: format!("{} basis rows", (1u64 << n) + 1),
        });
    }
    let fam = super::mub_family(n)?;
    let table = match shots {
        Some(s) => estimate_coefficients(rho, &fam, s, seed)?,
        None => exact_coefficients(rho, &fam)?,
    };
    let linear = reconstruct(&table, &fam)?;
    let truth = rho.to_dense();
    let linear_l2_error = linear.sub(&truth)?.frobenius_norm();
    let state = psd_project(&linear)?;
    let l2_error = state.to_dense().sub(&truth)?.frobenius_norm();
    Ok(TomographyResult {
        state,
        l2_error,
        linear_l2_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{depolarize, StateVector};
    use crate::stats::linear_fit;
    use crate::tomography::mub_family;
    use rand::Rng;

    fn random_density(n: usize, seed: u64) -> DensityState<f64> {
        let mut rng = stream(seed, 0);
        let rank = 1 + rng.random_range(0..1usize << n);
        let parts: Vec<(f64, StateVector<f64>)> = (0..rank)
            .map(|_| (rng.random::<f64>() + 0.05, StateVector::haar_random(n, &mut rng)))
            .collect();
        let total: f64 = parts.iter().map(|p| p.0).sum();
        DensityState::mixture(parts.into_iter().map(|(w, s)| (w / total, s)).collect()).unwrap()
    }

    #[test]
    fn exact_rows_reconstruct_random_densities() {
        for n in 1..=3 {
            let fam = mub_family(n).unwrap();
            for k in 0..50 {
                let rho = random_density(n, 100 * n as u64 + k);
                let table = exact_coefficients(&rho, &fam).unwrap();
                let back = reconstruct(&table, &fam).unwrap();
                assert!(back.sub(&rho.to_dense()).unwrap().frobenius_norm() < 1e-9);
            }
        }
    }

    #[test]
    fn maximally_mixed_and_pure_inputs() {
        let fam = mub_family(2).unwrap();
        let mixed = DensityState::maximally_mixed(2).unwrap();
        let back = reconstruct(&exact_coefficients(&mixed, &fam).unwrap(), &fam).unwrap();
        assert!(back.sub(&mixed.to_dense()).unwrap().frobenius_norm() < 1e-12);

        let element = fam.bases[2].vectors[1].clone();
        let pure = DensityState::pure(element);
        let est = estimate_coefficients(&pure, &fam, 500, 4).unwrap();
        assert_eq!(est.raw[2][1], 1.0);
        let res = tomography_pipeline(&pure, None, 0).unwrap();
        assert!(res.l2_error < 1e-9);
    }

    #[test]
    fn rows_match_born_probabilities_statistically() {
        let fam = mub_family(2).unwrap();
        let psi = StateVector::haar_random(2, &mut stream(9, 0));
        let rho = depolarize(&psi, 0.2).unwrap();
        let shots = 20_000;
        let est = estimate_coefficients(&rho, &fam, shots, 10).unwrap();
        let exact = exact_coefficients(&rho, &fam).unwrap();
        for (r, e) in est.raw.iter().zip(&exact.raw) {
            assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (x, p) in r.iter().zip(e) {
                let sd = (p * (1.0 - p) / shots as f64).sqrt().max(1e-4);
                assert!((x - p).abs() < 5.0 * sd, "{x} vs {p}");
            }
        }
        for row in &est.projected {
            assert!(row.iter().all(|x| *x >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn estimation_is_deterministic_across_thread_counts() {
        let fam = mub_family(2).unwrap();
        let rho = random_density(2, 3);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_coefficients(&rho, &fam, 1000, 77).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn single_qubit_error_at_1e5_shots() {
        let rho = random_density(1, 42);
        let res = tomography_pipeline(&rho, Some(100_000), 1).unwrap();
        assert!(res.l2_error < 0.02, "{}", res.l2_error);
    }

    #[test]
    fn error_scales_as_inverse_root_shots() {
        let rho = random_density(2, 5);
        let ladder = [1_000usize, 3_000, 10_000, 30_000, 100_000];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &s in &ladder {
            let mean: f64 = (0..20)
                .map(|r| tomography_pipeline(&rho, Some(s), 1000 + r).unwrap().linear_l2_error)
                .sum::<f64>()
                / 20.0;
            xs.push((s as f64).ln());
            ys.push(mean.ln());
        }
        let (slope, _) = linear_fit(&xs, &ys);
        assert!((slope + 0.5).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn fofe_path_agrees_with_exact_rows() {
        let fam = mub_family(2).unwrap();
        let psi = StateVector::haar_random(2, &mut stream(12, 0));
        let rho = depolarize(&psi, 0.1).unwrap();
        let exact = exact_coefficients(&rho, &fam).unwrap();
        let fofe = fofe_coefficients(&rho, &fam, 40_000, 3).unwrap();
        for (r, e) in fofe.raw.iter().zip(&exact.raw) {
            for (x, p) in r.iter().zip(e) {
                assert!((x - p).abs() < 0.03, "{x} vs {p}");
            }
        }
    }

    #[test]
    fn cap_and_shot_checks() {
        let rho = DensityState::maximally_mixed(5).unwrap();
        assert!(matches!(tomography_pipeline(&rho, None, 0), Err(Error::CapExceeded { .. })));
        let fam = mub_family(1).unwrap();
        let one = DensityState::maximally_mixed(1).unwrap();
        assert!(estimate_coefficients(&one, &fam, 0, 0).is_err());
    }
}
