//! α-DFE: sample `a` from the ℓ_{2α} distribution of the target, then
//! measure the two-outcome POVM `{(I ± T_a)/2}` on ρ.

use super::{Branch, BranchOutcome, ShotRecord};
use crate::error::{invalid, Result};
use crate::pauli::{diagonalizing_frame, dot2, pauli_expectation, PauliPoint};
use crate::rng::StreamRng;
use crate::samplers::PhasePointSampler;
use crate::states::{measure_computational, DensityState};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How the POVM outcome is simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DfePath {
    /// Bernoulli with `P(0) = (1 + tr ρT_a)/2`.
    Bernoulli,
    /// Rotate into the diagonalizing frame, measure, take the parity on the support.
    Frame,
}

/// Exact `[P(parity 0), P(parity 1)]` of the POVM on ρ.
pub fn parity_distribution(rho: &DensityState<f64>, a: &PauliPoint, path: DfePath) -> Result<[f64; 2]> {
    match path {
        DfePath::Bernoulli => {
            let e = pauli_expectation(rho, a)?;
            Ok([(1.0 + e) / 2.0, (1.0 - e) / 2.0])
        }
        DfePath::Frame => {
            let (frame, mask) = diagonalizing_frame(a);
            let mut out = [0.0; 2];
            for (b, p) in rho.born_probabilities(&frame)?.into_iter().enumerate() {
                out[dot2(b as u64, mask) as usize] += p;
            }
            Ok(out)
        }
    }
}

fn sample_parity(rho: &DensityState<f64>, a: &PauliPoint, path: DfePath, rng: &mut StreamRng) -> Result<(u32, u64)> {
    match path {
        DfePath::Bernoulli => {
            let e = pauli_expectation(rho, a)?;
            let p = u32::from(rng.random::<f64>() >= (1.0 + e) / 2.0);
            Ok((p, p as u64))
        }
        DfePath::Frame => {
            let (frame, mask) = diagonalizing_frame(a);
            let b = measure_computational(rho, &frame, rng)?;
            Ok((dot2(b, mask), b))
        }
    }
}

/// One DFE shot: `(−1)^p · (Σ_b|c_b|^{2α}) · |c_a|^{1−2α} · sign(c_a)`.
pub fn dfe_shot(
    rho: &DensityState<f64>,
    sampler: &PhasePointSampler,
    path: DfePath,
    rng: &mut StreamRng,
) -> Result<ShotRecord> {
    if rho.n() != sampler.n() {
        return invalid("state and sampler act on different qubit counts");
    }
    let draw = sampler.draw(rng);
    assert!(draw.coeff != 0.0, "sampler emitted a zero-coefficient point");
    let (parity, bits) = sample_parity(rho, &draw.point, path, rng)?;
    let sign = if parity == 0 { 1.0 } else { -1.0 };
    let value = sign * sampler.weight(draw.coeff);
    Ok(ShotRecord {
        value,
        point: Some(draw.point),
        group: None,
        branches: vec![BranchOutcome {
            branch: Branch::Single,
            value,
            ancilla: None,
            bits,
        }],
    })
}

/// Expected shot value computed from exact outcome distributions over every
/// point the sampler can emit (n ≤ 5).
pub fn dfe_exact_expectation(rho: &DensityState<f64>, sampler: &PhasePointSampler, coeffs: &[f64], path: DfePath) -> Result<f64> {
    let n = sampler.n();
    if n > 5 {
        return invalid("exact DFE expectation is enumerated only up to 5 qubits");
    }
    let mut total = 0.0;
    for (i, &c) in coeffs.iter().enumerate() {
        let a = PauliPoint::from_index(n, i);
        let pa = sampler.probability(&a);
        if pa == 0.0 {
            continue;
        }
        let [p0, p1] = parity_distribution(rho, &a, path)?;
        total += pa * sampler.weight(c) * (p0 - p1);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_coefficients;
    use crate::rng::stream;
    use crate::samplers::exact_sampler;
    use crate::states::{depolarize, exact_fidelity, StateVector};
    use crate::stats::MeanStderr;

    #[test]
    fn stabilizer_target_gives_constant_one() {
        let psi = StateVector::<f64>::basis(3, 0).unwrap();
        let s = exact_sampler(&pauli_coefficients(&psi).unwrap(), 0.5).unwrap();
        let rho = DensityState::pure(psi);
        let mut rng = stream(1, 0);
        for path in [DfePath::Bernoulli, DfePath::Frame] {
            for _ in 0..200 {
                assert_eq!(dfe_shot(&rho, &s, path, &mut rng).unwrap().value, 1.0);
            }
        }
    }

    #[test]
    fn paths_share_outcome_distributions() {
        let mut rng = stream(2, 0);
        let psi = StateVector::<f64>::haar_random(3, &mut rng);
        let rho = depolarize(&StateVector::haar_random(3, &mut rng), 0.3).unwrap();
        for (a, _) in pauli_coefficients(&psi).unwrap().iter() {
            let d1 = parity_distribution(&rho, &a, DfePath::Bernoulli).unwrap();
            let d2 = parity_distribution(&rho, &a, DfePath::Frame).unwrap();
            assert!((d1[0] - d2[0]).abs() < 1e-12, "{a}");
        }
    }

    #[test]
    fn exact_expectation_is_fidelity() {
        let mut rng = stream(3, 0);
        for alpha in [0.5, 1.0] {
            let psi = StateVector::<f64>::haar_random(3, &mut rng);
            let rho = depolarize(&StateVector::haar_random(3, &mut rng), 0.2).unwrap();
            let c = pauli_coefficients(&psi).unwrap();
            let s = exact_sampler(&c, alpha).unwrap();
            let f = exact_fidelity(&rho, &psi).unwrap();
            for path in [DfePath::Bernoulli, DfePath::Frame] {
                let e = dfe_exact_expectation(&rho, &s, c.values(), path).unwrap();
                assert!((e - f).abs() < 1e-9, "α={alpha}: {e} vs {f}");
            }
        }
    }

    #[test]
    fn shot_magnitude_is_l1_for_half_alpha() {
        let mut rng = stream(4, 0);
        let psi = StateVector::<f64>::haar_random(3, &mut rng);
        let c = pauli_coefficients(&psi).unwrap();
        let s = exact_sampler(&c, 0.5).unwrap();
        let rho = DensityState::pure(psi.clone());
        let vals: Vec<f64> = (0..20_000)
            .map(|_| dfe_shot(&rho, &s, DfePath::Frame, &mut rng).unwrap().value)
            .collect();
        assert!(vals.iter().all(|v| (v.abs() - c.l1_norm()).abs() < 1e-12));
        assert!(MeanStderr::from_values(&vals).z_score(1.0) < 4.0);
    }
}
