use crate::error::{invalid, Result};
use crate::pauli::{pauli_coefficients, CoeffVector};
use crate::scalar::Real;
use crate::states::StateVector;
use serde::{Deserialize, Serialize};

/// Threshold below which a coefficient counts as zero for ℓ₀.
pub const L0_THRESHOLD: f64 = 1e-10;

/// Pauli ℓ-norms and stabilizer Rényi entropies of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub n: usize,
    /// Nonzero-coefficient count divided by 2^n.
    pub l0: f64,
    /// `2^{-n} Σ |⟨T_a⟩|`.
    pub l1: f64,
    /// `2^{-n} Σ ⟨T_a⟩²`, one for pure states.
    pub l2: f64,
    /// Pairs `(α, M_α)`.
    pub sre: Vec<(f64, f64)>,
}

impl NormReport {
    pub fn sre(&self, alpha: f64) -> Option<f64> {
        self.sre.iter().find(|(a, _)| *a == alpha).map(|(_, m)| *m)
    }
}

pub fn norms<T: Real>(psi: &StateVector<T>, alphas: &[f64]) -> Result<NormReport> {
    norms_from_coeffs(&pauli_coefficients(psi)?, alphas)
}

/// `M_α = (1/(1−α)) log₂ Σ_a p_a^α − n` with `p_a = ⟨T_a⟩²/2^n`; α = 0 and
/// α = 1 use the support-size and Shannon limits.
pub fn norms_from_coeffs<T: Real>(c: &CoeffVector<T>, alphas: &[f64]) -> Result<NormReport> {
    let n = c.n();
    let d = (1u64 << n) as f64;
    let vals: Vec<f64> = c.values().iter().map(|v| v.as_f64()).collect();
    let l0 = vals.iter().filter(|v| v.abs() > L0_THRESHOLD).count() as f64 / d;
    let l1 = vals.iter().map(|v| v.abs()).sum();
    let l2 = d * vals.iter().map(|v| v * v).sum::<f64>();
    // p_a = 2^n c_a², normalized by the purity so mixed inputs still give a distribution.
    let probs: Vec<f64> = vals
        .iter()
        .filter(|v| v.abs() > L0_THRESHOLD)
        .map(|v| d * v * v / l2)
        .collect();
    let mut sre = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return invalid(format!("Rényi order {alpha} must be finite and nonnegative"));
        }
        let entropy = if alpha == 0.0 {
            (probs.len() as f64).log2()
        } else if alpha == 1.0 {
            -probs.iter().map(|p| p * p.log2()).sum::<f64>()
        } else {
            probs.iter().map(|p| p.powf(alpha)).sum::<f64>().log2() / (1.0 - alpha)
        };
        sre.push((alpha, entropy - n as f64));
    }
    Ok(NormReport { n, l0, l1, l2, sre })
}

/// `2^{α M_{1−α} + (1−α) M_α}` for α ∈ {1/2, 1}: ℓ₁² and ℓ₀ respectively.
pub fn dfe_variance_bound<T: Real>(psi: &StateVector<T>, alpha: f64) -> Result<f64> {
    if alpha != 0.5 && alpha != 1.0 {
        return invalid(format!("unsupported α = {alpha}; use 1/2 or 1"));
    }
    let r = norms(psi, &[alpha, 1.0 - alpha])?;
    let m_a = r.sre(alpha).unwrap();
    let m_c = r.sre(1.0 - alpha).unwrap();
    Ok((alpha * m_c + (1.0 - alpha) * m_a).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::states::{complete_hypergraph_edges, hypergraph_state};
    use num_complex::Complex;

    #[test]
    fn stabilizer_states_have_unit_norms() {
        let states = [
            StateVector::<f64>::basis(3, 5).unwrap(),
            StateVector::plus(3),
            StateVector::dicke(2, 1).unwrap(),
        ];
        for s in states {
            let r = norms(&s, &[0.5, 1.0, 2.0]).unwrap();
            assert!((r.l1 - 1.0).abs() < 1e-12);
            assert!((r.l0 - 1.0).abs() < 1e-12);
            assert!((r.l2 - 1.0).abs() < 1e-12);
            for (_, m) in r.sre {
                assert!(m.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn t_state_l1() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = StateVector::new(
            1,
            vec![Complex::new(h, 0.0), Complex::from_polar(h, std::f64::consts::FRAC_PI_4)],
        )
        .unwrap();
        let r = norms(&t, &[0.5]).unwrap();
        assert!((r.l1 - 1.20710678118654752).abs() < 1e-12);
        assert!((r.sre(0.5).unwrap() - 2.0 * r.l1.log2()).abs() < 1e-12);
    }

    #[test]
    fn half_bound_is_l1_squared_and_not_above_alpha_one() {
        let mut rng = stream(31, 0);
        for n in 1..=5 {
            let psi = StateVector::<f64>::haar_random(n, &mut rng);
            let r = norms(&psi, &[]).unwrap();
            let b_half = dfe_variance_bound(&psi, 0.5).unwrap();
            let b_one = dfe_variance_bound(&psi, 1.0).unwrap();
            assert!((b_half - r.l1 * r.l1).abs() < 1e-9 * b_half);
            assert!((b_one - r.l0).abs() < 1e-9 * b_one);
            assert!(b_half <= b_one + 1e-12);
            assert!((r.l2 - 1.0).abs() < 1e-9);
        }
        assert!(dfe_variance_bound(&StateVector::<f64>::plus(1), 0.3).is_err());
    }

    #[test]
    fn random_cubic_hypergraph_bound_is_exponential_scale() {
        let mut rng = stream(32, 0);
        let edges: Vec<Vec<usize>> = complete_hypergraph_edges(7, 3)
            .into_iter()
            .filter(|_| rand::Rng::random::<bool>(&mut rng))
            .collect();
        let (psi, _) = hypergraph_state::<f64>(7, &edges).unwrap();
        let b = dfe_variance_bound(&psi, 0.5).unwrap();
        assert!(b > 8.0 && b <= 128.0, "bound {b}");
    }
}
