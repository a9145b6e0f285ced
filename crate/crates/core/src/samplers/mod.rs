//! Phase-point samplers: draws of `a ∈ F₂^{2n}` with probability
//! `|c_a|^{2α} / Σ_b |c_b|^{2α}`, where `c_a = 2^{-n}⟨ψ|T_a|ψ⟩`.

mod bell;
mod dicke;
mod mps;

pub use bell::{bell_circuit_sampler, bell_output_distribution, BELL_MAX_QUBITS};
pub use dicke::{dicke_coefficient, dicke_sampler, DickeTables, DICKE_MAX_QUBITS};
pub use mps::{mps_coefficient, mps_l2_sampler, MpsSampler};

use crate::error::{invalid, Error, Result};
use crate::pauli::{CoeffVector, PauliPoint};
use crate::rng::CumulativeTable;
use crate::scalar::Real;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Coefficients at or below this magnitude are never sampled.
pub const ZERO_COEFF: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplerKind {
    Exact,
    UniformX,
    Dicke,
    Bell,
    Mps,
}

/// One sampled phase point with its signed coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePointDraw {
    pub point: PauliPoint,
    pub coeff: f64,
}

/// Cumulative table over the nonzero points of an enumerated distribution.
#[derive(Clone, Debug)]
pub(crate) struct PointTable {
    n: usize,
    points: Vec<u64>,
    coeffs: Vec<f64>,
    table: CumulativeTable,
}

impl PointTable {
    fn probability(&self, a: &PauliPoint) -> f64 {
        match self.points.binary_search(&(a.index() as u64)) {
            Ok(i) => self.table.probability(i),
            Err(_) => 0.0,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePointDraw {
        let i = self.table.draw(rng);
        PhasePointDraw {
            point: PauliPoint::from_index(self.n, self.points[i] as usize),
            coeff: self.coeffs[i],
        }
    }
}

#[derive(Clone, Debug)]
enum Strategy {
    Table(PointTable),
    UniformX,
    Dicke(DickeTables),
    Bell(PointTable),
    Mps(MpsSampler),
}

/// A sampler over phase points together with the normalizer
/// `Σ_b |c_b|^{2α}` needed by the estimators.
#[derive(Clone, Debug)]
pub struct PhasePointSampler {
    n: usize,
    alpha: f64,
    normalizer: f64,
    strategy: Strategy,
}

impl PhasePointSampler {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> SamplerKind {
        match self.strategy {
            Strategy::Table(_) => SamplerKind::Exact,
            Strategy::UniformX => SamplerKind::UniformX,
            Strategy::Dicke(_) => SamplerKind::Dicke,
            Strategy::Bell(_) => SamplerKind::Bell,
            Strategy::Mps(_) => SamplerKind::Mps,
        }
    }

    /// `Σ_b |c_b|^{2α}`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePointDraw {
        match &self.strategy {
            Strategy::Table(t) | Strategy::Bell(t) => t.draw(rng),
            Strategy::UniformX => {
                let ax = rng.random::<u64>() & crate::pauli::full_mask(self.n);
                PhasePointDraw {
                    point: PauliPoint::new(self.n, ax, 0).expect("masked"),
                    coeff: (-(self.n as f64)).exp2(),
                }
            }
            Strategy::Dicke(d) => d.draw(rng),
            Strategy::Mps(m) => m.draw(rng),
        }
    }

    /// Exact probability of emitting `a`.
    pub fn probability(&self, a: &PauliPoint) -> f64 {
        match &self.strategy {
            Strategy::Table(t) | Strategy::Bell(t) => t.probability(a),
            Strategy::UniformX => {
                if a.az() == 0 {
                    (-(self.n as f64)).exp2()
                } else {
                    0.0
                }
            }
            Strategy::Dicke(d) => d.probability(a),
            Strategy::Mps(m) => m.chain_probability(a),
        }
    }

    /// Estimator weight `(Σ_b|c_b|^{2α})·|c_a|^{1−2α}·sign(c_a)`.
    pub fn weight(&self, coeff: f64) -> f64 {
        let mag = if self.alpha == 0.5 {
            1.0
        } else {
            coeff.abs().powf(1.0 - 2.0 * self.alpha)
        };
        self.normalizer * mag * coeff.signum()
    }

    /// Number of points with nonzero probability, when tabulated.
    pub fn support_size(&self) -> Option<usize> {
        match &self.strategy {
            Strategy::Table(t) | Strategy::Bell(t) => Some(t.points.len()),
            Strategy::UniformX if self.n < 64 => Some(1usize << self.n),
            _ => None,
        }
    }

    /// `E_a[w(a)²]`: `Z²` for α = 1/2 and `Z·|support|` for α = 1.
    pub fn mean_square_weight(&self) -> Option<f64> {
        if self.alpha == 0.5 {
            Some(self.normalizer * self.normalizer)
        } else {
            self.support_size().map(|k| self.normalizer * k as f64)
        }
    }

    /// Number of numerical-health warnings raised while drawing (MPS only).
    pub fn health_warnings(&self) -> usize {
        match &self.strategy {
            Strategy::Mps(m) => m.drift_warnings(),
            _ => 0,
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha == 0.5 || alpha == 1.0 {
        Ok(())
    } else {
        invalid(format!("α must be 1/2 or 1, got {alpha}"))
    }
}

/// Tabulated sampler over an explicit coefficient vector.
pub fn exact_sampler<T: Real>(coeffs: &CoeffVector<T>, alpha: f64) -> Result<PhasePointSampler> {
    check_alpha(alpha)?;
    let n = coeffs.n();
    let (mut points, mut values, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for (i, c) in coeffs.values().iter().enumerate() {
        let c = c.as_f64();
        if c.abs() > ZERO_COEFF {
            points.push(i as u64);
            values.push(c);
            weights.push(c.abs().powf(2.0 * alpha));
        }
    }
    let table = CumulativeTable::new(weights.iter().copied())
        .ok_or_else(|| Error::InvalidArgument("all coefficients are zero".into()))?;
    Ok(PhasePointSampler {
        n,
        alpha,
        normalizer: table.total(),
        strategy: Strategy::Table(PointTable {
            n,
            points,
            coeffs: values,
            table,
        }),
    })
}

/// Uniform X-type points, the exact ℓ₁ distribution of `|+⟩^{⊗n}` (the
/// phase-stripped state of any phase state).
pub fn uniform_x_sampler(n: usize) -> Result<PhasePointSampler> {
    if n == 0 || n > 64 {
        return invalid(format!("uniform X sampler supports 1..=64 qubits, got {n}"));
    }
    Ok(PhasePointSampler {
        n,
        alpha: 0.5,
        normalizer: 1.0,
        strategy: Strategy::UniformX,
    })
}

/// Total-variation distance between two samplers over all 4^n points.
pub fn total_variation(a: &PhasePointSampler, b: &PhasePointSampler) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::Dimension {
            expected: a.n,
            got: b.n,
        });
    }
    if a.n > 8 {
        return invalid("total variation is enumerated only up to 8 qubits");
    }
    let n = a.n;
    Ok(0.5
        * (0..1usize << (2 * n))
            .map(|i| {
                let p = PauliPoint::from_index(n, i);
                (a.probability(&p) - b.probability(&p)).abs()
            })
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_coefficients;
    use crate::rng::stream;
    use crate::states::StateVector;

    #[test]
    fn plus_state_is_uniform_over_x_points() {
        let c = pauli_coefficients(&StateVector::<f64>::plus(3)).unwrap();
        let s = exact_sampler(&c, 0.5).unwrap();
        for i in 0..64 {
            let a = PauliPoint::from_index(3, i);
            let expect = if a.az() == 0 { 0.125 } else { 0.0 };
            assert!((s.probability(&a) - expect).abs() < 1e-12);
        }
        assert!((s.normalizer() - 1.0).abs() < 1e-12);
        assert!(total_variation(&s, &uniform_x_sampler(3).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn zero_state_is_uniform_over_z_points() {
        let c = pauli_coefficients(&StateVector::<f64>::basis(3, 0).unwrap()).unwrap();
        let s = exact_sampler(&c, 0.5).unwrap();
        let mut rng = stream(1, 0);
        for _ in 0..200 {
            let d = s.draw(&mut rng);
            assert_eq!(d.point.ax(), 0);
            assert!((s.weight(d.coeff) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_uniform_x() {
        let s = uniform_x_sampler(1).unwrap();
        assert_eq!(s.probability(&PauliPoint::from_label("X").unwrap()), 0.5);
        assert_eq!(s.probability(&PauliPoint::from_label("I").unwrap()), 0.5);
        assert_eq!(s.probability(&PauliPoint::from_label("Z").unwrap()), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let zero = CoeffVector::from_values(1, vec![0.0f64; 4]).unwrap();
        assert!(exact_sampler(&zero, 0.5).is_err());
        let c = pauli_coefficients(&StateVector::<f64>::plus(1)).unwrap();
        assert!(exact_sampler(&c, 0.7).is_err());
    }

    #[test]
    fn empirical_frequencies_match_table() {
        let psi = StateVector::<f64>::haar_random(3, &mut stream(2, 0));
        let s = exact_sampler(&pauli_coefficients(&psi).unwrap(), 1.0).unwrap();
        let mut counts = [0usize; 64];
        let mut rng = stream(3, 0);
        let draws = 100_000;
        for _ in 0..draws {
            counts[s.draw(&mut rng).point.index()] += 1;
        }
        let (mut chi2, mut dof) = (0.0, 0usize);
        for (i, &k) in counts.iter().enumerate() {
            let e = s.probability(&PauliPoint::from_index(3, i)) * draws as f64;
            if e > 0.0 {
                chi2 += (k as f64 - e).powi(2) / e;
                dof += 1;
            } else {
                assert_eq!(k, 0);
            }
        }
        // Mean dof−1 with sd √(2·dof); allow five standard deviations.
        let dof = (dof - 1) as f64;
        assert!(chi2 < dof + 5.0 * (2.0 * dof).sqrt(), "χ² = {chi2}, dof = {dof}");
    }

    #[test]
    fn weights_for_l2_sampling() {
        let psi = StateVector::<f64>::haar_random(2, &mut stream(4, 0));
        let c = pauli_coefficients(&psi).unwrap();
        let s = exact_sampler(&c, 1.0).unwrap();
        assert!((s.normalizer() - 0.25).abs() < 1e-12);
        assert!((s.weight(-0.1) + 2.5).abs() < 1e-12);
    }
}
