//! ℓ₁ sampling for Dicke states by permutation invariance.
//!
//! For `|D_k^n⟩` and `a = (a_x, a_z)` with `p = |a_x|`, `w₁ = |a_z ∧ a_x|` and
//! `w₂ = |a_z ∧ ¬a_x|`:
//! `⟨T_a⟩ = i^{w₁} K_{p/2}(w₁; p) · K_{k−p/2}(w₂; n−p) / C(n,k)`,
//! with `K_j(w; N) = Σ_i (−1)^i C(w,i) C(N−w, j−i)` the Krawtchouk polynomial.
//! Odd `p` gives zero, as does odd `w₁`. A draw picks `p`, then a uniform
//! `a_x` of that weight, then `w₁` and `w₂` independently, then uniform subsets.

use super::{PhasePointDraw, PhasePointSampler, Strategy};
use crate::error::{invalid, Result};
use crate::pauli::{qubit_mask, PauliPoint};
use crate::rng::CumulativeTable;
use rand::seq::index::sample;
use rand::Rng;

/// Phase points are u64 bit masks; binomials up to `C(64, 32)` stay exact in i128.
pub const DICKE_MAX_QUBITS: usize = 64;

fn binomials(n: usize) -> Vec<Vec<i128>> {
    let mut c = vec![vec![0i128; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

fn krawtchouk(c: &[Vec<i128>], j: usize, w: usize, big_n: usize) -> i128 {
    (0..=j.min(w))
        .filter(|&i| j - i <= big_n - w)
        .map(|i| {
            let t = c[w][i] * c[big_n - w][j - i];
            if i % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// Cached conditional tables for one `(n, k)`.
#[derive(Clone, Debug)]
pub struct DickeTables {
    n: usize,
    k: usize,
    /// `ln C(n,k)` and `n ln 2`, for coefficients.
    ln_norm: f64,
    /// Even weights `p` with nonzero mass.
    weights: Vec<usize>,
    eta: CumulativeTable,
    /// Per entry of `weights`: Krawtchouk values and conditional tables.
    inner: Vec<WeightTables>,
    /// `Σ_a |c_a|`.
    l1: f64,
}

#[derive(Clone, Debug)]
struct WeightTables {
    k1: Vec<i128>,
    k2: Vec<i128>,
    w1: CumulativeTable,
    w2: CumulativeTable,
}

impl DickeTables {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > DICKE_MAX_QUBITS {
            return invalid(format!("Dicke sampler supports 1..={DICKE_MAX_QUBITS} qubits"));
        }
        if k > n / 2 {
            return invalid(format!("Dicke weight k={k} must be at most ⌊n/2⌋ = {}", n / 2));
        }
        let c = binomials(n);
        let ln_c_nk = (c[n][k] as f64).ln();
        let (mut weights, mut inner, mut eta) = (Vec::new(), Vec::new(), Vec::new());
        for p in (0..=2 * k).step_by(2) {
            let (j1, j2) = (p / 2, k - p / 2);
            let k1: Vec<i128> = (0..=p).map(|w| krawtchouk(&c, j1, w, p)).collect();
            let k2: Vec<i128> = (0..=n - p).map(|w| krawtchouk(&c, j2, w, n - p)).collect();
            let a: Vec<f64> = (0..=p).map(|w| c[p][w] as f64 * k1[w].abs() as f64).collect();
            let b: Vec<f64> = (0..=n - p).map(|w| c[n - p][w] as f64 * k2[w].abs() as f64).collect();
            let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
            let mass = c[n][p] as f64 * sa * sb;
            if mass == 0.0 {
                continue;
            }
            weights.push(p);
            eta.push(mass);
            inner.push(WeightTables {
                k1,
                k2,
                w1: CumulativeTable::new(a).expect("positive mass"),
                w2: CumulativeTable::new(b).expect("positive mass"),
            });
        }
        let total: f64 = eta.iter().sum();
        let l1 = (total.ln() - ln_c_nk - n as f64 * std::f64::consts::LN_2).exp();
        Ok(Self {
            n,
            k,
            ln_norm: ln_c_nk,
            weights,
            eta: CumulativeTable::new(eta).expect("p = 0 always has mass"),
            inner,
            l1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Pauli ℓ₁ norm `2^{-n} Σ_a |⟨T_a⟩|`.
    pub fn l1(&self) -> f64 {
        self.l1
    }

    fn weight_stats(&self, a: &PauliPoint) -> (usize, usize, usize) {
        let p = a.ax().count_ones() as usize;
        let w1 = (a.az() & a.ax()).count_ones() as usize;
        let w2 = (a.az() & !a.ax()).count_ones() as usize;
        (p, w1, w2)
    }

    /// `c_a = 2^{-n}⟨T_a⟩`.
    pub fn coefficient(&self, a: &PauliPoint) -> f64 {
        let (p, w1, w2) = self.weight_stats(a);
        let Ok(slot) = self.weights.binary_search(&p) else {
            return 0.0;
        };
        let t = &self.inner[slot];
        // Real only for even w₁; i^{w₁} = (−1)^{w₁/2}.
        if w1 % 2 == 1 {
            return 0.0;
        }
        let num = t.k1[w1] as f64 * t.k2[w2] as f64;
        let sign = if (w1 / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * num.signum()
            * (num.abs().ln() - self.ln_norm - self.n as f64 * std::f64::consts::LN_2).exp()
    }

    pub fn probability(&self, a: &PauliPoint) -> f64 {
        self.coefficient(a).abs() / self.l1
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePointDraw {
        let n = self.n;
        let slot = self.eta.draw(rng);
        let p = self.weights[slot];
        let t = &self.inner[slot];
        let w1 = t.w1.draw(rng);
        let w2 = t.w2.draw(rng);
        let positions: Vec<usize> = sample(rng, n, p).into_vec();
        let (mut ax, mut inside) = (0u64, Vec::with_capacity(p));
        for &q in &positions {
            ax |= qubit_mask(n, q);
            inside.push(q);
        }
        let outside: Vec<usize> = (0..n).filter(|&q| ax & qubit_mask(n, q) == 0).collect();
        let mut az = 0u64;
        for i in sample(rng, p, w1) {
            az |= qubit_mask(n, inside[i]);
        }
        for i in sample(rng, n - p, w2) {
            az |= qubit_mask(n, outside[i]);
        }
        let point = PauliPoint::new(n, ax, az).expect("bits within n");
        PhasePointDraw {
            point,
            coeff: self.coefficient(&point),
        }
    }
}

/// ℓ₁ sampler for the Dicke state of weight `k ≤ ⌊n/2⌋`.
pub fn dicke_sampler(n: usize, k: usize) -> Result<PhasePointSampler> {
    let tables = DickeTables::new(n, k)?;
    Ok(PhasePointSampler {
        n,
        alpha: 0.5,
        normalizer: tables.l1(),
        strategy: Strategy::Dicke(tables),
    })
}

/// Closed-form Dicke coefficient `2^{-n}⟨D_k^n|T_a|D_k^n⟩`.
pub fn dicke_coefficient(n: usize, k: usize, a: &PauliPoint) -> Result<f64> {
    Ok(DickeTables::new(n, k)?.coefficient(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_coefficients;
    use crate::rng::stream;
    use crate::samplers::{exact_sampler, total_variation};
    use crate::states::StateVector;

    #[test]
    fn coefficients_match_enumeration() {
        for (n, k) in [(2, 1), (4, 2), (5, 2), (6, 3)] {
            let c = pauli_coefficients(&StateVector::<f64>::dicke(n, k).unwrap()).unwrap();
            let t = DickeTables::new(n, k).unwrap();
            for (a, v) in c.iter() {
                assert!((t.coefficient(&a) - v).abs() < 1e-14, "n={n} k={k} {a}");
            }
            assert!((t.l1() - c.l1_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_matches_exact_sampler() {
        for (n, k) in [(2, 1), (6, 2)] {
            let c = pauli_coefficients(&StateVector::<f64>::dicke(n, k).unwrap()).unwrap();
            let tv = total_variation(&dicke_sampler(n, k).unwrap(), &exact_sampler(&c, 0.5).unwrap())
                .unwrap();
            assert!(tv < 1e-9, "n={n} k={k}: {tv}");
        }
    }

    #[test]
    fn draws_have_even_bounded_x_weight() {
        let s = dicke_sampler(20, 3).unwrap();
        let mut rng = stream(9, 0);
        for _ in 0..2000 {
            let d = s.draw(&mut rng);
            let p = d.point.ax().count_ones();
            assert!(p % 2 == 0 && p <= 6);
            assert!(d.coeff != 0.0);
        }
    }

    #[test]
    fn empirical_frequencies_follow_probabilities() {
        let s = dicke_sampler(4, 2).unwrap();
        let mut rng = stream(10, 0);
        let draws = 200_000;
        let mut counts = vec![0usize; 256];
        for _ in 0..draws {
            counts[s.draw(&mut rng).point.index()] += 1;
        }
        for (i, &k) in counts.iter().enumerate() {
            let p = s.probability(&PauliPoint::from_index(4, i));
            let sd = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((k as f64 / draws as f64 - p).abs() <= 5.0 * sd + 1e-12, "index {i}");
        }
    }

    #[test]
    fn large_n_normalizer_is_finite() {
        let t = DickeTables::new(64, 4).unwrap();
        assert!(t.l1().is_finite() && t.l1() > 1.0);
        assert!(DickeTables::new(10, 6).is_err());
    }
}
