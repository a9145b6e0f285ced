//! ℓ₂ sampling of a real MPS by sequential conditional sampling.
//!
//! With `M₀ = L Lᵀ` and `M ← Σ_x (−1)^{a_z x} Γ(x)ᵀ M Γ(x⊕a_x)` per site,
//! `⟨T_a⟩ = i^{|a_x∧a_z|} Rᵀ Mₙ R`. Summing `⟨T_a⟩²` over the undecided
//! suffix collapses every remaining site to twice the norm transfer map, so
//! after k sites the prefix marginal is `2^{-k} tr(Mᵀ B M B)` with `B` the
//! right norm environment of the remaining sites. Each draw costs O(n χ³).

use super::{PhasePointDraw, PhasePointSampler, Strategy};
use crate::error::{check_dim, Error, Result};
use crate::pauli::{qubit_mask, PauliPoint};
use crate::scalar::Real;
use crate::states::RealMPS;
use rand::Rng;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

/// Relative drift of the per-site conditionals that counts as a warning.
pub const DRIFT_TOLERANCE: f64 = 1e-6;

fn mat_mul(a: &[f64], b: &[f64], chi: usize) -> Vec<f64> {
    let mut out = vec![0.0; chi * chi];
    for i in 0..chi {
        for k in 0..chi {
            let aik = a[i * chi + k];
            if aik != 0.0 {
                let row = &b[k * chi..(k + 1) * chi];
                out[i * chi..(i + 1) * chi]
                    .iter_mut()
                    .zip(row)
                    .for_each(|(o, r)| *o += aik * r);
            }
        }
    }
    out
}

/// `Aᵀ B`.
fn mat_tmul(a: &[f64], b: &[f64], chi: usize) -> Vec<f64> {
    let mut out = vec![0.0; chi * chi];
    for k in 0..chi {
        for i in 0..chi {
            let aki = a[k * chi + i];
            if aki != 0.0 {
                let row = &b[k * chi..(k + 1) * chi];
                out[i * chi..(i + 1) * chi]
                    .iter_mut()
                    .zip(row)
                    .for_each(|(o, r)| *o += aki * r);
            }
        }
    }
    out
}

/// `tr(Mᵀ B M B)` for symmetric B.
fn marginal(m: &[f64], b: &[f64], chi: usize) -> f64 {
    let bm = mat_mul(b, m, chi);
    let mb = mat_mul(m, b, chi);
    // tr(Mᵀ B M B) = Σ_{ij} (BM)_{ij} (MB)_{ij}
    bm.iter().zip(&mb).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug)]
pub struct MpsSampler {
    n: usize,
    chi: usize,
    tensors: Vec<[Vec<f64>; 2]>,
    left: Vec<f64>,
    right: Vec<f64>,
    envs: Vec<Vec<f64>>,
    drift_warnings: Arc<AtomicUsize>,
}

impl MpsSampler {
    pub fn new<T: Real>(m: &RealMPS<T>) -> Result<Self> {
        if m.n() > 64 {
            return Err(Error::InvalidArgument("phase points are limited to 64 qubits".into()));
        }
        let conv = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
        let tensors: Vec<[Vec<f64>; 2]> = (0..m.n())
            .map(|i| [conv(m.tensor(i, 0)), conv(m.tensor(i, 1))])
            .collect();
        let f64_mps = RealMPS::new(m.n(), m.chi(), tensors.clone(), conv(m.left()), conv(m.right()))?;
        let nrm = f64_mps.norm_sqr();
        if (nrm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized((nrm - 1.0).abs()));
        }
        Ok(Self {
            n: m.n(),
            chi: m.chi(),
            envs: f64_mps.right_norm_environments(),
            tensors,
            left: conv(m.left()),
            right: conv(m.right()),
            drift_warnings: Arc::new(AtomicUsize::new(0)),
        })
    }

    pub fn drift_warnings(&self) -> usize {
        self.drift_warnings.load(Ordering::Relaxed)
    }

    fn initial(&self) -> Vec<f64> {
        let chi = self.chi;
        (0..chi * chi)
            .map(|i| self.left[i / chi] * self.left[i % chi])
            .collect()
    }

    /// One transfer step with site choice `(ax, az)`.
    fn step(&self, m: &[f64], site: usize, ax: usize, az: usize) -> Vec<f64> {
        let chi = self.chi;
        let mut out = vec![0.0; chi * chi];
        for x in 0..2 {
            let g = &self.tensors[site][x];
            let h = &self.tensors[site][x ^ ax];
            let t = mat_mul(&mat_tmul(g, m, chi), h, chi);
            let s = if az & x == 1 { -1.0 } else { 1.0 };
            out.iter_mut().zip(t).for_each(|(o, v)| *o += s * v);
        }
        out
    }

    /// Unnormalized candidate marginals for the four choices at `site`.
    fn candidates(&self, m: &[f64], site: usize) -> [(Vec<f64>, f64); 4] {
        let b = &self.envs[site + 1];
        std::array::from_fn(|c| {
            let next = self.step(m, site, c >> 1, c & 1);
            let v = marginal(&next, b, self.chi).max(0.0);
            (next, v)
        })
    }

    fn check_drift(&self, total: f64, previous: f64) {
        if ((total / (2.0 * previous)) - 1.0).abs() > DRIFT_TOLERANCE {
            self.drift_warnings.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// Runs the conditional chain; `choose` picks a candidate from the
    /// renormalized conditionals, or stops the chain early with `None`.
    fn chain(&self, mut choose: impl FnMut(usize, &[f64; 4]) -> Option<usize>) -> (u64, u64) {
        let chi = self.chi;
        let mut m = self.initial();
        let mut prev = marginal(&m, &self.envs[0], chi);
        let (mut ax, mut az) = (0u64, 0u64);
        for site in 0..self.n {
            let cands = self.candidates(&m, site);
            let total: f64 = cands.iter().map(|c| c.1).sum();
            self.check_drift(total, prev);
            let cond: [f64; 4] = std::array::from_fn(|c| cands[c].1 / total);
            let Some(c) = choose(site, &cond) else {
                break;
            };
            let (next, v) = cands.into_iter().nth(c).expect("four candidates");
            // Rescale so the running marginal stays at one.
            let s = v.sqrt().recip();
            m = next.into_iter().map(|e| e * s).collect();
            prev = 1.0;
            if c >> 1 == 1 {
                ax |= qubit_mask(self.n, site);
            }
            if c & 1 == 1 {
                az |= qubit_mask(self.n, site);
            }
        }
        (ax, az)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePointDraw {
        let (ax, az) = self.chain(|_, cond| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (c, p) in cond.iter().enumerate() {
                acc += p;
                if u < acc && *p > 0.0 {
                    return Some(c);
                }
            }
            (0..4).rev().find(|&c| cond[c] > 0.0)
        });
        let point = PauliPoint::new(self.n, ax, az).expect("bits within n");
        PhasePointDraw {
            point,
            coeff: self.coefficient(&point),
        }
    }

    /// Probability the chain emits `a`: the product of its conditionals.
    pub fn chain_probability(&self, a: &PauliPoint) -> f64 {
        let mut p = 1.0;
        let n = self.n;
        self.chain(|site, cond| {
            let bit = qubit_mask(n, site);
            let c = (((a.ax() & bit != 0) as usize) << 1) | (a.az() & bit != 0) as usize;
            p *= cond[c];
            (p > 0.0).then_some(c)
        });
        p
    }

    /// `c_a = 2^{-n}⟨T_a⟩` by direct transfer contraction.
    pub fn coefficient(&self, a: &PauliPoint) -> f64 {
        let w = (a.ax() & a.az()).count_ones();
        if w % 2 == 1 {
            return 0.0;
        }
        let chi = self.chi;
        let mut m = self.initial();
        for site in 0..self.n {
            let bit = qubit_mask(self.n, site);
            m = self.step(&m, site, (a.ax() & bit != 0) as usize, (a.az() & bit != 0) as usize);
        }
        let mut s = 0.0;
        for i in 0..chi {
            for j in 0..chi {
                s += self.right[i] * m[i * chi + j] * self.right[j];
            }
        }
        let sign = if (w / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * s * (-(self.n as f64)).exp2()
    }
}

/// ℓ₂ sampler for a normalized real MPS.
pub fn mps_l2_sampler<T: Real>(m: &RealMPS<T>) -> Result<PhasePointSampler> {
    let sampler = MpsSampler::new(m)?;
    Ok(PhasePointSampler {
        n: m.n(),
        alpha: 1.0,
        normalizer: (-(m.n() as f64)).exp2(),
        strategy: Strategy::Mps(sampler),
    })
}

/// `2^{-n}⟨ψ|T_a|ψ⟩` for a normalized real MPS.
pub fn mps_coefficient<T: Real>(m: &RealMPS<T>, a: &PauliPoint) -> Result<f64> {
    check_dim(m.n(), a.n())?;
    Ok(MpsSampler::new(m)?.coefficient(a))
}
