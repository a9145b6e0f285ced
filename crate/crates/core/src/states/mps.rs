//! Real matrix-product states with square χ×χ site tensors.
//!
//! Amplitudes are `ψ(x) = ⟨L| Γ^{[1](x₁)} ⋯ Γ^{[n](xₙ)} |R⟩`. Narrower bonds are
//! represented by zero padding.

use super::StateVector;
use crate::error::{check_dim, invalid, Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Conversion cap for [`mps_to_statevector`].
pub const MPS_CONVERSION_MAX_QUBITS: usize = 12;
pub const MPS_CONVERSION_MAX_CHI: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct RealMPS<T> {
    n: usize,
    chi: usize,
    /// `tensors[i][x]` is the row-major χ×χ matrix Γ^{[i](x)}.
    tensors: Vec<[Vec<T>; 2]>,
    left: Vec<T>,
    right: Vec<T>,
}

/// Row-major square matrix product.
pub(crate) fn mat_mul<T: Real>(a: &[T], b: &[T], chi: usize) -> Vec<T> {
    let mut out = vec![T::zero(); chi * chi];
    for i in 0..chi {
        for k in 0..chi {
            let aik = a[i * chi + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..chi {
                out[i * chi + j] = out[i * chi + j] + aik * b[k * chi + j];
            }
        }
    }
    out
}

pub(crate) fn transpose<T: Real>(a: &[T], chi: usize) -> Vec<T> {
    let mut out = vec![T::zero(); chi * chi];
    for i in 0..chi {
        for j in 0..chi {
            out[j * chi + i] = a[i * chi + j];
        }
    }
    out
}

impl<T: Real> RealMPS<T> {
    pub fn new(
        n: usize,
        chi: usize,
        tensors: Vec<[Vec<T>; 2]>,
        left: Vec<T>,
        right: Vec<T>,
    ) -> Result<Self> {
        if n == 0 || chi == 0 {
            return invalid("MPS needs at least one site and χ ≥ 1");
        }
        if n > 62 {
            return invalid("MPS supports at most 62 sites");
        }
        check_dim(n, tensors.len())?;
        check_dim(chi, left.len())?;
        check_dim(chi, right.len())?;
        for t in &tensors {
            check_dim(chi * chi, t[0].len())?;
            check_dim(chi * chi, t[1].len())?;
        }
        Ok(Self {
            n,
            chi,
            tensors,
            left,
            right,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn chi(&self) -> usize {
        self.chi
    }
    pub fn tensor(&self, site: usize, x: usize) -> &[T] {
        &self.tensors[site][x]
    }
    pub fn left(&self) -> &[T] {
        &self.left
    }
    pub fn right(&self) -> &[T] {
        &self.right
    }

    /// Right environments `B_k = Σ_x Γ^{[k](x)} B_{k+1} Γ^{[k](x)ᵀ}`, `B_{n} = |R⟩⟨R|`.
    /// Entry `k` holds the environment of sites `k..n`.
    pub fn right_norm_environments(&self) -> Vec<Vec<T>> {
        let chi = self.chi;
        let mut envs = vec![Vec::new(); self.n + 1];
        envs[self.n] = (0..chi * chi)
            .map(|i| self.right[i / chi] * self.right[i % chi])
            .collect();
        for k in (0..self.n).rev() {
            let mut acc = vec![T::zero(); chi * chi];
            for g in &self.tensors[k] {
                let m = mat_mul(&mat_mul(g, &envs[k + 1], chi), &transpose(g, chi), chi);
                acc.iter_mut().zip(m).for_each(|(a, b)| *a = *a + b);
            }
            envs[k] = acc;
        }
        envs
    }

    /// ⟨ψ|ψ⟩ by transfer-matrix contraction.
    pub fn norm_sqr(&self) -> T {
        let env = &self.right_norm_environments()[0];
        quad_form(&self.left, env, self.chi)
    }

    /// Rescales the boundary so that ⟨ψ|ψ⟩ = 1.
    pub fn normalized(mut self) -> Result<Self> {
        let nrm = self.norm_sqr();
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return Err(Error::Numerical("MPS norm is zero or non-finite".into()));
        }
        let s = T::one() / nrm.sqrt();
        self.left.iter_mut().for_each(|v| *v = *v * s);
        Ok(self)
    }

    /// Single amplitude ψ(x), qubit 1 being the most significant bit of `x`.
    pub fn amplitude(&self, x: u64) -> T {
        let chi = self.chi;
        let mut row = self.left.clone();
        for (i, t) in self.tensors.iter().enumerate() {
            let bit = ((x >> (self.n - 1 - i)) & 1) as usize;
            let g = &t[bit];
            row = (0..chi)
                .map(|j| (0..chi).map(|k| row[k] * g[k * chi + j]).sum())
                .collect();
        }
        row.iter().zip(&self.right).map(|(a, b)| *a * *b).sum()
    }
}

/// vᵀ M v for a row-major χ×χ matrix.
pub(crate) fn quad_form<T: Real>(v: &[T], m: &[T], chi: usize) -> T {
    let mut s = T::zero();
    for i in 0..chi {
        for j in 0..chi {
            s = s + v[i] * m[i * chi + j] * v[j];
        }
    }
    s
}

/// Random real MPS with Gaussian entries, normalized by transfer contraction.
pub fn random_real_mps<T: Real, R: Rng + ?Sized>(
    n: usize,
    chi: usize,
    rng: &mut R,
) -> Result<RealMPS<T>> {
    let scale = 1.0 / ((2 * chi) as f64).sqrt();
    let mut gauss = |len: usize, s: f64| -> Vec<T> {
        (0..len)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                T::of(g * s)
            })
            .collect()
    };
    let tensors = (0..n)
        .map(|_| [gauss(chi * chi, scale), gauss(chi * chi, scale)])
        .collect();
    let left = gauss(chi, 1.0);
    let right = gauss(chi, 1.0);
    RealMPS::new(n, chi, tensors, left, right)?.normalized()
}

/// Contracts left to right into a normalized state vector.
pub fn mps_to_statevector<T: Real>(m: &RealMPS<T>) -> Result<StateVector<T>> {
    if m.n > MPS_CONVERSION_MAX_QUBITS || m.chi > MPS_CONVERSION_MAX_CHI {
        return Err(Error::CapExceeded {
            what: "mps_to_statevector",
            requested: m.n.max(m.chi),
            cap: if m.n > MPS_CONVERSION_MAX_QUBITS {
                MPS_CONVERSION_MAX_QUBITS
            } else {
                MPS_CONVERSION_MAX_CHI
            },
            cost: format!("2^{} amplitudes at bond dimension {}", m.n, m.chi),
        });
    }
    let chi = m.chi;
    // Row vectors ⟨L|Γ…Γ for every prefix; prefix bits stay most significant.
    let mut rows = vec![m.left.clone()];
    for t in &m.tensors {
        let mut next = Vec::with_capacity(rows.len() * 2);
        for row in &rows {
            for g in t.iter() {
                next.push(
                    (0..chi)
                        .map(|j| (0..chi).map(|k| row[k] * g[k * chi + j]).sum())
                        .collect::<Vec<T>>(),
                );
            }
        }
        rows = next;
    }
    let amps: Vec<Complex<T>> = rows
        .iter()
        .map(|r| Complex::new(r.iter().zip(&m.right).map(|(a, b)| *a * *b).sum(), T::zero()))
        .collect();
    StateVector::from_unnormalized(m.n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn chi_one_is_a_real_product_state() {
        let m = random_real_mps::<f64, _>(4, 1, &mut stream(1, 0)).unwrap();
        let psi = mps_to_statevector(&m).unwrap();
        assert!(psi.is_real(0.0));
        // Product structure: ψ(x) factorizes per site.
        let f: Vec<[f64; 2]> = (0..4).map(|i| [m.tensor(i, 0)[0], m.tensor(i, 1)[0]]).collect();
        let c = m.left()[0] * m.right()[0];
        let norm: f64 = f.iter().map(|p| p[0] * p[0] + p[1] * p[1]).product::<f64>() * c * c;
        for x in 0..16u64 {
            let v: f64 = (0..4).map(|i| f[i][((x >> (3 - i)) & 1) as usize]).product::<f64>() * c;
            assert!((psi.amplitudes()[x as usize].re - v / norm.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn conversion_matches_index_by_index_contraction() {
        let m = random_real_mps::<f64, _>(6, 4, &mut stream(2, 0)).unwrap();
        let psi = mps_to_statevector(&m).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((m.norm_sqr() - 1.0).abs() < 1e-12);
        for x in 0..64u64 {
            // Naive: explicit sums over every bond index.
            let chi = 4;
            let mut vec_l = m.left().to_vec();
            for i in 0..6 {
                let b = ((x >> (5 - i)) & 1) as usize;
                let mut nv = vec![0.0; chi];
                for (beta, slot) in nv.iter_mut().enumerate() {
                    for (alpha, l) in vec_l.iter().enumerate() {
                        *slot += l * m.tensor(i, b)[alpha * chi + beta];
                    }
                }
                vec_l = nv;
            }
            let naive: f64 = vec_l.iter().zip(m.right()).map(|(a, b)| a * b).sum();
            assert!((psi.amplitudes()[x as usize].re - naive).abs() < 1e-12);
            assert!((m.amplitude(x) - naive).abs() < 1e-12);
            assert_eq!(psi.amplitudes()[x as usize].im, 0.0);
        }
    }

    #[test]
    fn conversion_respects_cap() {
        let m = random_real_mps::<f64, _>(13, 2, &mut stream(3, 0)).unwrap();
        assert!(matches!(mps_to_statevector(&m), Err(Error::CapExceeded { .. })));
    }
}
