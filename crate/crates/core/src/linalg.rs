//! Small dense complex matrices and a cyclic Jacobi Hermitian eigensolver.
//!
//! Dimensions here never exceed a few hundred, so everything is row-major
//! `Vec<Complex<T>>` with straightforward loops.

use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim * dim, data.len())?;
        Ok(Self { dim, data })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    /// The projector |v⟩⟨v| (no normalization applied).
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        check_dim(self.dim, v.len())?;
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise |M − M†|.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// ⟨v|M|v⟩ real part, assuming Hermitian M.
    pub fn expectation(&self, v: &[Complex<T>]) -> Result<T> {
        let mv = self.matvec(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum())
    }

    fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s = s + self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
    ///
    /// Returns eigenvalues in descending order and the matching eigenvectors as
    /// columns of a unitary matrix, so that `M = V diag(λ) V†`.
    pub fn eigh(&self, tol: T) -> Result<(Vec<T>, CMatrix<T>)> {
        let dev = self.hermiticity_deviation();
        let scale = self.frobenius_norm().max(T::one());
        if dev > T::of(1e-9) * scale {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        let d = self.dim;
        let mut a = self.clone();
        // Symmetrize so rounding noise in the input cannot stall convergence.
        for i in 0..d {
            a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
            for j in i + 1..d {
                let avg = (a[(i, j)] + a[(j, i)].conj()) * T::of(0.5);
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
        }
        let mut v = Self::identity(d);
        let two = T::of(2.0);
        let mut converged = false;
        for _sweep in 0..200 {
            if a.off_diagonal_norm() <= tol {
                converged = true;
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag == T::zero() {
                        continue;
                    }
                    let phase = apq / mag;
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (two * mag);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
                    let u00 = Complex::new(c, T::zero());
                    let u01 = Complex::new(s, T::zero());
                    let u10 = phase.conj() * (-s);
                    let u11 = phase.conj() * c;
                    for k in 0..d {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * u00 + akq * u10;
                        a[(k, q)] = akp * u01 + akq * u11;
                    }
                    for k in 0..d {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
                        a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
                    }
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());
                    for k in 0..d {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * u00 + vkq * u10;
                        v[(k, q)] = vkp * u01 + vkq * u11;
                    }
                }
            }
        }
        if !converged && a.off_diagonal_norm() > tol {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not reach off-diagonal norm {:e}",
                tol.as_f64()
            )));
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vecs = Self::from_fn(d, |r, c| v[(r, order[c])]);
        Ok((values, vecs))
    }

    /// V diag(λ) V† from an eigendecomposition.
    pub fn from_eigen(values: &[T], vecs: &CMatrix<T>) -> Self {
        let d = vecs.dim;
        Self::from_fn(d, |i, j| {
            (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + vecs[(i, k)] * vecs[(j, k)].conj() * values[k]
            })
        })
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        let raw = CMatrix::from_fn(d, |_, _| {
            Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        raw.add(&raw.adjoint()).unwrap()
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1, 2, 3, 5, 8, 16] {
            let m = random_hermitian(d, &mut rng);
            let (vals, vecs) = m.eigh(1e-12).unwrap();
            let back = CMatrix::from_eigen(&vals, &vecs);
            assert!(back.sub(&m).unwrap().frobenius_norm() < 1e-10);
            let unitary = vecs.adjoint().matmul(&vecs).unwrap();
            assert!(unitary.sub(&CMatrix::identity(d)).unwrap().frobenius_norm() < 1e-10);
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigh_trace_matches_eigenvalue_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(6, &mut rng);
        let (vals, _) = m.eigh(1e-12).unwrap();
        assert!((vals.iter().sum::<f64>() - m.trace().re).abs() < 1e-10);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::identity(2);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(matches!(m.eigh(1e-12), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let m = CMatrix::<f32>::diagonal(&[0.25, 1.5, -1.0]);
        let (vals, _) = m.eigh(1e-6).unwrap();
        assert_eq!(vals, vec![1.5, 0.25, -1.0]);
    }
}
