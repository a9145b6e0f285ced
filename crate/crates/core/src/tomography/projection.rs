//! Euclidean projections onto the probability simplex and onto density
//! matrices.

use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::states::DensityState;

/// Off-diagonal tolerance of the Jacobi eigensolver used by [`psd_project`].
pub const EIGEN_TOL: f64 = 1e-12;

/// Sort-and-threshold projection: `max(v_i − θ, 0)` with θ chosen so the
/// result sums to one.
pub fn simplex_project<T: Real>(v: &[T]) -> Result<Vec<T>> {
    if v.is_empty() {
        return invalid("cannot project an empty vector");
    }
    if v.iter().any(|x| !x.is_finite()) {
        return invalid("simplex projection needs finite entries");
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let (mut cum, mut theta) = (T::zero(), T::zero());
    for (k, &uk) in u.iter().enumerate() {
        cum = cum + uk;
        let t = (cum - T::one()) / T::from_usize(k + 1).unwrap();
        if uk - t > T::zero() {
            theta = t;
        }
    }
    Ok(v.iter().map(|&x| (x - theta).max(T::zero())).collect())
}

/// Closest density matrix in Frobenius norm: diagonalize, project the
/// spectrum onto the simplex, reassemble.
pub fn psd_project(h: &CMatrix<f64>) -> Result<DensityState<f64>> {
    let dev = h.hermiticity_deviation();
    if dev > 1e-9 {
        return Err(Error::NotHermitian(dev));
    }
    let (values, vectors) = h.eigh(EIGEN_TOL)?;
    let projected = simplex_project(&values)?;
    let rho = CMatrix::from_eigen(&projected, &vectors);
    // Symmetrize away rounding before validation.
    let sym = rho.add(&rho.adjoint())?.scale(0.5);
    DensityState::dense(sym)
}
