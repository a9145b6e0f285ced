//! Bell sampling: two copies of a real state, transversal CNOTs, Hadamards on
//! the first register, then a full computational-basis measurement.

use super::{PhasePointSampler, PointTable, Strategy, ZERO_COEFF};
use crate::error::{invalid, Error, Result};
use crate::pauli::{pauli_expectation, PauliPoint};
use crate::rng::CumulativeTable;
use crate::scalar::Real;
use crate::states::StateVector;
use crate::wht::{fwht, Direction};

/// Two copies of n qubits must fit the 24-qubit simulator.
pub const BELL_MAX_QUBITS: usize = 12;

/// Exact measurement distribution of the Bell circuit, indexed by the emitted
/// point `a = (b₂, b₁)`, i.e. entry `(b₂ << n) | b₁`.
pub fn bell_output_distribution<T: Real>(psi: &StateVector<T>) -> Result<Vec<f64>> {
    let n = psi.n();
    if n > BELL_MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "Bell sampling qubits",
            requested: n,
            cap: BELL_MAX_QUBITS,
            cost: format!("2^{} amplitudes", 2 * n),
        });
    }
    if !psi.is_real(T::of(1e-12)) {
        return invalid("Bell sampling requires a real state vector");
    }
    let d = 1usize << n;
    let amps: Vec<f64> = psi.amplitudes().iter().map(|c| c.re.as_f64()).collect();
    let mut out = vec![0.0; d * d];
    // After the CNOTs the amplitude at (x, y) is ψ(x)ψ(x⊕y); the first
    // register is then Hadamard transformed for each fixed y.
    let h = (d as f64).sqrt().recip();
    let mut reg = vec![0.0; d];
    for y in 0..d {
        for (x, r) in reg.iter_mut().enumerate() {
            *r = amps[x] * amps[x ^ y];
        }
        fwht(&mut reg, Direction::Forward)?;
        for (b1, v) in reg.iter().enumerate() {
            out[(y << n) | b1] = (v * h).powi(2);
        }
    }
    Ok(out)
}

/// ℓ₂ sampler for a real state realized through the Bell circuit.
pub fn bell_circuit_sampler<T: Real>(stripped: &StateVector<T>) -> Result<PhasePointSampler> {
    let n = stripped.n();
    let dist = bell_output_distribution(stripped)?;
    let (mut points, mut coeffs, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    let scale = (-(n as f64)).exp2();
    for (i, &p) in dist.iter().enumerate() {
        // p = c_a²·2^n; skip points whose coefficient is numerically zero.
        if p.sqrt() * scale.sqrt() <= ZERO_COEFF {
            continue;
        }
        let a = PauliPoint::from_index(n, i);
        // The circuit yields only |c_a|; the sign comes from classical evaluation.
        coeffs.push(pauli_expectation(stripped, &a)?.as_f64() * scale);
        points.push(i as u64);
        weights.push(p);
    }
    let table = CumulativeTable::new(weights)
        .ok_or_else(|| Error::Numerical("Bell distribution is empty".into()))?;
    Ok(PhasePointSampler {
        n,
        alpha: 1.0,
        normalizer: scale,
        strategy: Strategy::Bell(PointTable {
            n,
            points,
            coeffs,
            table,
        }),
    })
}
