//! Phase functions φ: F₂^n → [0, 2π), phase states, hypergraph states and
//! phase stripping.

use super::{check_qubits, StateVector};
use crate::error::{check_dim, invalid, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

type Callback = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Table(Vec<f64>),
    /// π·Σ_A ∏_{i∈A} x_i, each monomial stored as a qubit mask.
    Polynomial(Vec<u64>),
    Callback(Callback),
}

/// Diagonal phase `D(φ) = Σ_x e^{iφ(x)}|x⟩⟨x|`.
#[derive(Clone)]
pub struct PhaseFunction {
    n: usize,
    repr: Repr,
}

fn wrap(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl PhaseFunction {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            repr: Repr::Polynomial(Vec::new()),
        }
    }

    /// Dense table of 2^n angles (wrapped into [0, 2π)).
    pub fn table(n: usize, angles: Vec<f64>) -> Result<Self> {
        check_qubits(n)?;
        check_dim(1 << n, angles.len())?;
        if angles.iter().any(|a| !a.is_finite()) {
            return invalid("non-finite phase angle");
        }
        Ok(Self {
            n,
            repr: Repr::Table(angles.into_iter().map(wrap).collect()),
        })
    }

    /// Boolean polynomial phase π·P(x); monomials are lists of 0-based qubits.
    pub fn polynomial(n: usize, monomials: &[Vec<usize>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(monomials.len());
        for m in monomials {
            if m.is_empty() {
                return invalid("empty monomial");
            }
            let mut mask = 0u64;
            for &v in m {
                if v >= n {
                    return invalid(format!("vertex {v} out of range for {n} qubits"));
                }
                let bit = crate::pauli::qubit_mask(n, v);
                if mask & bit != 0 {
                    return invalid(format!("repeated vertex {v} in monomial"));
                }
                mask |= bit;
            }
            masks.push(mask);
        }
        Ok(Self {
            n,
            repr: Repr::Polynomial(masks),
        })
    }

    pub fn callback(n: usize, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            n,
            repr: Repr::Callback(Arc::new(f)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// φ(x) ∈ [0, 2π).
    pub fn evaluate(&self, x: u64) -> f64 {
        match &self.repr {
            Repr::Table(t) => t[x as usize],
            Repr::Polynomial(ms) => {
                let parity = ms.iter().filter(|&&m| x & m == m).count() & 1;
                if parity == 1 {
                    PI
                } else {
                    0.0
                }
            }
            Repr::Callback(f) => wrap(f(x)),
        }
    }

    /// `φ^{(a)}(x) = φ(x ⊕ a_x) − φ(x)` mod 2π.
    pub fn derivative(&self, ax: u64, x: u64) -> f64 {
        wrap(self.evaluate(x ^ ax) - self.evaluate(x))
    }

    /// Monomial masks when the phase is a Boolean polynomial.
    pub fn monomials(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Polynomial(ms) => Some(ms),
            _ => None,
        }
    }

    /// True when every value lies in {0, π} within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        match &self.repr {
            Repr::Polynomial(_) => true,
            _ => (0..1u64 << self.n).all(|x| {
                let v = self.evaluate(x);
                v.abs() <= tol || (v - PI).abs() <= tol || (TAU - v).abs() <= tol
            }),
        }
    }

    pub fn to_table(&self) -> Vec<f64> {
        (0..1u64 << self.n).map(|x| self.evaluate(x)).collect()
    }
}

impl fmt::Debug for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Table(_) => "table",
            Repr::Polynomial(_) => "polynomial",
            Repr::Callback(_) => "callback",
        };
        f.debug_struct("PhaseFunction")
            .field("n", &self.n)
            .field("repr", &kind)
            .finish()
    }
}

/// `D(φ)|+⟩^{⊗n}`.
pub fn phase_state<T: Real>(phi: &PhaseFunction) -> Result<StateVector<T>> {
    check_qubits(phi.n)?;
    let a = T::one() / T::from_usize(1 << phi.n).unwrap().sqrt();
    let amps = (0..1u64 << phi.n)
        .map(|x| Complex::from_polar(a, T::of(phi.evaluate(x))))
        .collect();
    Ok(StateVector::from_raw(phi.n, amps))
}

/// `∏_A C_A Z |+⟩^{⊗n}` together with its polynomial phase.
pub fn hypergraph_state<T: Real>(
    n: usize,
    hyperedges: &[Vec<usize>],
) -> Result<(StateVector<T>, PhaseFunction)> {
    check_qubits(n)?;
    let phi = PhaseFunction::polynomial(n, hyperedges)?;
    let s = T::one() / T::from_usize(1 << n).unwrap().sqrt();
    let amps = (0..1u64 << n)
        .map(|x| {
            let sign = if phi.evaluate(x) == 0.0 { s } else { -s };
            Complex::new(sign, T::zero())
        })
        .collect();
    Ok((StateVector::from_raw(n, amps), phi))
}

/// All k-subsets of `0..n`, i.e. the complete k-uniform hypergraph.
pub fn complete_hypergraph_edges(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `|ψ⟩ ↦ (|ψ̆⟩, φ)` with `ψ̆_x = |ξ_x|` and `φ(x) = arg ξ_x` (zero where `ξ_x = 0`).
pub fn phase_strip<T: Real>(psi: &StateVector<T>) -> (StateVector<T>, PhaseFunction) {
    let amps = psi.amplitudes();
    let stripped = amps.iter().map(|a| Complex::new(a.norm(), T::zero())).collect();
    let angles = amps
        .iter()
        .map(|a| {
            if a.norm() == T::zero() {
                0.0
            } else {
                wrap(a.arg().as_f64())
            }
        })
        .collect();
    (
        StateVector::from_raw(psi.n(), stripped),
        PhaseFunction {
            n: psi.n(),
            repr: Repr::Table(angles),
        },
    )
}

/// `D(φ)|ψ⟩`.
pub fn apply_diagonal<T: Real>(phi: &PhaseFunction, psi: &StateVector<T>) -> Result<StateVector<T>> {
    check_dim(phi.n, psi.n())?;
    let amps = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| a * Complex::from_polar(T::one(), T::of(phi.evaluate(x as u64))))
        .collect();
    Ok(StateVector::from_raw(psi.n(), amps))
}
