//! Binary symplectic representation of n-qubit Paulis.
//!
//! `T_a = ⊗ᵢ i^{a_{x,i} a_{z,i}} X^{a_{x,i}} Z^{a_{z,i}}`, so that
//! `⟨y|T_a|x⟩ = δ_{y, x⊕a_x} · i^{|a_x ∧ a_z|} · (−1)^{a_z·x}`.
//! Qubit 1 is the most significant bit of every basis index and of `ax`/`az`;
//! [`qubit_mask`] is the single place that encodes this.

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::states::{DensityState, StateVector};
use crate::wht::{fwht, Direction};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default cap on the qubit count for dense 4^n coefficient vectors.
pub const COEFF_CAP: usize = 10;

/// Bit of qubit `i` (0-based, qubit 1 ↔ `i = 0`) in an `n`-qubit word.
#[inline]
pub fn qubit_mask(n: usize, i: usize) -> u64 {
    debug_assert!(i < n);
    1u64 << (n - 1 - i)
}

#[inline]
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Binary inner product x·y mod 2.
#[inline]
pub fn dot2(x: u64, y: u64) -> u32 {
    (x & y).count_ones() & 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliPoint {
    n: usize,
    ax: u64,
    az: u64,
}

impl PauliPoint {
    pub fn new(n: usize, ax: u64, az: u64) -> Result<Self> {
        if n > 64 {
            return invalid(format!("Pauli points support at most 64 qubits, got {n}"));
        }
        let m = full_mask(n);
        if ax & !m != 0 || az & !m != 0 {
            return invalid(format!("bits beyond qubit count {n} are set"));
        }
        Ok(Self { n, ax, az })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, ax: 0, az: 0 }
    }

    /// Point at position `index` of a 4^n coefficient table (n ≤ 32).
    pub fn from_index(n: usize, index: usize) -> Self {
        let m = full_mask(n);
        Self {
            n,
            ax: (index as u64 >> n) & m,
            az: index as u64 & m,
        }
    }

    /// Index into a 4^n coefficient table, `(ax << n) | az`; requires n ≤ 32.
    pub fn index(&self) -> usize {
        debug_assert!(self.n <= 32, "coefficient index needs n ≤ 32");
        ((self.ax << self.n) | self.az) as usize
    }

    /// Parses labels such as `"XIYZ"`; the first character is qubit 1.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let (mut ax, mut az) = (0, 0);
        for (i, ch) in label.chars().enumerate() {
            let bit = qubit_mask(n, i);
            match ch {
                'I' => {}
                'X' => ax |= bit,
                'Z' => az |= bit,
                'Y' => {
                    ax |= bit;
                    az |= bit
                }
                other => return invalid(format!("unknown Pauli letter {other:?}")),
            }
        }
        Self::new(n, ax, az)
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|i| {
                let b = qubit_mask(self.n, i);
                match (self.ax & b != 0, self.az & b != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => 'Y',
                }
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn ax(&self) -> u64 {
        self.ax
    }
    pub fn az(&self) -> u64 {
        self.az
    }
    pub fn is_identity(&self) -> bool {
        self.ax == 0 && self.az == 0
    }
    /// Number of Y factors, i.e. the power of i in the phase convention.
    pub fn y_count(&self) -> u32 {
        (self.ax & self.az).count_ones()
    }
    /// Qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.ax | self.az
    }
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Power of i picked up by `T_a|x⟩ = i^k |x⊕ax⟩`.
    #[inline]
    pub fn phase_power(&self, x: u64) -> u32 {
        (self.y_count() + 2 * dot2(self.az, x)) & 3
    }

    /// Dense 2^n × 2^n matrix of T_a.
    pub fn to_matrix<T: Real>(&self) -> CMatrix<T> {
        let d = 1usize << self.n;
        let mut m = CMatrix::zeros(d);
        for x in 0..d as u64 {
            m[((x ^ self.ax) as usize, x as usize)] = i_pow(self.phase_power(x));
        }
        m
    }
}

impl fmt::Display for PauliPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[inline]
pub(crate) fn i_pow<T: Real>(k: u32) -> Complex<T> {
    match k & 3 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Multiplies by i^k without a complex product.
#[inline]
pub(crate) fn times_i_pow<T: Real>(z: Complex<T>, k: u32) -> Complex<T> {
    match k & 3 {
        0 => z,
        1 => Complex::new(-z.im, z.re),
        2 => Complex::new(-z.re, -z.im),
        _ => Complex::new(z.im, -z.re),
    }
}

/// `a·Ωb` mod 2; zero exactly when T_a and T_b commute.
pub fn symplectic_product(a: &PauliPoint, b: &PauliPoint) -> Result<u8> {
    check_dim(a.n, b.n)?;
    Ok((((a.ax & b.az).count_ones() + (a.az & b.ax).count_ones()) & 1) as u8)
}

/// Returns `T_a|ψ⟩`.
pub fn apply_pauli<T: Real>(a: &PauliPoint, psi: &StateVector<T>) -> Result<StateVector<T>> {
    check_dim(a.n, psi.n())?;
    let amps = psi.amplitudes();
    let mut out = vec![Complex::new(T::zero(), T::zero()); amps.len()];
    for (x, &amp) in amps.iter().enumerate() {
        let x = x as u64;
        out[(x ^ a.ax) as usize] = times_i_pow(amp, a.phase_power(x));
    }
    Ok(StateVector::from_raw(psi.n(), out))
}

/// Quantum states with a Pauli expectation value.
pub trait PauliObservable<T: Real> {
    fn num_qubits(&self) -> usize;
    /// `tr(ρ)` or `⟨ψ|ψ⟩`.
    fn trace_value(&self) -> T;
    /// Raw complex `tr(ρ T_a)` with no validation.
    fn raw_expectation(&self, a: &PauliPoint) -> Complex<T>;
}

impl<T: Real> PauliObservable<T> for StateVector<T> {
    fn num_qubits(&self) -> usize {
        self.n()
    }
    fn trace_value(&self) -> T {
        self.norm_sqr()
    }
    fn raw_expectation(&self, a: &PauliPoint) -> Complex<T> {
        let amps = self.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (x, &amp) in amps.iter().enumerate() {
            let x = x as u64;
            acc = acc + amps[(x ^ a.ax) as usize].conj() * times_i_pow(amp, a.phase_power(x));
        }
        acc
    }
}

impl<T: Real> PauliObservable<T> for CMatrix<T> {
    fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }
    fn trace_value(&self) -> T {
        self.trace().re
    }
    fn raw_expectation(&self, a: &PauliPoint) -> Complex<T> {
        // tr(ρT) = Σ_x ρ[x, x⊕ax] · i^{k(x)}
        (0..self.dim() as u64).fold(Complex::new(T::zero(), T::zero()), |acc, x| {
            acc + times_i_pow(self[(x as usize, (x ^ a.ax) as usize)], a.phase_power(x))
        })
    }
}

impl<T: Real> PauliObservable<T> for DensityState<T> {
    fn num_qubits(&self) -> usize {
        self.n()
    }
    fn trace_value(&self) -> T {
        match self {
            DensityState::Dense(m) => m.trace_value(),
            DensityState::Mixture(parts) => parts.iter().map(|(w, s)| *w * s.norm_sqr()).sum(),
        }
    }
    fn raw_expectation(&self, a: &PauliPoint) -> Complex<T> {
        match self {
            DensityState::Dense(m) => m.raw_expectation(a),
            DensityState::Mixture(parts) => parts
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (w, s)| {
                    acc + s.raw_expectation(a) * *w
                }),
        }
    }
}

/// `⟨T_a⟩` of a normalized state, asserted real.
pub fn pauli_expectation<T: Real, S: PauliObservable<T> + ?Sized>(
    state: &S,
    a: &PauliPoint,
) -> Result<T> {
    check_dim(state.num_qubits(), a.n)?;
    let tr = state.trace_value();
    let dev = (tr - T::one()).abs();
    if dev > T::of(1e-9) {
        return Err(Error::NotNormalized(dev.as_f64()));
    }
    let v = state.raw_expectation(a);
    if v.im.abs() > T::of(1e-8) {
        return Err(Error::Numerical(format!(
            "imaginary residual {:e} in Pauli expectation",
            v.im.as_f64()
        )));
    }
    Ok(v.re)
}

/// Dense table `c(a) = 2^{-n} ⟨ψ|T_a|ψ⟩` over all 4^n points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> CoeffVector<T> {
    pub fn from_values(n: usize, values: Vec<T>) -> Result<Self> {
        check_dim(1usize << (2 * n), values.len())?;
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, a: &PauliPoint) -> T {
        self.values[a.index()]
    }

    /// `Σ_a |c_a|^{p}`; `p = 1` is the Pauli ℓ₁ norm.
    pub fn abs_power_sum(&self, p: T) -> T {
        if p == T::one() {
            self.values.iter().map(|v| v.abs()).sum()
        } else if p == T::zero() {
            T::from_usize(self.nonzero_count(T::of(1e-10))).unwrap()
        } else {
            self.values
                .iter()
                .filter(|v| **v != T::zero())
                .map(|v| v.abs().powf(p))
                .sum()
        }
    }

    pub fn l1_norm(&self) -> T {
        self.abs_power_sum(T::one())
    }

    /// `2^n Σ c²`, equal to tr ρ² (one for pure states).
    pub fn purity(&self) -> T {
        let d = T::from_usize(1usize << self.n).unwrap();
        d * self.values.iter().map(|v| *v * *v).sum::<T>()
    }

    pub fn nonzero_count(&self, threshold: T) -> usize {
        self.values.iter().filter(|v| v.abs() > threshold).count()
    }

    /// Iterates `(point, coefficient)` over all 4^n entries.
    pub fn iter(&self) -> impl Iterator<Item = (PauliPoint, T)> + '_ {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (PauliPoint::from_index(n, i), *v))
    }
}

/// Pauli coefficients with the default cap of [`COEFF_CAP`] qubits.
pub fn pauli_coefficients<T: Real>(psi: &StateVector<T>) -> Result<CoeffVector<T>> {
    pauli_coefficients_capped(psi, COEFF_CAP)
}

/// Computes all 4^n coefficients in `O(n·4^n)`: for each `a_x` the overlap
/// `conj(ψ(x⊕a_x))ψ(x)` is Walsh–Hadamard transformed over `x`.
pub fn pauli_coefficients_capped<T: Real>(
    psi: &StateVector<T>,
    cap: usize,
) -> Result<CoeffVector<T>> {
    let n = psi.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "pauli_coefficients",
            requested: n,
            cap,
            cost: format!("{} coefficients, ~{:.1e} operations", 1u128 << (2 * n), n as f64 * 4f64.powi(n as i32)),
        });
    }
    let d = 1usize << n;
    let amps = psi.amplitudes();
    let scale = T::one() / T::from_usize(d).unwrap();
    let mut values = vec![T::zero(); d * d];
    let mut re = vec![T::zero(); d];
    let mut im = vec![T::zero(); d];
    for ax in 0..d {
        for x in 0..d {
            let w = amps[x ^ ax].conj() * amps[x];
            re[x] = w.re;
            im[x] = w.im;
        }
        fwht(&mut re, Direction::Forward)?;
        fwht(&mut im, Direction::Forward)?;
        let row = &mut values[ax * d..(ax + 1) * d];
        for az in 0..d {
            let k = ((ax & az) as u64).count_ones();
            row[az] = times_i_pow(Complex::new(re[az], im[az]), k).re * scale;
        }
    }
    Ok(CoeffVector { n, values })
}

/// Local measurement basis of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    /// Pauli bits `(x, z)` of the basis operator.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Basis::Z => (false, true),
            Basis::X => (true, false),
            Basis::Y => (true, true),
        }
    }
}

/// Local frame diagonalizing `T_a`: `T_a = V Z^{a′} V†` with `a′` the support.
pub fn diagonalizing_frame(a: &PauliPoint) -> (Vec<Basis>, u64) {
    let frame = (0..a.n)
        .map(|i| {
            let b = qubit_mask(a.n, i);
            match (a.ax & b != 0, a.az & b != 0) {
                (true, false) => Basis::X,
                (true, true) => Basis::Y,
                _ => Basis::Z,
            }
        })
        .collect();
    (frame, a.support())
}

/// The Pauli `V Z^{mask} V†` for a frame, i.e. the frame's basis operator on
/// every qubit in `mask`.
pub fn frame_pauli(frame: &[Basis], mask: u64) -> PauliPoint {
    let n = frame.len();
    let (mut ax, mut az) = (0, 0);
    for (i, b) in frame.iter().enumerate() {
        let bit = qubit_mask(n, i);
        if mask & bit == 0 {
            continue;
        }
        let (x, z) = b.bits();
        if x {
            ax |= bit;
        }
        if z {
            az |= bit;
        }
    }
    PauliPoint { n, ax, az }
}
