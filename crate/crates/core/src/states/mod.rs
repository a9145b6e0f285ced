//! Pure and mixed states, constructors, fidelity and measurement.

mod io;
mod mps;
mod phase;

pub use io::{DensityFile, StateFile};
pub use mps::{mps_to_statevector, random_real_mps, RealMPS};
pub use phase::{
    apply_diagonal, complete_hypergraph_edges, hypergraph_state, phase_state, phase_strip,
    PhaseFunction,
};

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{qubit_mask, Basis};
use crate::rng::sample_index;
use crate::scalar::Real;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Hard cap on dense state-vector size.
pub const MAX_STATE_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-9;

/// `2^n` complex amplitudes; qubit 1 is the most significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::CapExceeded {
            what: "state vector",
            requested: n,
            cap: MAX_STATE_QUBITS,
            cost: format!("{} amplitudes", 1u64 << n),
        });
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// Validated constructor; the norm must be one within 1e−9.
    pub fn new(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n)?;
        check_dim(1 << n, amps.len())?;
        let s = Self { n, amps };
        let dev = (s.norm_sqr() - T::one()).abs().as_f64();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(s)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(n: usize, mut amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n)?;
        check_dim(1 << n, amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        amps.iter_mut().for_each(|a| *a = *a / norm);
        Ok(Self { n, amps })
    }

    pub fn from_real(n: usize, values: &[T]) -> Result<Self> {
        Self::from_unnormalized(n, values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    /// Computational basis state |x⟩.
    pub fn basis(n: usize, x: u64) -> Result<Self> {
        check_qubits(n)?;
        if x >> n != 0 {
            return invalid(format!("basis index {x} out of range for {n} qubits"));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[x as usize] = Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// |+⟩^{⊗n}.
    pub fn plus(n: usize) -> Self {
        let d = 1usize << n;
        let a = T::one() / T::from_usize(d).unwrap().sqrt();
        Self {
            n,
            amps: vec![Complex::new(a, T::zero()); d],
        }
    }

    /// I.i.d. complex standard Gaussians, normalized.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::of(re), T::of(im))
            })
            .collect();
        Self::from_unnormalized(n, amps).expect("Gaussian vector is nonzero")
    }

    /// Dicke state: uniform superposition of weight-k strings.
    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        check_qubits(n)?;
        if k > n {
            return invalid(format!("Dicke weight {k} exceeds {n}"));
        }
        let amps = (0..1u64 << n)
            .map(|x| {
                let v = if x.count_ones() as usize == k { T::one() } else { T::zero() };
                Complex::new(v, T::zero())
            })
            .collect();
        Self::from_unnormalized(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_dim(self.n, other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Euclidean distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.amps.iter().all(|a| a.im.abs() <= tol)
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> StateVector<U> {
        StateVector {
            n: self.n,
            amps: self
                .amps
                .iter()
                .map(|a| Complex::new(U::of(a.re.as_f64()), U::of(a.im.as_f64())))
                .collect(),
        }
    }

    /// Applies a 2×2 unitary `[[u00, u01], [u10, u11]]` to qubit `q`.
    pub fn apply_single_qubit(&mut self, q: usize, u: [[Complex<T>; 2]; 2]) {
        let bit = qubit_mask(self.n, q) as usize;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                let (a0, a1) = (self.amps[x], self.amps[x | bit]);
                self.amps[x] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[x | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    /// CNOT with the given control and target qubits.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target || control >= self.n || target >= self.n {
            return invalid(format!("bad CNOT pair ({control}, {target}) on {} qubits", self.n));
        }
        let (c, t) = (qubit_mask(self.n, control) as usize, qubit_mask(self.n, target) as usize);
        for x in 0..self.amps.len() {
            if x & c != 0 && x & t == 0 {
                self.amps.swap(x, x | t);
            }
        }
        Ok(())
    }

    /// Rotates each qubit so that measuring Z realizes the requested basis.
    pub fn rotate_to_frame(&self, frame: &[Basis]) -> Result<Self> {
        check_dim(self.n, frame.len())?;
        let mut out = self.clone();
        for (q, b) in frame.iter().enumerate() {
            if let Some(u) = frame_rotation::<T>(*b) {
                out.apply_single_qubit(q, u);
            }
        }
        Ok(out)
    }

    /// Born probabilities of a measurement in the given local frame.
    pub fn born_probabilities(&self, frame: &[Basis]) -> Result<Vec<T>> {
        Ok(self
            .rotate_to_frame(frame)?
            .amps
            .iter()
            .map(|a| a.norm_sqr())
            .collect())
    }

    /// Computational-basis probabilities |ξ_x|².
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Unitary taking the basis eigenvectors to |0⟩ (eigenvalue +1) and |1⟩ (−1).
///
/// X: Hadamard. Y: `H·S†`, which sends `(|0⟩ + i|1⟩)/√2` to |0⟩.
pub fn frame_rotation<T: Real>(b: Basis) -> Option<[[Complex<T>; 2]; 2]> {
    let h = T::FRAC_1_SQRT_2();
    let c = |re: T, im: T| Complex::new(re, im);
    let z = T::zero();
    match b {
        Basis::Z => None,
        Basis::X => Some([[c(h, z), c(h, z)], [c(h, z), c(-h, z)]]),
        Basis::Y => Some([[c(h, z), c(z, -h)], [c(h, z), c(z, h)]]),
    }
}

/// Mixed state: a dense matrix, or a weighted ensemble of pure trajectories.
#[derive(Clone, Debug, PartialEq)]
pub enum DensityState<T> {
    Dense(CMatrix<T>),
    Mixture(Vec<(T, StateVector<T>)>),
}

impl<T: Real> DensityState<T> {
    pub fn pure(psi: StateVector<T>) -> Self {
        DensityState::Mixture(vec![(T::one(), psi)])
    }

    /// Validated dense density matrix (unit trace, Hermitian, PSD within 1e−9).
    pub fn dense(m: CMatrix<T>) -> Result<Self> {
        if !m.dim().is_power_of_two() {
            return invalid("density matrix dimension must be a power of two");
        }
        let tr = m.trace();
        let dev = ((tr.re - T::one()).abs() + tr.im.abs()).as_f64();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        let herm = m.hermiticity_deviation().as_f64();
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        if m.dim() <= 256 {
            let (vals, _) = m.eigh(T::of(1e-12))?;
            if let Some(&min) = vals.last() {
                if min < T::of(-1e-9) {
                    return invalid(format!("density matrix has eigenvalue {}", min));
                }
            }
        }
        Ok(DensityState::Dense(m))
    }

    /// Validated ensemble; weights must be nonnegative and sum to one.
    pub fn mixture(parts: Vec<(T, StateVector<T>)>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return invalid("empty mixture");
        };
        let n = first.1.n();
        let mut total = T::zero();
        for (w, s) in &parts {
            check_dim(n, s.n())?;
            if *w < T::zero() {
                return invalid("negative mixture weight");
            }
            total = total + *w;
        }
        let dev = (total - T::one()).abs().as_f64();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(DensityState::Mixture(parts))
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let w = T::one() / T::from_usize(1 << n).unwrap();
        let parts = (0..1u64 << n)
            .map(|x| StateVector::basis(n, x).map(|s| (w, s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityState::Mixture(parts))
    }

    pub fn n(&self) -> usize {
        match self {
            DensityState::Dense(m) => m.dim().trailing_zeros() as usize,
            DensityState::Mixture(parts) => parts[0].1.n(),
        }
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        match self {
            DensityState::Dense(m) => m.clone(),
            DensityState::Mixture(parts) => {
                let d = 1usize << self.n();
                parts.iter().fold(CMatrix::zeros(d), |acc, (w, s)| {
                    acc.add(&CMatrix::outer(s.amplitudes()).scale(*w)).unwrap()
                })
            }
        }
    }

    /// Exact Born distribution in a local frame.
    pub fn born_probabilities(&self, frame: &[Basis]) -> Result<Vec<T>> {
        check_dim(self.n(), frame.len())?;
        match self {
            DensityState::Mixture(parts) => {
                let mut out = vec![T::zero(); 1 << self.n()];
                for (w, s) in parts {
                    for (o, p) in out.iter_mut().zip(s.born_probabilities(frame)?) {
                        *o = *o + *w * p;
                    }
                }
                Ok(out)
            }
            DensityState::Dense(m) => {
                let u = frame_unitary(frame);
                let rotated = u.matmul(m)?.matmul(&u.adjoint())?;
                Ok((0..m.dim()).map(|i| rotated[(i, i)].re.max(T::zero())).collect())
            }
        }
    }

    /// Picks one pure trajectory according to the mixture weights.
    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&StateVector<T>> {
        match self {
            DensityState::Dense(_) => None,
            DensityState::Mixture(parts) => {
                let w: Vec<T> = parts.iter().map(|p| p.0).collect();
                Some(&parts[sample_index(&w, rng)].1)
            }
        }
    }
}

/// Dense tensor product of the per-qubit frame rotations.
pub fn frame_unitary<T: Real>(frame: &[Basis]) -> CMatrix<T> {
    let n = frame.len();
    let mut u = CMatrix::identity(1 << n);
    for (q, b) in frame.iter().enumerate() {
        if let Some(g) = frame_rotation::<T>(*b) {
            // Left-multiply by the single-qubit gate on qubit q.
            let bit = qubit_mask(n, q) as usize;
            for col in 0..1usize << n {
                for r in 0..1usize << n {
                    if r & bit == 0 {
                        let (a0, a1) = (u[(r, col)], u[(r | bit, col)]);
                        u[(r, col)] = g[0][0] * a0 + g[0][1] * a1;
                        u[(r | bit, col)] = g[1][0] * a0 + g[1][1] * a1;
                    }
                }
            }
        }
    }
    u
}

/// Real stabilizer state from `|0…0⟩` through `depth` random gates drawn
/// uniformly from X, H (on a random qubit) and CNOT (on a random ordered pair).
pub fn random_real_stabilizer<T: Real, R: Rng + ?Sized>(
    n: usize,
    depth: usize,
    rng: &mut R,
) -> Result<StateVector<T>> {
    let mut psi = StateVector::basis(n, 0)?;
    let h = T::FRAC_1_SQRT_2();
    let (z, o) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
    let had = [[o * h, o * h], [o * h, -o * h]];
    for _ in 0..depth {
        let q = rng.random_range(0..n);
        match rng.random_range(0..3) {
            0 => psi.apply_single_qubit(q, [[z, o], [o, z]]),
            1 => psi.apply_single_qubit(q, had),
            _ if n > 1 => {
                let t = (q + rng.random_range(1..n)) % n;
                psi.apply_cnot(q, t)?;
            }
            _ => psi.apply_single_qubit(q, had),
        }
    }
    Ok(psi)
}

/// (1−p)|ψ⟩⟨ψ| + p·I/2^n as a trajectory mixture.
pub fn depolarize<T: Real>(psi: &StateVector<T>, p: T) -> Result<DensityState<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return invalid(format!("depolarizing probability {p} outside [0, 1]"));
    }
    let n = psi.n();
    let mut parts = Vec::with_capacity(1 + (1 << n));
    if p < T::one() {
        parts.push((T::one() - p, psi.clone()));
    }
    if p > T::zero() {
        let w = p / T::from_usize(1 << n).unwrap();
        for x in 0..1u64 << n {
            parts.push((w, StateVector::basis(n, x)?));
        }
    }
    Ok(DensityState::Mixture(parts))
}

/// Depolarizing strength giving fidelity `f` with the undisturbed target:
/// solves `(1−p) + p/2^n = f`.
pub fn depolarizing_for_fidelity(n: usize, f: f64) -> Result<f64> {
    let floor = 1.0 / (1u64 << n) as f64;
    if !(floor..=1.0).contains(&f) {
        return invalid(format!("fidelity {f} outside [{floor}, 1]"));
    }
    Ok((1.0 - f) / (1.0 - floor))
}

/// ⟨ψ|ρ|ψ⟩.
pub fn exact_fidelity<T: Real>(rho: &DensityState<T>, psi: &StateVector<T>) -> Result<T> {
    check_dim(rho.n(), psi.n())?;
    match rho {
        DensityState::Dense(m) => m.expectation(psi.amplitudes()),
        DensityState::Mixture(parts) => parts.iter().try_fold(T::zero(), |acc, (w, s)| {
            Ok(acc + *w * s.inner(psi)?.norm_sqr())
        }),
    }
}

/// Samples one outcome after rotating into `frame`.
pub fn measure_computational<T: Real, R: Rng + ?Sized>(
    state: &DensityState<T>,
    frame: &[Basis],
    rng: &mut R,
) -> Result<u64> {
    let probs = match state {
        DensityState::Mixture(_) => {
            let psi = state.sample_component(rng).expect("mixture component");
            psi.born_probabilities(frame)?
        }
        DensityState::Dense(_) => state.born_probabilities(frame)?,
    };
    Ok(sample_index(&probs, rng) as u64)
}

/// Pure-state convenience wrapper for [`measure_computational`].
pub fn measure_pure<T: Real, R: Rng + ?Sized>(
    psi: &StateVector<T>,
    frame: &[Basis],
    rng: &mut R,
) -> Result<u64> {
    Ok(sample_index(&psi.born_probabilities(frame)?, rng) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{diagonalizing_frame, dot2, pauli_expectation, PauliPoint};
    use crate::rng::stream;

    #[test]
    fn cnot_and_random_stabilizers() {
        let mut psi = StateVector::<f64>::basis(2, 0b10).unwrap();
        psi.apply_cnot(0, 1).unwrap();
        assert_eq!(psi, StateVector::basis(2, 0b11).unwrap());
        assert!(psi.apply_cnot(1, 1).is_err());
        let mut rng = stream(4, 0);
        for n in 1..=4 {
            let s = random_real_stabilizer::<f64, _>(n, 30, &mut rng).unwrap();
            assert!(s.is_real(1e-12));
            // Stabilizer states have exactly 2^n Paulis with |⟨T_a⟩| = 1.
            let unit = (0..1usize << (2 * n))
                .filter(|&i| (pauli_expectation(&s, &PauliPoint::from_index(n, i)).unwrap().abs() - 1.0).abs() < 1e-9)
                .count();
            assert_eq!(unit, 1 << n);
        }
    }

    #[test]
    fn constructor_validates_norm_and_length() {
        let c = |r: f64| Complex::new(r, 0.0);
        assert!(StateVector::new(1, vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::new(1, vec![c(1.0)]).is_err());
        assert!(StateVector::new(1, vec![c(0.6), c(0.8)]).is_ok());
        assert!(StateVector::<f64>::from_unnormalized(1, vec![c(0.0), c(0.0)]).is_err());
        assert!(StateVector::<f64>::basis(30, 0).is_err());
    }

    #[test]
    fn haar_is_normalized_and_seed_reproducible() {
        let a = StateVector::<f64>::haar_random(5, &mut stream(3, 0));
        let b = StateVector::<f64>::haar_random(5, &mut stream(3, 0));
        assert_eq!(a, b);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dicke_examples() {
        let d = StateVector::<f64>::dicke(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [0.0, h, h, 0.0];
        for (a, e) in d.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-15);
        }
        let d = StateVector::<f64>::dicke(4, 2).unwrap();
        assert_eq!(d.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 6);
        assert!(StateVector::<f64>::dicke(3, 4).is_err());
    }

    #[test]
    fn measurement_examples() {
        let zero = DensityState::pure(StateVector::<f64>::basis(1, 0).unwrap());
        let plus = DensityState::pure(StateVector::<f64>::plus(1));
        let mut rng = stream(4, 0);
        for _ in 0..100 {
            assert_eq!(measure_computational(&zero, &[Basis::Z], &mut rng).unwrap(), 0);
            assert_eq!(measure_computational(&plus, &[Basis::X], &mut rng).unwrap(), 0);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i = StateVector::new(1, vec![Complex::new(h, 0.0), Complex::new(0.0, h)]).unwrap();
        let p = plus_i.born_probabilities(&[Basis::Y]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_frequencies_pass_chi_square() {
        let mut rng = stream(8, 0);
        let psi = StateVector::<f64>::haar_random(3, &mut rng);
        let rho = DensityState::pure(psi.clone());
        let frame = [Basis::X, Basis::Y, Basis::Z];
        let probs = psi.born_probabilities(&frame).unwrap();
        let shots = 100_000;
        let mut counts = [0usize; 8];
        for _ in 0..shots {
            counts[measure_computational(&rho, &frame, &mut rng).unwrap() as usize] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&c, &p)| {
                let e = p * shots as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        // 7 degrees of freedom; 99.9% quantile is 24.3.
        assert!(chi2 < 24.3, "chi2 = {chi2}");
    }

    #[test]
    fn frame_parity_reproduces_pauli_expectation() {
        let mut rng = stream(10, 0);
        for _ in 0..10 {
            let psi = StateVector::<f64>::haar_random(2, &mut rng);
            for idx in 0..16 {
                let a = PauliPoint::from_index(2, idx);
                let (frame, mask) = diagonalizing_frame(&a);
                let probs = psi.born_probabilities(&frame).unwrap();
                let parity_mean: f64 = probs
                    .iter()
                    .enumerate()
                    .map(|(b, p)| if dot2(mask, b as u64) == 0 { *p } else { -*p })
                    .sum();
                let direct = pauli_expectation(&psi, &a).unwrap();
                assert!((parity_mean - direct).abs() < 1e-12, "{a}");
            }
        }
    }

    #[test]
    fn dense_and_mixture_born_agree() {
        let mut rng = stream(12, 0);
        let psi = StateVector::<f64>::haar_random(3, &mut rng);
        let mix = depolarize(&psi, 0.3).unwrap();
        let dense = DensityState::dense(mix.to_dense()).unwrap();
        let frame = [Basis::Y, Basis::X, Basis::Z];
        let a = mix.born_probabilities(&frame).unwrap();
        let b = dense.born_probabilities(&frame).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarize_and_fidelity() {
        let mut rng = stream(13, 0);
        let psi = StateVector::<f64>::haar_random(3, &mut rng);
        let pure = depolarize(&psi, 0.0).unwrap();
        assert!((exact_fidelity(&pure, &psi).unwrap() - 1.0).abs() < 1e-12);
        let mixed = depolarize(&psi, 1.0).unwrap();
        assert!((exact_fidelity(&mixed, &psi).unwrap() - 0.125).abs() < 1e-12);
        let p = 0.37;
        let rho = depolarize(&psi, p).unwrap();
        let f = exact_fidelity(&rho, &psi).unwrap();
        assert!((f - ((1.0 - p) + p / 8.0)).abs() < 1e-12);
        let dense = DensityState::dense(rho.to_dense()).unwrap();
        assert!((exact_fidelity(&dense, &psi).unwrap() - f).abs() < 1e-12);
        assert!(depolarize(&psi, 1.5).is_err());
    }

    #[test]
    fn fidelity_is_linear_in_the_density() {
        let mut rng = stream(14, 0);
        let target = StateVector::<f64>::haar_random(2, &mut rng);
        let states: Vec<_> = (0..4).map(|_| StateVector::haar_random(2, &mut rng)).collect();
        let q = [0.1, 0.2, 0.3, 0.4];
        let mix = DensityState::mixture(q.iter().copied().zip(states.iter().cloned()).collect()).unwrap();
        let lhs = exact_fidelity(&mix, &target).unwrap();
        let rhs: f64 = q
            .iter()
            .zip(&states)
            .map(|(w, s)| w * exact_fidelity(&DensityState::pure(s.clone()), &target).unwrap())
            .sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn derived_depolarizing_strength() {
        let p = depolarizing_for_fidelity(7, 0.8955).unwrap();
        assert!((p - 0.10532).abs() < 1e-5);
        assert!(((1.0 - p) + p / 128.0 - 0.8955).abs() < 1e-12);
    }

    #[test]
    fn dense_validation() {
        let bad = CMatrix::<f64>::diagonal(&[1.2, -0.2]);
        assert!(DensityState::dense(bad).is_err());
        let ok = CMatrix::<f64>::diagonal(&[0.5, 0.5]);
        let rho = DensityState::dense(ok).unwrap();
        let i = PauliPoint::identity(1);
        assert!((pauli_expectation(&rho, &i).unwrap() - 1.0).abs() < 1e-15);
    }
}
