//! Complete MUB family from a symplectic spread over GF(2^n).
//!
//! For α ∈ GF(2^n) the symmetric matrix `S_α[i][j] = Tr(α tⁱ tʲ)` gives the
//! commuting class `{(x, S_α x) : x ≠ 0}`; together with the Z class these
//! 2^n + 1 classes partition the nontrivial Paulis, and their joint
//! eigenbases are mutually unbiased.

use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{apply_pauli, qubit_mask, symplectic_product, PauliPoint};
use crate::states::{DensityState, StateVector};
use num_complex::Complex64;

pub const MUB_MAX_QUBITS: usize = 4;

/// Irreducible polynomials (bit i = coefficient of tⁱ, leading term included).
const MODULI: [u64; 5] = [0, 0b11, 0b111, 0b1011, 0b10011];

#[derive(Clone, Debug)]
pub struct MubBasis {
    /// The 2^n − 1 nontrivial Paulis diagonal in this basis.
    pub class: Vec<PauliPoint>,
    /// Independent generators; vector `j` has eigenvalue `(−1)^{j_i}` on generator i.
    pub generators: Vec<PauliPoint>,
    pub vectors: Vec<StateVector<f64>>,
}

impl MubBasis {
    /// Row j is `⟨φ_j|`; measuring in the basis means applying this unitary.
    pub fn measurement_unitary(&self) -> CMatrix<f64> {
        let d = self.vectors.len();
        CMatrix::from_fn(d, |j, x| self.vectors[j].amplitudes()[x].conj())
    }

    /// Exact Born probabilities `⟨φ_j|ρ|φ_j⟩`.
    pub fn probabilities(&self, rho: &DensityState<f64>) -> Result<Vec<f64>> {
        match rho {
            DensityState::Dense(m) => self
                .vectors
                .iter()
                .map(|v| m.expectation(v.amplitudes()))
                .collect(),
            DensityState::Mixture(parts) => {
                let mut out = vec![0.0; self.vectors.len()];
                for (w, s) in parts {
                    for (o, v) in out.iter_mut().zip(&self.vectors) {
                        *o += w * v.inner(s)?.norm_sqr();
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn is_computational(&self) -> bool {
        self.class.iter().all(|p| p.ax() == 0)
    }
}

#[derive(Clone, Debug)]
pub struct MubFamily {
    pub n: usize,
    pub bases: Vec<MubBasis>,
}

impl MubFamily {
    /// Every basis vector in order, `2^n(2^n + 1)` of them.
    pub fn all_vectors(&self) -> impl Iterator<Item = &StateVector<f64>> {
        self.bases.iter().flat_map(|b| b.vectors.iter())
    }
}

fn gf_mul(a: u64, b: u64, n: usize) -> u64 {
    let modulus = MODULI[n];
    let (mut a, mut b, mut acc) = (a, b, 0u64);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> n & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

/// Field trace `y + y² + ⋯ + y^{2^{n−1}}`, which lies in {0, 1}.
fn gf_trace(y: u64, n: usize) -> u64 {
    let (mut acc, mut p) = (0, y);
    for _ in 0..n {
        acc ^= p;
        p = gf_mul(p, p, n);
    }
    debug_assert!(acc <= 1);
    acc
}

/// `S_α` as row bit masks over the qubit ordering.
fn spread_matrix(alpha: u64, n: usize) -> Vec<u64> {
    let basis: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    (0..n)
        .map(|i| {
            (0..n).fold(0u64, |row, j| {
                let v = gf_trace(gf_mul(alpha, gf_mul(basis[i], basis[j], n), n), n);
                if v == 1 {
                    row | qubit_mask(n, j)
                } else {
                    row
                }
            })
        })
        .collect()
}

fn apply_bits(rows: &[u64], x: u64, n: usize) -> u64 {
    (0..n).fold(0, |out, i| {
        if (rows[i] & x).count_ones() % 2 == 1 {
            out | qubit_mask(n, i)
        } else {
            out
        }
    })
}

/// Eigenvector of the generators with sign pattern `s`, via the projector
/// `∏(I + (−1)^{s_i} T_{g_i})/2` applied to the best computational vector.
fn joint_eigenvector(n: usize, generators: &[PauliPoint], s: usize) -> Result<StateVector<f64>> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for y in 0..1u64 << n {
        let mut v = StateVector::<f64>::basis(n, y)?;
        for (i, g) in generators.iter().enumerate() {
            let sign = if s >> i & 1 == 1 { -0.5 } else { 0.5 };
            let tv = apply_pauli(g, &v)?;
            let amps: Vec<Complex64> = v
                .amplitudes()
                .iter()
                .zip(tv.amplitudes())
                .map(|(a, b)| a * 0.5 + b * sign)
                .collect();
            v = StateVector::from_raw(n, amps);
        }
        let nrm = v.norm_sqr();
        if best.as_ref().is_none_or(|b| nrm > b.0) {
            best = Some((nrm, v.into_amplitudes()));
        }
    }
    let (nrm, amps) = best.expect("at least one basis vector");
    if nrm < 1e-9 {
        return Err(Error::Numerical("stabilizer projector annihilated every basis vector".into()));
    }
    StateVector::from_unnormalized(n, amps)
}

/// The 2^n + 1 mutually unbiased bases on `n ≤ 4` qubits.
pub fn mub_family(n: usize) -> Result<MubFamily> {
    if n == 0 {
        return invalid("MUB family needs n ≥ 1");
    }
    if n > MUB_MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "MUB qubits",
            requested: n,
            cap: MUB_MAX_QUBITS,
            cost: format!("{} bases of {} vectors", (1u64 << n) + 1, 1u64 << n),
        });
    }
    let d = 1u64 << n;
    let mut specs: Vec<(Vec<PauliPoint>, Vec<PauliPoint>)> = Vec::new();
    let z_class: Vec<PauliPoint> = (1..d).map(|z| PauliPoint::new(n, 0, z)).collect::<Result<_>>()?;
    let z_gens: Vec<PauliPoint> = (0..n).map(|i| PauliPoint::new(n, 0, qubit_mask(n, i))).collect::<Result<_>>()?;
    specs.push((z_class, z_gens));
    for alpha in 0..d {
        let s = spread_matrix(alpha, n);
        let class = (1..d).map(|x| PauliPoint::new(n, x, apply_bits(&s, x, n))).collect::<Result<_>>()?;
        let gens = (0..n)
            .map(|i| {
                let x = qubit_mask(n, i);
                PauliPoint::new(n, x, apply_bits(&s, x, n))
            })
            .collect::<Result<_>>()?;
        specs.push((class, gens));
    }
    verify_partition(n, &specs)?;
    let bases = specs
        .into_iter()
        .map(|(class, generators)| {
            let vectors = if class.iter().all(|p| p.ax() == 0) {
                (0..d).map(|y| StateVector::basis(n, y)).collect::<Result<_>>()?
            } else {
                (0..d as usize)
                    .map(|s| joint_eigenvector(n, &generators, s))
                    .collect::<Result<_>>()?
            };
            Ok(MubBasis {
                class,
                generators,
                vectors,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MubFamily { n, bases })
}

/// Exhaustive check: classes commute internally and cover each nontrivial
/// Pauli exactly once.
fn verify_partition(n: usize, specs: &[(Vec<PauliPoint>, Vec<PauliPoint>)]) -> Result<()> {
    let mut seen = vec![false; 1 << (2 * n)];
    for (class, _) in specs {
        for (i, a) in class.iter().enumerate() {
            if std::mem::replace(&mut seen[a.index()], true) {
                return Err(Error::Numerical(format!("Pauli {a} appears in two MUB classes")));
            }
            for b in &class[..i] {
                if symplectic_product(a, b)? != 0 {
                    return Err(Error::Numerical(format!("{a} and {b} anticommute within a class")));
                }
            }
        }
    }
    if seen.iter().skip(1).any(|s| !s) {
        return Err(Error::Numerical("MUB classes miss a Pauli".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_bases_are_z_x_y() {
        let f = mub_family(1).unwrap();
        let labels: Vec<String> = f.bases.iter().map(|b| b.class[0].label()).collect();
        assert_eq!(labels, vec!["Z", "X", "Y"]);
    }

    #[test]
    fn bases_are_orthonormal_and_unbiased() {
        for n in 1..=4 {
            let f = mub_family(n).unwrap();
            let d = 1usize << n;
            assert_eq!(f.bases.len(), d + 1);
            for (i, bi) in f.bases.iter().enumerate() {
                for (j, bj) in f.bases.iter().enumerate() {
                    for (p, u) in bi.vectors.iter().enumerate() {
                        for (q, v) in bj.vectors.iter().enumerate() {
                            let o = u.inner(v).unwrap().norm_sqr();
                            let expect = if i != j {
                                1.0 / d as f64
                            } else if p == q {
                                1.0
                            } else {
                                0.0
                            };
                            assert!((o - expect).abs() < 1e-9, "n={n} ({i},{p}) ({j},{q}): {o}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vectors_are_joint_eigenvectors_of_their_class() {
        let f = mub_family(3).unwrap();
        for b in &f.bases {
            for v in &b.vectors {
                for p in &b.class {
                    let e = crate::pauli::pauli_expectation(v, p).unwrap();
                    assert!((e.abs() - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn two_design_identity() {
        for n in 1..=3 {
            let f = mub_family(n).unwrap();
            let d = 1usize << n;
            let dd = d * d;
            // Average of |φ⟩⟨φ|^{⊗2} against (I + SWAP)/(d(d+1)).
            let mut avg = vec![Complex64::new(0.0, 0.0); dd * dd];
            let count = (d * (d + 1)) as f64;
            for v in f.all_vectors() {
                let a = v.amplitudes();
                for r in 0..dd {
                    let ket = a[r / d] * a[r % d];
                    for c in 0..dd {
                        avg[r * dd + c] += ket * (a[c / d] * a[c % d]).conj() / count;
                    }
                }
            }
            let norm = 1.0 / (d * (d + 1)) as f64;
            for r in 0..dd {
                for c in 0..dd {
                    let swap = (r / d, r % d) == (c % d, c / d);
                    let expect = norm * ((r == c) as u8 as f64 + swap as u8 as f64);
                    assert!((avg[r * dd + c] - expect).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(mub_family(5), Err(Error::CapExceeded { .. })));
        assert!(mub_family(0).is_err());
    }
}
