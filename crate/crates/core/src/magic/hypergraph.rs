//! Rank statistics of hypergraph-state directional derivatives.
//!
//! For a cubic Boolean polynomial P, the derivative `P(y ⊕ x) + P(y)` is
//! quadratic in y with bilinear form `N(x)`, where `N(x)_{m,k}` is the parity
//! of x over the third vertices of triangles containing {m, k}. The Pauli ℓ₁
//! norm of the hypergraph state is `E_x 2^{rank N(x) / 2}`.

use super::{BoundMethod, VarianceBounds};
use crate::error::{invalid, Result};
use crate::f2::{f2_rank, F2Matrix};
use crate::pauli::qubit_mask;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// Boolean polynomial of degree ≤ 3; only cubic monomials affect N(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergraphPoly {
    n: usize,
    triangles: Vec<[usize; 3]>,
}

impl HypergraphPoly {
    pub fn new(n: usize, monomials: &[Vec<usize>]) -> Result<Self> {
        if n > 64 {
            return invalid("hypergraph polynomials support at most 64 vertices");
        }
        let mut triangles = Vec::new();
        for m in monomials {
            if m.is_empty() || m.len() > 3 {
                return invalid(format!("monomial {m:?} must have degree 1 to 3"));
            }
            let mut s = m.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != m.len() {
                return invalid(format!("monomial {m:?} repeats a vertex"));
            }
            if s.iter().any(|&v| v >= n) {
                return invalid(format!("monomial {m:?} has a vertex ≥ {n}"));
            }
            if s.len() == 3 {
                triangles.push([s[0], s[1], s[2]]);
            }
        }
        Ok(Self { n, triangles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// N(x) as a hollow-symmetric F₂ matrix.
    pub fn derivative_matrix(&self, x: u64) -> F2Matrix {
        let n = self.n;
        let mut m = F2Matrix::zeros(n, n);
        let bit = |v: usize| x & qubit_mask(n, v) != 0;
        for &[i, j, k] in &self.triangles {
            if bit(i) {
                m.flip_symmetric(j, k);
            }
            if bit(j) {
                m.flip_symmetric(i, k);
            }
            if bit(k) {
                m.flip_symmetric(i, j);
            }
        }
        m.mark_hollow_symmetric()
    }

    pub fn rank_at(&self, x: u64) -> usize {
        f2_rank(&self.derivative_matrix(x))
    }

    /// Exact ℓ₁ norm by enumerating every x (feasible for small n).
    pub fn exact_l1(&self) -> f64 {
        let total: f64 = (0..1u64 << self.n)
            .map(|x| (self.rank_at(x) as f64 / 2.0).exp2())
            .sum();
        total / (1u64 << self.n) as f64
    }
}

pub fn hypergraph_derivative_matrix(n: usize, monomials: &[Vec<usize>], x: u64) -> Result<F2Matrix> {
    if n < 64 && x >> n != 0 {
        return invalid(format!("direction {x:#b} has bits beyond {n} qubits"));
    }
    Ok(HypergraphPoly::new(n, monomials)?.derivative_matrix(x))
}

fn uniform_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> u64 {
    let w: u64 = rng.random();
    if n >= 64 {
        w
    } else {
        w & ((1u64 << n) - 1)
    }
}

/// Monte Carlo over uniform x: lower `2^{E rank}`, upper `E 2^{rank}`.
pub fn hypergraph_variance_bounds<R: Rng + ?Sized>(
    poly: &HypergraphPoly,
    samples: usize,
    rng: &mut R,
) -> Result<VarianceBounds> {
    if samples == 0 {
        return invalid("at least one rank sample is required");
    }
    let (mut rank_sum, mut pow_sum) = (0.0, 0.0);
    for _ in 0..samples {
        let r = poly.rank_at(uniform_word(poly.n, rng)) as f64;
        rank_sum += r;
        pow_sum += r.exp2();
    }
    let s = samples as f64;
    Ok(VarianceBounds {
        lower: (rank_sum / s).exp2(),
        upper: pow_sum / s,
        method: BoundMethod::SampledRank,
    })
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// Number of n×n hollow-symmetric F₂ matrices of the given rank.
///
/// Odd ranks never occur (alternating forms have even rank), so they yield 0.
/// For rank 2h: `∏_{i=1}^{h} 2^{2i−2}/(2^{2i}−1) · ∏_{i=0}^{2h−1} (2^{n−i} − 1)`.
pub fn hollow_symmetric_rank_count(n: usize, rank: usize) -> Result<BigUint> {
    if rank > n {
        return invalid(format!("rank {rank} exceeds dimension {n}"));
    }
    if rank % 2 == 1 {
        return Ok(BigUint::zero());
    }
    let h = rank / 2;
    let mut acc = BigRational::one();
    for i in 1..=h {
        acc *= BigRational::new(pow2(2 * i - 2), pow2(2 * i) - 1);
    }
    for i in 0..2 * h {
        acc *= BigRational::from_integer(pow2(n - i) - 1);
    }
    assert!(acc.is_integer(), "rank count must be integral");
    Ok(acc.to_integer().to_biguint().expect("nonnegative count"))
}

/// `r(n, h) = N(n, 2h) / 2^{n(n−1)/2}` for h = 0..=⌊n/2⌋, exactly.
pub fn rank_distribution(n: usize) -> Vec<BigRational> {
    let total = pow2(n * n.saturating_sub(1) / 2);
    (0..=n / 2)
        .map(|h| {
            let c = hollow_symmetric_rank_count(n, 2 * h).expect("valid rank");
            BigRational::new(BigInt::from(c), total.clone())
        })
        .collect()
}

/// Bounds for the complete 3-uniform hypergraph obtained by treating N(x) as
/// a uniformly random hollow-symmetric matrix: lower `2^{Σ 2h·r(n,h)}`,
/// upper `Σ r(n,h)·2^{2h}`.
pub fn complete3_variance_bounds(n: usize) -> Result<VarianceBounds> {
    if n < 3 {
        return invalid("complete 3-uniform hypergraphs need n ≥ 3");
    }
    let r = rank_distribution(n);
    let mut mean_rank = BigRational::zero();
    let mut upper = BigRational::zero();
    for (h, rh) in r.iter().enumerate() {
        mean_rank += rh * BigRational::from_integer(BigInt::from(2 * h));
        upper += rh * BigRational::from_integer(pow2(2 * h));
    }
    Ok(VarianceBounds {
        lower: mean_rank.to_f64().expect("finite").exp2(),
        upper: upper.to_f64().expect("finite"),
        method: BoundMethod::ClosedFormComplete,
    })
}
