//! FOFE: ℓ_{2α} sampling of the phase-stripped target followed by a Hadamard
//! test on `T_a`, with the target phase folded into classical post-processing.
//!
//! Circuit per branch: ancilla `|+⟩`, `T_a` on the system when the ancilla is
//! 0, then an ancilla readout and a computational measurement of the system
//! giving `(b₁, x)`. The real branch reads the ancilla in the X basis and
//! scores `(−1)^{b₁} cos φ^{(a)}(x)`. The imaginary branch reads it in the Y
//! basis (outcome 0 for the +i eigenstate) and scores `(−1)^{b₁+1} sin φ^{(a)}(x)`,
//! where `φ^{(a)}(x) = φ(x⊕a_x) − φ(x)`.

use super::{run_shots, Branch, BranchOutcome, EstimateReport, ShotRecord};
use crate::error::{check_dim, invalid, Result};
use crate::linalg::CMatrix;
use crate::pauli::{apply_pauli, i_pow, qubit_mask, PauliPoint};
use crate::rng::{sample_index, StreamRng};
use crate::samplers::PhasePointSampler;
use crate::states::{frame_rotation, DensityState, PhaseFunction};
use crate::pauli::Basis;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Targets sharing one phase-stripped state and its sampler.
#[derive(Clone, Debug)]
pub struct FofeContext<'a> {
    sampler: &'a PhasePointSampler,
    phases: Vec<PhaseFunction>,
    run_imag: bool,
}

impl<'a> FofeContext<'a> {
    pub fn new(sampler: &'a PhasePointSampler, phases: &[PhaseFunction]) -> Result<Self> {
        if phases.is_empty() {
            return invalid("at least one phase function is required");
        }
        for p in phases {
            check_dim(sampler.n(), p.n())?;
        }
        // With every phase in {0, π} the sine terms vanish identically.
        let run_imag = phases.iter().any(|p| !p.is_real(1e-12));
        Ok(Self {
            sampler,
            phases: phases.to_vec(),
            run_imag,
        })
    }

    pub fn branches_per_shot(&self) -> usize {
        if self.run_imag {
            2
        } else {
            1
        }
    }

    pub fn runs_imaginary_branch(&self) -> bool {
        self.run_imag
    }

    /// `branches · E[w²]`, a bound on the single-shot second moment.
    pub fn second_moment_bound(&self) -> Option<f64> {
        self.sampler
            .mean_square_weight()
            .map(|m| m * self.branches_per_shot() as f64)
    }
}

/// Ancilla readout row vectors `⟨b|G` for the two branches.
fn readout_rows(branch: Branch) -> [[Complex64; 2]; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match branch {
        Branch::Imag => {
            let g = frame_rotation::<f64>(Basis::Y).expect("Y needs a rotation");
            [g[0], g[1]]
        }
        _ => [[h, h], [h, -h]],
    }
}

/// Outcome distribution over `(b₁ << n) | x` given the three diagonals
/// `(TρT†)_xx`, `(Tρ)_xx` and `ρ_xx`.
fn branch_distribution(
    n: usize,
    branch: Branch,
    diag: impl Fn(usize) -> (f64, Complex64, f64),
) -> Vec<f64> {
    let d = 1usize << n;
    let rows = readout_rows(branch);
    let mut out = vec![0.0; 2 * d];
    for x in 0..d {
        let (tt, tr, rr) = diag(x);
        for (b, g) in rows.iter().enumerate() {
            let cross = (g[0] * g[1].conj() * tr).re;
            out[(b << n) | x] = (0.5 * (g[0].norm_sqr() * tt + g[1].norm_sqr() * rr + 2.0 * cross)).max(0.0);
        }
    }
    out
}

fn sample_branch(rho: &DensityState<f64>, a: &PauliPoint, branch: Branch, rng: &mut StreamRng) -> Result<(bool, u64)> {
    let n = rho.n();
    let probs = match rho {
        DensityState::Mixture(_) => {
            let chi = rho.sample_component(rng).expect("mixture component");
            let u = apply_pauli(a, chi)?;
            let (u, v) = (u.amplitudes(), chi.amplitudes());
            branch_distribution(n, branch, |x| (u[x].norm_sqr(), u[x] * v[x].conj(), v[x].norm_sqr()))
        }
        DensityState::Dense(m) => {
            let ax = a.ax() as usize;
            branch_distribution(n, branch, |x| {
                let y = x ^ ax;
                let tr = i_pow::<f64>(a.phase_power(y as u64)) * m[(y, x)];
                (m[(y, y)].re, tr, m[(x, x)].re)
            })
        }
    };
    let k = sample_index(&probs, rng);
    Ok((k >> n == 1, (k & ((1 << n) - 1)) as u64))
}

fn branch_score(branch: Branch, ancilla: bool, phase: &PhaseFunction, ax: u64, x: u64) -> f64 {
    let d = phase.derivative(ax, x);
    match branch {
        Branch::Imag => {
            if ancilla {
                d.sin()
            } else {
                -d.sin()
            }
        }
        _ => {
            if ancilla {
                -d.cos()
            } else {
                d.cos()
            }
        }
    }
}

/// One FOFE shot, post-processed once per phase function of the context.
pub fn fofe_shot(rho: &DensityState<f64>, ctx: &FofeContext<'_>, rng: &mut StreamRng) -> Result<Vec<ShotRecord>> {
    check_dim(ctx.sampler.n(), rho.n())?;
    let draw = ctx.sampler.draw(rng);
    assert!(draw.coeff != 0.0, "sampler emitted a zero-coefficient point");
    let w = ctx.sampler.weight(draw.coeff);
    let mut outcomes = vec![(Branch::Real, sample_branch(rho, &draw.point, Branch::Real, rng)?)];
    if ctx.run_imag {
        outcomes.push((Branch::Imag, sample_branch(rho, &draw.point, Branch::Imag, rng)?));
    }
    let ax = draw.point.ax();
    Ok(ctx
        .phases
        .iter()
        .map(|phase| {
            let branches: Vec<BranchOutcome> = outcomes
                .iter()
                .map(|&(branch, (anc, x))| BranchOutcome {
                    branch,
                    value: w * branch_score(branch, anc, phase, ax, x),
                    ancilla: Some(anc),
                    bits: x,
                })
                .collect();
            ShotRecord {
                value: branches.iter().map(|b| b.value).sum(),
                point: Some(draw.point),
                group: None,
                branches,
            }
        })
        .collect())
}

/// Runs one set of circuit executions and post-processes it for every
/// target; `circuit_executions` in each report counts shared executions.
pub fn fofe_multi_target(
    rho: &DensityState<f64>,
    sampler: &PhasePointSampler,
    phases: &[PhaseFunction],
    shots: usize,
    batches: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    let ctx = FofeContext::new(sampler, phases)?;
    let per_shot = run_shots(shots, seed, |rng| fofe_shot(rho, &ctx, rng))?;
    (0..phases.len())
        .map(|t| {
            let values: Vec<f64> = per_shot.iter().map(|s| s[t].value).collect();
            let mut r = EstimateReport::from_values(&format!("fofe(target={t})"), &values, batches)?;
            r.circuit_executions = shots;
            r.variance_bound = ctx.second_moment_bound();
            Ok(r)
        })
        .collect()
}

/// `ρ ↦ U(|+⟩⟨+| ⊗ ρ)U†` with `U = |0⟩⟨0|⊗T_a + |1⟩⟨1|⊗I`, then the ancilla
/// readout rotation, as dense (n+1)-qubit matrices; returns the diagonal.
fn dense_branch_distribution(rho: &CMatrix<f64>, a: &PauliPoint, branch: Branch) -> Result<Vec<f64>> {
    let d = rho.dim();
    let t = a.to_matrix::<f64>();
    let plus = CMatrix::from_fn(2, |_, _| Complex64::new(0.5, 0.0));
    let joint = CMatrix::from_fn(2 * d, |i, j| plus[(i / d, j / d)] * rho[(i % d, j % d)]);
    let u = CMatrix::from_fn(2 * d, |i, j| match (i / d, j / d) {
        (0, 0) => t[(i % d, j % d)],
        (1, 1) if i == j => Complex64::new(1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    let g = readout_rows(branch);
    let gfull = CMatrix::from_fn(2 * d, |i, j| if i % d == j % d { g[i / d][j / d] } else { Complex64::new(0.0, 0.0) });
    let v = gfull.matmul(&u)?;
    let out = v.matmul(&joint)?.matmul(&v.adjoint())?;
    Ok((0..2 * d).map(|i| out[(i, i)].re).collect())
}

/// Expected shot value from exact branch distributions, enumerating every
/// point the sampler can emit (n ≤ 4).
pub fn fofe_exact_expectation(
    rho: &DensityState<f64>,
    sampler: &PhasePointSampler,
    coeffs: &[f64],
    phase: &PhaseFunction,
) -> Result<f64> {
    let n = sampler.n();
    if n > 4 {
        return invalid("exact FOFE expectation is enumerated only up to 4 qubits");
    }
    check_dim(1 << (2 * n), coeffs.len())?;
    let dense = rho.to_dense();
    let mut total = 0.0;
    for (i, &c) in coeffs.iter().enumerate() {
        let a = PauliPoint::from_index(n, i);
        let pa = sampler.probability(&a);
        if pa == 0.0 {
            continue;
        }
        let mut e = 0.0;
        for branch in [Branch::Real, Branch::Imag] {
            for (k, p) in dense_branch_distribution(&dense, &a, branch)?.into_iter().enumerate() {
                e += p * branch_score(branch, k >> n == 1, phase, a.ax(), (k & ((1 << n) - 1)) as u64);
            }
        }
        total += pa * sampler.weight(c) * e;
    }
    Ok(total)
}

/// Gate layout of the controlled `T_a`: one ancilla-controlled CNOT fan-out
/// onto the X-support, conjugated by the local Cliffords `V_i` that map X to
/// the required Pauli, plus the Z-only qubits as controlled-Z.
pub fn controlled_pauli_layout(a: &PauliPoint) -> String {
    let n = a.n();
    let mut fan_out = Vec::new();
    let mut cliffords = Vec::new();
    let mut cz = Vec::new();
    for i in 0..n {
        let bit = qubit_mask(n, i);
        match (a.ax() & bit != 0, a.az() & bit != 0) {
            (true, false) => fan_out.push(i + 1),
            (true, true) => {
                fan_out.push(i + 1);
                cliffords.push(format!("q{}:S", i + 1));
            }
            (false, true) => cz.push(i + 1),
            (false, false) => {}
        }
    }
    format!(
        "anti-controlled {a}: CNOT fan-out to {fan_out:?}; local Cliffords [{}]; CZ on {cz:?}",
        cliffords.join(", ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::stripped_sampler;
    use crate::pauli::pauli_coefficients;
    use crate::rng::stream;
    use crate::samplers::{exact_sampler, uniform_x_sampler};
    use crate::states::{
        complete_hypergraph_edges, depolarize, exact_fidelity, hypergraph_state, phase_state, phase_strip,
        StateVector,
    };
    use crate::stats::MeanStderr;
    use rand::Rng;

    #[test]
    fn shot_distribution_matches_dense_simulation() {
        let mut rng = stream(1, 0);
        let chi = StateVector::<f64>::haar_random(3, &mut rng);
        let rho_mix = DensityState::pure(chi.clone());
        let rho_dense = DensityState::Dense(rho_mix.to_dense());
        for idx in [5usize, 17, 42, 63] {
            let a = PauliPoint::from_index(3, idx);
            for branch in [Branch::Real, Branch::Imag] {
                let dense = dense_branch_distribution(&rho_dense.to_dense(), &a, branch).unwrap();
                let u = apply_pauli(&a, &chi).unwrap();
                let (u, v) = (u.amplitudes(), chi.amplitudes());
                let fast = branch_distribution(3, branch, |x| (u[x].norm_sqr(), u[x] * v[x].conj(), v[x].norm_sqr()));
                for (p, q) in dense.iter().zip(&fast) {
                    assert!((p - q).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn exact_expectation_is_fidelity_for_random_pairs() {
        let mut rng = stream(2, 0);
        for alpha in [0.5, 1.0] {
            for _ in 0..3 {
                let psi = StateVector::<f64>::haar_random(3, &mut rng);
                let rho = depolarize(&StateVector::haar_random(3, &mut rng), 0.25).unwrap();
                let (stripped, phase) = phase_strip(&psi);
                let c = pauli_coefficients(&stripped).unwrap();
                let s = exact_sampler(&c, alpha).unwrap();
                let e = fofe_exact_expectation(&rho, &s, c.values(), &phase).unwrap();
                let f = exact_fidelity(&rho, &psi).unwrap();
                assert!((e - f).abs() < 1e-9, "α={alpha}: {e} vs {f}");
            }
        }
    }

    #[test]
    fn hypergraph_target_outputs_plus_minus_one() {
        let (psi, phase) = hypergraph_state::<f64>(4, &complete_hypergraph_edges(4, 3)).unwrap();
        let s = uniform_x_sampler(4).unwrap();
        let ctx = FofeContext::new(&s, &[phase]).unwrap();
        assert!(!ctx.runs_imaginary_branch());
        let rho = depolarize(&psi, 0.1).unwrap();
        let mut rng = stream(3, 0);
        for _ in 0..500 {
            let v = fofe_shot(&rho, &ctx, &mut rng).unwrap()[0].value;
            assert!((v.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_mean_matches_fidelity_with_complex_phase() {
        let mut rng = stream(4, 0);
        let table: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 6.0).collect();
        let phase = PhaseFunction::table(3, table).unwrap();
        let psi = phase_state::<f64>(&phase).unwrap();
        let other = StateVector::haar_random(3, &mut rng);
        let rho = DensityState::mixture(vec![(0.5, psi.clone()), (0.5, other)]).unwrap();
        let s = uniform_x_sampler(3).unwrap();
        let ctx = FofeContext::new(&s, &[phase]).unwrap();
        assert_eq!(ctx.branches_per_shot(), 2);
        let vals: Vec<f64> = (0..100_000)
            .map(|_| fofe_shot(&rho, &ctx, &mut rng).unwrap()[0].value)
            .collect();
        assert!(vals.iter().all(|v| v.abs() <= 2.0 + 1e-12));
        let m = MeanStderr::from_values(&vals);
        assert!(m.z_score(exact_fidelity(&rho, &psi).unwrap()) < 3.5, "{m:?}");
        // Phase-state targets: variance at most two, independent of n.
        assert!(m.stderr.powi(2) * vals.len() as f64 <= 2.0 + 0.05);
    }

    #[test]
    fn multi_target_reuses_executions() {
        let edges_a = complete_hypergraph_edges(4, 3);
        let edges_b = vec![vec![0, 1, 2], vec![1, 3]];
        let (psi_a, phase_a) = hypergraph_state::<f64>(4, &edges_a).unwrap();
        let (psi_b, phase_b) = hypergraph_state::<f64>(4, &edges_b).unwrap();
        let rho = depolarize(&psi_a, 0.2).unwrap();
        let s = stripped_sampler(&StateVector::plus(4), 0.5).unwrap();
        let same = fofe_multi_target(&rho, &s, &[phase_a.clone(), phase_a.clone()], 2000, 1, 7).unwrap();
        assert_eq!(same[0].mean, same[1].mean);
        assert_eq!(same[0].circuit_executions, 2000);
        let reps = fofe_multi_target(&rho, &s, &[phase_a, phase_b], 40_000, 1, 8).unwrap();
        for (r, psi) in reps.iter().zip([psi_a, psi_b]) {
            let f = exact_fidelity(&rho, &psi).unwrap();
            assert!((r.mean - f).abs() < 3.5 * r.stderr + 1e-12, "{} vs {f}", r.mean);
        }
    }

    #[test]
    fn layout_mentions_every_qubit_role() {
        let a = PauliPoint::from_label("XYZI").unwrap();
        let s = controlled_pauli_layout(&a);
        assert!(s.contains("[1, 2]") && s.contains("q2:S") && s.contains("[3]"));
    }
}
