//! NLDFE: partition the Pauli coefficients into qubit-wise commuting groups,
//! each diagonal in a local frame `V ∈ {Z, X, Y}^{⊗n}`, and estimate each
//! group from a single frame measurement through its Walsh–Hadamard transform.

use super::{Branch, BranchOutcome, ShotRecord};
use crate::error::{check_dim, invalid, Error, Result};
use crate::pauli::{frame_pauli, Basis, CoeffVector};
use crate::rng::{CumulativeTable, StreamRng};
use crate::samplers::ZERO_COEFF;
use crate::scalar::Real;
use crate::states::{measure_computational, DensityState};
use crate::wht::{fwht, Direction};
use serde::{Deserialize, Serialize};

/// 3^n frames of 2^n Paulis each.
pub const NLDFE_MAX_QUBITS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameOrdering {
    /// Ternary order, digit 0/1/2 = Z/X/Y, qubit 1 most significant.
    Canonical,
    /// Frames with more nonzero coefficients first; ties in canonical order.
    GreedyWeight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QWCGroup {
    pub frame: Vec<Basis>,
    /// `c^{(S)}` indexed by the Z-mask within the frame.
    pub coeffs: Vec<f64>,
    /// `ĉ^{(S)}_b = Σ_m c^{(S)}_m (−1)^{m·b}`.
    pub transform: Vec<f64>,
    /// `‖ĉ^{(S)}‖∞`.
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct QWCPartition {
    pub n: usize,
    pub groups: Vec<QWCGroup>,
    /// `W = Σ_S ‖ĉ^{(S)}‖∞`.
    pub total_weight: f64,
    /// For each of the 4^n points, the group that claimed it.
    pub owner: Vec<Option<usize>>,
    table: CumulativeTable,
}

fn frame_from_ternary(n: usize, mut t: usize) -> Vec<Basis> {
    let mut frame = vec![Basis::Z; n];
    for q in (0..n).rev() {
        frame[q] = match t % 3 {
            0 => Basis::Z,
            1 => Basis::X,
            _ => Basis::Y,
        };
        t /= 3;
    }
    frame
}

pub fn build_qwc_partition<T: Real>(coeffs: &CoeffVector<T>, ordering: FrameOrdering) -> Result<QWCPartition> {
    let n = coeffs.n();
    if n > NLDFE_MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "NLDFE partition qubits",
            requested: n,
            cap: NLDFE_MAX_QUBITS,
            cost: format!("3^{n}·2^{n} coefficient lookups"),
        });
    }
    let c: Vec<f64> = coeffs.values().iter().map(|v| v.as_f64()).collect();
    let d = 1usize << n;
    let frames: Vec<Vec<Basis>> = (0..3usize.pow(n as u32)).map(|t| frame_from_ternary(n, t)).collect();
    let mut order: Vec<usize> = (0..frames.len()).collect();
    if ordering == FrameOrdering::GreedyWeight {
        let counts: Vec<usize> = frames
            .iter()
            .map(|f| (0..d as u64).filter(|&m| c[frame_pauli(f, m).index()].abs() > ZERO_COEFF).count())
            .collect();
        order.sort_by_key(|&i| std::cmp::Reverse(counts[i]));
    }
    let mut owner = vec![None; d * d];
    let mut groups = Vec::new();
    for &fi in &order {
        let frame = &frames[fi];
        let mut cs = vec![0.0; d];
        let mut claimed = false;
        for m in 0..d {
            let idx = frame_pauli(frame, m as u64).index();
            if owner[idx].is_none() && c[idx].abs() > ZERO_COEFF {
                owner[idx] = Some(groups.len());
                cs[m] = c[idx];
                claimed = true;
            }
        }
        if !claimed {
            continue;
        }
        let mut transform = cs.clone();
        fwht(&mut transform, Direction::Forward)?;
        let weight = transform.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        groups.push(QWCGroup {
            frame: frame.clone(),
            coeffs: cs,
            transform,
            weight,
        });
    }
    let table = CumulativeTable::new(groups.iter().map(|g| g.weight))
        .ok_or_else(|| Error::InvalidArgument("target has no nonzero coefficients".into()))?;
    Ok(QWCPartition {
        n,
        total_weight: table.total(),
        groups,
        owner,
        table,
    })
}

impl QWCPartition {
    pub fn group_probability(&self, g: usize) -> f64 {
        self.table.probability(g)
    }
}

/// One NLDFE shot: pick a group ∝ its weight, measure in its frame, return
/// `W · ĉ_b / ‖ĉ‖∞`.
pub fn nldfe_shot(rho: &DensityState<f64>, part: &QWCPartition, rng: &mut StreamRng) -> Result<ShotRecord> {
    check_dim(part.n, rho.n())?;
    if part.groups.is_empty() {
        return invalid("empty partition");
    }
    let g = part.table.draw(rng);
    let group = &part.groups[g];
    let b = measure_computational(rho, &group.frame, rng)?;
    let value = part.total_weight * group.transform[b as usize] / group.weight;
    Ok(ShotRecord {
        value,
        point: None,
        group: Some(g),
        branches: vec![BranchOutcome {
            branch: Branch::Single,
            value,
            ancilla: None,
            bits: b,
        }],
    })
}

/// Expected shot value from exact Born distributions.
pub fn nldfe_exact_expectation(rho: &DensityState<f64>, part: &QWCPartition) -> Result<f64> {
    let mut total = 0.0;
    for g in &part.groups {
        let probs = rho.born_probabilities(&g.frame)?;
        total += probs.iter().zip(&g.transform).map(|(p, t)| p * t).sum::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magic::norms;
    use crate::pauli::{pauli_coefficients, PauliPoint};
    use crate::rng::stream;
    use crate::states::{depolarize, exact_fidelity, hypergraph_state, StateVector};
    use crate::stats::MeanStderr;
    use std::f64::consts::FRAC_PI_4;

    fn t_state() -> StateVector<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![
            num_complex::Complex64::new(h, 0.0),
            num_complex::Complex64::from_polar(h, FRAC_PI_4),
        ];
        StateVector::new(1, amps).unwrap()
    }

    #[test]
    fn ternary_frames_follow_canonical_order() {
        assert_eq!(frame_from_ternary(2, 0), vec![Basis::Z, Basis::Z]);
        assert_eq!(frame_from_ternary(2, 1), vec![Basis::Z, Basis::X]);
        assert_eq!(frame_from_ternary(2, 5), vec![Basis::X, Basis::Y]);
    }

    #[test]
    fn t_state_groups_by_hand() {
        let c = pauli_coefficients(&t_state()).unwrap();
        let p = build_qwc_partition(&c, FrameOrdering::Canonical).unwrap();
        assert_eq!(p.groups.len(), 3);
        let h = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
        // {I, Z}: ĉ = (1/2 + 0, 1/2 − 0); {X}: ĉ = (h, −h); {Y}: likewise.
        assert!((p.groups[0].weight - 0.5).abs() < 1e-12);
        assert!((p.groups[1].weight - h).abs() < 1e-12);
        assert!((p.groups[2].weight - h).abs() < 1e-12);
        assert_eq!(p.groups[1].frame, vec![Basis::X]);
        assert!((p.total_weight - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn stabilizer_target_has_unit_weight_and_constant_shots() {
        let (psi, _) = hypergraph_state::<f64>(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        let c = pauli_coefficients(&psi).unwrap();
        for ordering in [FrameOrdering::Canonical, FrameOrdering::GreedyWeight] {
            let p = build_qwc_partition(&c, ordering).unwrap();
            assert!((p.total_weight - 1.0).abs() < 1e-12);
            let rho = DensityState::pure(psi.clone());
            let mut rng = stream(1, 0);
            for _ in 0..300 {
                assert!((nldfe_shot(&rho, &p, &mut rng).unwrap().value - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn every_nonzero_point_claimed_once_and_weight_below_l1() {
        let mut rng = stream(2, 0);
        for n in 1..=4 {
            let psi = StateVector::<f64>::haar_random(n, &mut rng);
            let c = pauli_coefficients(&psi).unwrap();
            let l1 = norms(&psi, &[]).unwrap().l1;
            for ordering in [FrameOrdering::Canonical, FrameOrdering::GreedyWeight] {
                let p = build_qwc_partition(&c, ordering).unwrap();
                for (a, v) in c.iter() {
                    assert_eq!(p.owner[a.index()].is_some(), v.abs() > ZERO_COEFF);
                }
                // Each claimed coefficient sits in exactly one group's vector.
                let mut seen = 0;
                for g in &p.groups {
                    seen += g.coeffs.iter().filter(|v| **v != 0.0).count();
                }
                assert_eq!(seen, c.nonzero_count(ZERO_COEFF));
                assert_eq!(p.owner[PauliPoint::identity(n).index()], Some(0));
                assert!(p.total_weight <= l1 + 1e-9);
            }
        }
    }

    #[test]
    fn exact_and_sampled_means_match_fidelity() {
        let mut rng = stream(3, 0);
        let psi = StateVector::<f64>::haar_random(3, &mut rng);
        let rho = depolarize(&StateVector::haar_random(3, &mut rng), 0.3).unwrap();
        let p = build_qwc_partition(&pauli_coefficients(&psi).unwrap(), FrameOrdering::Canonical).unwrap();
        let f = exact_fidelity(&rho, &psi).unwrap();
        assert!((nldfe_exact_expectation(&rho, &p).unwrap() - f).abs() < 1e-9);
        let vals: Vec<f64> = (0..100_000).map(|_| nldfe_shot(&rho, &p, &mut rng).unwrap().value).collect();
        assert!(vals.iter().all(|v| v.abs() <= p.total_weight + 1e-12));
        assert!(MeanStderr::from_values(&vals).z_score(f) < 3.5);
    }

    #[test]
    fn cap_is_enforced() {
        let c = CoeffVector::from_values(10, vec![0.0f64; 1 << 20]).unwrap();
        assert!(matches!(
            build_qwc_partition(&c, FrameOrdering::Canonical),
            Err(Error::CapExceeded { .. })
        ));
    }
}
