//! In-place fast Walsh–Hadamard transform.

use crate::error::{invalid, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `v̂_b = Σ_a v_a (−1)^{a·b}`, unnormalized.
    Forward,
    /// Forward transform divided by the length.
    Inverse,
}

/// Transforms `v` in place in `O(n·2^n)`.
pub fn fwht<T: Real>(v: &mut [T], direction: Direction) -> Result<()> {
    let len = v.len();
    if len == 0 || !len.is_power_of_two() {
        return invalid(format!("fwht length {len} is not a power of two"));
    }
    butterfly(v);
    if direction == Direction::Inverse {
        let inv = T::one() / T::from_usize(len).expect("length fits scalar");
        v.iter_mut().for_each(|x| *x = *x * inv);
    }
    Ok(())
}

fn butterfly<T: Real>(v: &mut [T]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Convenience wrapper returning a transformed copy.
pub fn fwht_copy<T: Real>(v: &[T], direction: Direction) -> Result<Vec<T>> {
    let mut out = v.to_vec();
    fwht(&mut out, direction)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(v: &[f64]) -> Vec<f64> {
        (0..v.len())
            .map(|b| {
                v.iter()
                    .enumerate()
                    .map(|(a, x)| if (a & b).count_ones() % 2 == 0 { *x } else { -*x })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn delta_maps_to_ones() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        fwht(&mut v, Direction::Forward).unwrap();
        assert!(v.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn forward_twice_scales_by_length() {
        let v: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut w = v.clone();
        fwht(&mut w, Direction::Forward).unwrap();
        fwht(&mut w, Direction::Forward).unwrap();
        for (a, b) in v.iter().zip(&w) {
            assert!((16.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_naive_transform() {
        let v: Vec<f64> = (0..16).map(|i| ((i * i) as f64 * 0.11).cos()).collect();
        let fast = fwht_copy(&v, Direction::Forward).unwrap();
        for (a, b) in fast.iter().zip(naive(&v)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_length() {
        assert!(fwht(&mut [1.0f64, 2.0, 3.0], Direction::Forward).is_err());
        assert!(fwht::<f64>(&mut [], Direction::Forward).is_err());
    }

    #[test]
    fn single_precision_round_trip() {
        let v: Vec<f32> = vec![0.5, -1.0, 2.0, 0.25];
        let mut w = v.clone();
        fwht(&mut w, Direction::Forward).unwrap();
        fwht(&mut w, Direction::Inverse).unwrap();
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(n in 0usize..=12, seed in any::<u64>()) {
            let len = 1usize << n;
            let mut state = seed | 1;
            let v: Vec<f64> = (0..len).map(|_| {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                (state % 2001) as f64 / 1000.0 - 1.0
            }).collect();
            let mut w = v.clone();
            fwht(&mut w, Direction::Forward).unwrap();
            fwht(&mut w, Direction::Inverse).unwrap();
            for (a, b) in v.iter().zip(&w) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
