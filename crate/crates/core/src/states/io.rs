//! Fixture formats: JSON `{n, amplitudes: [[re, im], …]}` and a compact binary
//! layout (`FSV1`, little-endian u32 qubit count, then f64 pairs).

use super::{DensityState, StateVector};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::path::Path;

const MAGIC: &[u8; 4] = b"FSV1";

fn ser_err(e: impl std::fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state<T: Real>(psi: &StateVector<T>) -> Self {
        Self {
            n: psi.n(),
            amplitudes: psi
                .amplitudes()
                .iter()
                .map(|a| [a.re.as_f64(), a.im.as_f64()])
                .collect(),
        }
    }

    pub fn to_state<T: Real>(&self) -> Result<StateVector<T>> {
        StateVector::new(
            self.n,
            self.amplitudes
                .iter()
                .map(|[re, im]| Complex::new(T::of(*re), T::of(*im)))
                .collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(ser_err)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(ser_err)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 16 * self.amplitudes.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for [re, im] in &self.amplitudes {
            out.extend_from_slice(&re.to_le_bytes());
            out.extend_from_slice(&im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(ser_err("missing FSV1 header"));
        }
        let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        if n > super::MAX_STATE_QUBITS {
            return Err(ser_err(format!("qubit count {n} too large")));
        }
        let body = &bytes[8..];
        if body.len() != 16 << n {
            return Err(ser_err("amplitude payload length mismatch"));
        }
        let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
        let amplitudes = body.chunks_exact(16).map(|c| [f(&c[..8]), f(&c[8..])]).collect();
        Ok(Self { n, amplitudes })
    }

    /// Writes JSON for `.json` paths, binary otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        let data = if is_json(path) {
            self.to_json()?.into_bytes()
        } else {
            self.to_bytes()
        };
        std::fs::write(path, data).map_err(ser_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let data = std::fs::read(path).map_err(ser_err)?;
        if is_json(path) {
            Self::from_json(std::str::from_utf8(&data).map_err(ser_err)?)
        } else {
            Self::from_bytes(&data)
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Dense density matrix in row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub n: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl DensityFile {
    pub fn from_density<T: Real>(rho: &DensityState<T>) -> Self {
        let m = rho.to_dense();
        Self {
            n: rho.n(),
            matrix: m.data().iter().map(|a| [a.re.as_f64(), a.im.as_f64()]).collect(),
        }
    }

    pub fn to_density<T: Real>(&self) -> Result<DensityState<T>> {
        let data = self
            .matrix
            .iter()
            .map(|[re, im]| Complex::new(T::of(*re), T::of(*im)))
            .collect();
        DensityState::dense(CMatrix::from_rows(1 << self.n, data)?)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(ser_err)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(ser_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn json_and_binary_round_trip() {
        let psi = StateVector::<f64>::haar_random(3, &mut stream(5, 0));
        let f = StateFile::from_state(&psi);
        let back: StateVector<f64> = StateFile::from_json(&f.to_json().unwrap())
            .unwrap()
            .to_state()
            .unwrap();
        assert_eq!(back, psi);
        let back: StateVector<f64> = StateFile::from_bytes(&f.to_bytes()).unwrap().to_state().unwrap();
        assert_eq!(back, psi);
        assert!(StateFile::from_bytes(b"nope").is_err());
    }

    #[test]
    fn files_on_disk() {
        let dir = std::env::temp_dir().join(format!("fidest-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let psi = StateVector::<f64>::plus(2);
        for name in ["s.json", "s.bin"] {
            let p = dir.join(name);
            StateFile::from_state(&psi).save(&p).unwrap();
            let back: StateVector<f64> = StateFile::load(&p).unwrap().to_state().unwrap();
            assert_eq!(back, psi);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn density_round_trip() {
        let rho = super::super::depolarize(&StateVector::<f64>::plus(2), 0.2).unwrap();
        let f = DensityFile::from_density(&rho);
        let back: DensityState<f64> = DensityFile::from_json(&f.to_json().unwrap())
            .unwrap()
            .to_density()
            .unwrap();
        assert!(back.to_dense().sub(&rho.to_dense()).unwrap().frobenius_norm() < 1e-15);
    }
}
