//! Shared JSON file formats.
//!
//! Complex scalars are `[re, im]` pairs; matrices are row-major nested
//! arrays. A state file holds either a density matrix
//! (`{"qubits": N, "matrix": [...]}`) or a pure state
//! (`{"qubits": N, "amps": [...]}`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{c64, ComplexMatrix};
use crate::states::{DensityMatrix, PureState, Validation};

pub type ComplexPair = [f64; 2];

fn to_pairs(m: &ComplexMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_pairs(rows: Vec<Vec<ComplexPair>>) -> Result<ComplexMatrix> {
    let data: Vec<Vec<Complex64>> = rows
        .into_iter()
        .map(|row| row.into_iter().map(|[re, im]| c64(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(data)
}

/// `{"qubits": N, "matrix": [[[re,im], ...], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub qubits: usize,
    pub matrix: Vec<Vec<ComplexPair>>,
}

impl MatrixJson {
    pub fn from_matrix(qubits: usize, m: &ComplexMatrix) -> Self {
        Self { qubits, matrix: to_pairs(m) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let m = from_pairs(self.matrix.clone())?;
        let dim = 1usize << self.qubits;
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::BadEntryCount {
                rows: m.rows(),
                cols: m.cols(),
                len: m.rows() * m.cols(),
                expected: dim * dim,
            });
        }
        Ok(m)
    }
}

/// `{"qubits": N, "amps": [[re,im], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureJson {
    pub qubits: usize,
    pub amps: Vec<ComplexPair>,
}

/// A state file: density matrix or pure amplitudes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Density(MatrixJson),
    Pure(PureJson),
}

impl StateJson {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        StateJson::Density(MatrixJson::from_matrix(rho.qubits(), rho.mat()))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        StateJson::Pure(PureJson {
            qubits: psi.qubits(),
            amps: psi.amps().iter().map(|z| [z.re, z.im]).collect(),
        })
    }

    /// Decodes and validates under the given profile (pure states are
    /// always validated strictly).
    pub fn to_density(&self, validation: Validation) -> Result<DensityMatrix> {
        match self {
            StateJson::Density(m) => DensityMatrix::with_validation(m.to_matrix()?, validation),
            StateJson::Pure(p) => {
                let amps = p.amps.iter().map(|&[re, im]| c64(re, im)).collect();
                Ok(PureState::new(p.qubits, amps)?.to_density())
            }
        }
    }
}

/// `{"in_qubits": n, "out_qubits": m, "ops": [matrix, ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausJson {
    pub in_qubits: usize,
    pub out_qubits: usize,
    pub ops: Vec<Vec<Vec<ComplexPair>>>,
}

impl KrausJson {
    pub fn from_channel(k: &crate::channels::KrausChannel) -> Self {
        Self {
            in_qubits: k.in_qubits(),
            out_qubits: k.out_qubits(),
            ops: k.ops().iter().map(to_pairs).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<crate::channels::KrausChannel> {
        let ops = self
            .ops
            .iter()
            .map(|m| from_pairs(m.clone()))
            .collect::<Result<Vec<_>>>()?;
        crate::channels::KrausChannel::new(self.in_qubits, self.out_qubits, ops)
    }
}
