//! Validated quantum states over qubit registers.
//!
//! Qubit ordering convention: the leftmost ket symbol is qubit 0 and maps
//! to the most significant bit of the matrix row index, so `|100>` on three
//! qubits is basis index 4. Bipartitions may name arbitrary (possibly
//! non-contiguous) qubit subsets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{c64, ComplexMatrix};

/// Max-entry hermiticity tolerance for state validation.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Strict trace tolerance.
pub const TRACE_TOL_STRICT: f64 = 1e-9;
/// Lenient trace tolerance, for states produced by truncated printed
/// constants (e.g. trace 0.999698). Matches the 2e-3 unitarity band
/// accepted for truncated operators, whose outputs can drift this far.
pub const TRACE_TOL_LENIENT: f64 = 2e-3;
/// Eigenvalue floor for positive semidefiniteness.
pub const PSD_TOL: f64 = -1e-9;

/// Validation profile for density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validation {
    Strict,
    Lenient,
}

impl Validation {
    fn trace_tol(self) -> f64 {
        match self {
            Validation::Strict => TRACE_TOL_STRICT,
            Validation::Lenient => TRACE_TOL_LENIENT,
        }
    }

    /// The weaker of two profiles wins when states are combined.
    pub fn join(self, other: Validation) -> Validation {
        if self == Validation::Lenient || other == Validation::Lenient {
            Validation::Lenient
        } else {
            Validation::Strict
        }
    }
}

/// Which side of a bipartition to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Environment,
}

/// Pure state as a normalized amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::InvalidState { reason: "qubit count must be at least 1".into() });
        }
        if amps.len() != 1 << qubits {
            return Err(Error::InvalidState {
                reason: format!("amplitude vector has length {}, expected {}", amps.len(), 1usize << qubits),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let dev = (norm_sq.sqrt() - 1.0).abs();
        if dev > 1e-9 {
            return Err(Error::NotNormalized { deviation: dev });
        }
        Ok(Self { qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << qubits];
        amps[index] = Complex64::ONE;
        Self { qubits, amps }
    }

    /// Basis state from a bit string, e.g. `"100"`.
    pub fn from_bits(bits: &str) -> Self {
        let index = usize::from_str_radix(bits, 2).expect("binary bit string");
        Self::basis(bits.len(), index)
    }

    /// Equal-weight superposition of the given basis indices (real,
    /// positive amplitudes).
    pub fn uniform_superposition(qubits: usize, indices: &[usize]) -> Self {
        let amp = 1.0 / (indices.len() as f64).sqrt();
        let mut amps = vec![Complex64::ZERO; 1 << qubits];
        for &i in indices {
            amps[i] = c64(amp, 0.0);
        }
        Self { qubits, amps }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Outer product `|psi><psi|`.
    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.amps.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { qubits: self.qubits, mat: m, validation: Validation::Strict }
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    mat: ComplexMatrix,
    validation: Validation,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_validation(mat, Validation::Strict)
    }

    pub fn with_validation(mat: ComplexMatrix, validation: Validation) -> Result<Self> {
        let dim = mat.rows();
        if !mat.is_square() {
            return Err(Error::InvalidState {
                reason: format!("matrix is {}x{}, not square", mat.rows(), mat.cols()),
            });
        }
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState {
                reason: format!("dimension {dim} is not a power of two >= 2"),
            });
        }
        let qubits = dim.trailing_zeros() as usize;

        let asym = mat.hermiticity_deviation();
        if asym > HERMITICITY_TOL {
            return Err(Error::InvalidState {
                reason: format!("not Hermitian: max asymmetry {asym:.3e}"),
            });
        }
        let tr = mat.trace().expect("square");
        let tr_dev = (tr - Complex64::ONE).norm();
        if tr_dev > validation.trace_tol() {
            return Err(Error::InvalidState {
                reason: format!("trace is {:.9}{:+.9}i, deviates from 1 by {:.3e}", tr.re, tr.im, tr_dev),
            });
        }
        let eigvals = mat.hermitian_eigvals(HERMITICITY_TOL)?;
        let min = eigvals.first().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(Error::InvalidState {
                reason: format!("not positive semidefinite: min eigenvalue {min:.3e}"),
            });
        }
        Ok(Self { qubits, mat, validation })
    }

    /// The uniform state `I / 2^n`.
    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::InvalidState { reason: "qubit count must be at least 1".into() });
        }
        let dim = 1 << qubits;
        let mat = ComplexMatrix::identity(dim).scale(c64(1.0 / dim as f64, 0.0));
        Ok(Self { qubits, mat, validation: Validation::Strict })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    /// `Tr[rho^2]`, in `[2^-n, 1]` for a valid state.
    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).expect("square").trace().expect("square").re
    }

    /// Tensor product of two states (`self` on the left / most
    /// significant qubits).
    pub fn product(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            qubits: self.qubits + other.qubits,
            mat: self.mat.kron(&other.mat),
            validation: self.validation.join(other.validation),
        }
    }

    /// Reduced state on the kept side of the bipartition. Ordering of the
    /// kept qubits follows the order they are listed in the split.
    pub fn partial_trace(&self, split: &Bipartition, keep: Subsystem) -> Result<DensityMatrix> {
        if split.total_qubits() != self.qubits {
            return Err(Error::InvalidBipartition {
                reason: format!(
                    "bipartition covers {} qubits but the state has {}",
                    split.total_qubits(),
                    self.qubits
                ),
            });
        }
        let (kept, dropped) = match keep {
            Subsystem::System => (split.system(), split.environment()),
            Subsystem::Environment => (split.environment(), split.system()),
        };
        let n = self.qubits;
        let kd = kept.len();
        let dim_keep = 1usize << kd;
        let dim_drop = 1usize << dropped.len();
        let mut out = ComplexMatrix::zeros(dim_keep, dim_keep);
        for a in 0..dim_keep {
            for b in 0..dim_keep {
                let mut acc = Complex64::ZERO;
                for e in 0..dim_drop {
                    let row = scatter_bits(a, kept, n) | scatter_bits(e, dropped, n);
                    let col = scatter_bits(b, kept, n) | scatter_bits(e, dropped, n);
                    acc += self.mat[(row, col)];
                }
                out[(a, b)] = acc;
            }
        }
        DensityMatrix::with_validation(out, self.validation)
    }
}

/// Places the bits of `value` (MSB-first across `positions`) at the named
/// qubit positions of an `n`-qubit index.
fn scatter_bits(value: usize, positions: &[usize], n: usize) -> usize {
    let k = positions.len();
    let mut out = 0usize;
    for (j, &q) in positions.iter().enumerate() {
        let bit = (value >> (k - 1 - j)) & 1;
        out |= bit << (n - 1 - q);
    }
    out
}

/// Disjoint split of qubit indices into system and environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    system: Vec<usize>,
    environment: Vec<usize>,
}

impl Bipartition {
    pub fn new(system: Vec<usize>, environment: Vec<usize>) -> Result<Self> {
        let n = system.len() + environment.len();
        if system.is_empty() || environment.is_empty() {
            return Err(Error::InvalidBipartition {
                reason: "system and environment must each hold at least one qubit".into(),
            });
        }
        let mut seen = vec![false; n];
        for &q in system.iter().chain(environment.iter()) {
            if q >= n {
                return Err(Error::InvalidBipartition {
                    reason: format!("qubit index {q} out of range for {n} qubits"),
                });
            }
            if seen[q] {
                return Err(Error::InvalidBipartition {
                    reason: format!("qubit index {q} appears twice"),
                });
            }
            seen[q] = true;
        }
        Ok(Self { system, environment })
    }

    /// First `n_sys` qubits as the system, the remaining `n_env` as the
    /// environment.
    pub fn contiguous(n_sys: usize, n_env: usize) -> Result<Self> {
        Self::new((0..n_sys).collect(), (n_sys..n_sys + n_env).collect())
    }

    /// Arbitrary system subset; the environment is the ascending
    /// complement.
    pub fn from_system(system: Vec<usize>, total: usize) -> Result<Self> {
        let environment: Vec<usize> = (0..total).filter(|q| !system.contains(q)).collect();
        Self::new(system, environment)
    }

    /// Same split with the roles of system and environment exchanged.
    pub fn swapped(&self) -> Bipartition {
        Bipartition { system: self.environment.clone(), environment: self.system.clone() }
    }

    pub fn system(&self) -> &[usize] {
        &self.system
    }

    pub fn environment(&self) -> &[usize] {
        &self.environment
    }

    pub fn system_qubits(&self) -> usize {
        self.system.len()
    }

    pub fn environment_qubits(&self) -> usize {
        self.environment.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.system.len() + self.environment.len()
    }

    /// Full-register basis index with system bits `s` and environment
    /// bits `e` placed at their respective positions.
    pub fn embed(&self, s: usize, e: usize) -> usize {
        let n = self.total_qubits();
        scatter_bits(s, &self.system, n) | scatter_bits(e, &self.environment, n)
    }
}
