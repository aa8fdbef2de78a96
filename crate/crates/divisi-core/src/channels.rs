//! Channel representations and conversions.
//!
//! A [`UnitaryDilation`] is a global unitary on system ⊗ environment plus
//! an initial environment state; tracing out the environment after the
//! unitary gives the induced system channel. Kraus operators are read off
//! in the computational environment output basis, with the environment
//! input resolved into its eigenbasis: `K_{ij} = sqrt(p_j) (I ⊗ <e_i|) U
//! (I ⊗ |a_j>)`. Kraus sets are basis-dependent; everything derived from
//! them downstream is not.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{c64, ComplexMatrix};
use crate::states::{Bipartition, DensityMatrix, Validation};

/// Default max-entry tolerance for unitarity and Kraus completeness.
pub const CHANNEL_TOL: f64 = 1e-9;

/// Environment eigenvalues below this weight are dropped during Kraus
/// extraction.
const ENV_WEIGHT_FLOOR: f64 = 1e-12;

/// Global unitary with a bipartition and an initial environment state.
#[derive(Debug, Clone)]
pub struct UnitaryDilation {
    u: ComplexMatrix,
    split: Bipartition,
    env_init: DensityMatrix,
    unitary_tol: f64,
}

impl UnitaryDilation {
    pub fn new(u: ComplexMatrix, split: Bipartition, env_init: DensityMatrix) -> Result<Self> {
        Self::with_tolerance(u, split, env_init, CHANNEL_TOL)
    }

    /// Relaxed-tolerance constructor for matrices assembled from truncated
    /// printed constants.
    pub fn with_tolerance(
        u: ComplexMatrix,
        split: Bipartition,
        env_init: DensityMatrix,
        unitary_tol: f64,
    ) -> Result<Self> {
        let n = split.total_qubits();
        let dim = 1usize << n;
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::DimensionMismatch {
                context: "dilation unitary vs bipartition",
                left_rows: u.rows(),
                left_cols: u.cols(),
                right_rows: dim,
                right_cols: dim,
            });
        }
        if env_init.qubits() != split.environment_qubits() {
            return Err(Error::InvalidBipartition {
                reason: format!(
                    "environment state has {} qubits, bipartition expects {}",
                    env_init.qubits(),
                    split.environment_qubits()
                ),
            });
        }
        let dev = u.unitarity_deviation();
        if dev > unitary_tol {
            return Err(Error::NotUnitary { deviation: dev, tolerance: unitary_tol });
        }
        Ok(Self { u, split, env_init, unitary_tol })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn split(&self) -> &Bipartition {
        &self.split
    }

    pub fn env_init(&self) -> &DensityMatrix {
        &self.env_init
    }

    pub fn unitary_tol(&self) -> f64 {
        self.unitary_tol
    }

    fn output_validation(&self) -> Validation {
        if self.unitary_tol > CHANNEL_TOL {
            Validation::Lenient
        } else {
            Validation::Strict
        }
    }

    /// `U sigma U^dag` on the joint space.
    pub fn joint_evolve(&self, sigma: &DensityMatrix) -> Result<DensityMatrix> {
        if sigma.qubits() != self.split.total_qubits() {
            return Err(Error::DimensionMismatch {
                context: "joint evolution input",
                left_rows: sigma.dim(),
                left_cols: sigma.dim(),
                right_rows: self.u.rows(),
                right_cols: self.u.cols(),
            });
        }
        let out = self.u.mul(sigma.mat())?.mul(&self.u.adjoint())?;
        DensityMatrix::with_validation(out, sigma.validation().join(self.output_validation()))
    }

    /// Joint state `sigma_S ⊗ env_init`, laid out according to the
    /// bipartition's qubit positions.
    pub fn product_input(&self, sys: &DensityMatrix) -> Result<DensityMatrix> {
        if sys.qubits() != self.split.system_qubits() {
            return Err(Error::InvalidBipartition {
                reason: format!(
                    "system state has {} qubits, bipartition expects {}",
                    sys.qubits(),
                    self.split.system_qubits()
                ),
            });
        }
        let ds = 1usize << self.split.system_qubits();
        let de = 1usize << self.split.environment_qubits();
        let dim = ds * de;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for s1 in 0..ds {
            for e1 in 0..de {
                let row = self.split.embed(s1, e1);
                for s2 in 0..ds {
                    for e2 in 0..de {
                        let col = self.split.embed(s2, e2);
                        out[(row, col)] = sys.mat()[(s1, s2)] * self.env_init.mat()[(e1, e2)];
                    }
                }
            }
        }
        DensityMatrix::with_validation(out, sys.validation().join(self.env_init.validation()))
    }

    /// Kraus operators of the induced system channel.
    ///
    /// The environment input is resolved into its spectral form; one
    /// operator per (output basis vector, environment eigenvector) pair,
    /// with zero-weight eigenvectors dropped.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let ns = self.split.system_qubits();
        let ds = 1usize << ns;
        let de = 1usize << self.split.environment_qubits();

        let (weights, vectors) = self.env_init.mat().hermitian_eig(crate::states::HERMITICITY_TOL)?;
        let mut ops = Vec::new();
        for (j, &p) in weights.iter().enumerate() {
            if p < ENV_WEIGHT_FLOOR {
                continue;
            }
            let sqrt_p = p.sqrt();
            for i in 0..de {
                let mut k = ComplexMatrix::zeros(ds, ds);
                for s_out in 0..ds {
                    let row = self.split.embed(s_out, i);
                    for s_in in 0..ds {
                        let mut acc = Complex64::ZERO;
                        for e_in in 0..de {
                            acc += self.u[(row, self.split.embed(s_in, e_in))] * vectors[(e_in, j)];
                        }
                        k[(s_out, s_in)] = sqrt_p * acc;
                    }
                }
                if k.frobenius_norm() > 1e-12 {
                    ops.push(k);
                }
            }
        }
        KrausChannel::with_tolerance(ns, ns, ops, self.unitary_tol.max(CHANNEL_TOL))
    }

    /// Dilation of the complementary (environment) channel: same unitary
    /// with the roles of system and environment exchanged, and the given
    /// fixed system input playing the environment role.
    pub fn complementary(&self, sys_init: &DensityMatrix) -> Result<UnitaryDilation> {
        UnitaryDilation::with_tolerance(
            self.u.clone(),
            self.split.swapped(),
            sys_init.clone(),
            self.unitary_tol,
        )
    }
}

/// Unitality check outcome: deviation is the max entry of
/// `sum_i K_i K_i^dag - I`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnitalityReport {
    pub unital: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

/// Channel in Kraus form with a completeness certificate.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    in_qubits: usize,
    out_qubits: usize,
    ops: Vec<ComplexMatrix>,
    tolerance: f64,
}

impl KrausChannel {
    pub fn new(in_qubits: usize, out_qubits: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(in_qubits, out_qubits, ops, CHANNEL_TOL)
    }

    pub fn with_tolerance(
        in_qubits: usize,
        out_qubits: usize,
        ops: Vec<ComplexMatrix>,
        tolerance: f64,
    ) -> Result<Self> {
        let din = 1usize << in_qubits;
        let dout = 1usize << out_qubits;
        if ops.is_empty() {
            return Err(Error::KrausIncomplete { deviation: 1.0, tolerance });
        }
        for k in &ops {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator shape",
                    left_rows: k.rows(),
                    left_cols: k.cols(),
                    right_rows: dout,
                    right_cols: din,
                });
            }
        }
        let channel = Self { in_qubits, out_qubits, ops, tolerance };
        let dev = channel.completeness_deviation();
        if dev > tolerance {
            return Err(Error::KrausIncomplete { deviation: dev, tolerance });
        }
        Ok(channel)
    }

    pub fn in_qubits(&self) -> usize {
        self.in_qubits
    }

    pub fn out_qubits(&self) -> usize {
        self.out_qubits
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Max entry of `sum_i K_i^dag K_i - I`.
    pub fn completeness_deviation(&self) -> f64 {
        let din = 1usize << self.in_qubits;
        let mut sum = ComplexMatrix::zeros(din, din);
        for k in &self.ops {
            sum = sum.add(&k.adjoint().mul(k).expect("validated dims")).expect("same dims");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(din))
    }

    /// `sum_i K_i sigma K_i^dag`.
    pub fn apply(&self, sigma: &DensityMatrix) -> Result<DensityMatrix> {
        let din = 1usize << self.in_qubits;
        if sigma.dim() != din {
            return Err(Error::DimensionMismatch {
                context: "channel application",
                left_rows: sigma.dim(),
                left_cols: sigma.dim(),
                right_rows: din,
                right_cols: din,
            });
        }
        let dout = 1usize << self.out_qubits;
        let mut out = ComplexMatrix::zeros(dout, dout);
        for k in &self.ops {
            let term = k.mul(sigma.mat())?.mul(&k.adjoint())?;
            out = out.add(&term)?;
        }
        let validation = if self.tolerance > CHANNEL_TOL {
            Validation::Lenient
        } else {
            sigma.validation()
        };
        DensityMatrix::with_validation(out, validation)
    }

    /// Unital iff `sum_i K_i K_i^dag` is the identity within `tol`.
    pub fn is_unital(&self, tol: f64) -> Result<UnitalityReport> {
        if self.in_qubits != self.out_qubits {
            return Err(Error::DimensionMismatch {
                context: "unitality check (square channel required)",
                left_rows: 1 << self.out_qubits,
                left_cols: 1 << self.in_qubits,
                right_rows: 1 << self.in_qubits,
                right_cols: 1 << self.in_qubits,
            });
        }
        let d = 1usize << self.in_qubits;
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &self.ops {
            sum = sum.add(&k.mul(&k.adjoint())?)?;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(d));
        Ok(UnitalityReport { unital: deviation <= tol, deviation, tolerance: tol })
    }

    /// Choi matrix `sum_{mn} |m><n| ⊗ eps(|m><n|)`; Hermitian, PSD for a
    /// legitimate channel, trace `2^in_qubits`.
    pub fn choi(&self) -> ComplexMatrix {
        let din = 1usize << self.in_qubits;
        let dout = 1usize << self.out_qubits;
        let dim = din * dout;
        let mut choi = ComplexMatrix::zeros(dim, dim);
        for k in &self.ops {
            // eps(|m><n|) = sum_k (col_m of K)(col_n of K)^dag
            for m in 0..din {
                for n in 0..din {
                    for r in 0..dout {
                        for s in 0..dout {
                            choi[(m * dout + r, n * dout + s)] += k[(r, m)] * k[(s, n)].conj();
                        }
                    }
                }
            }
        }
        choi
    }
}

/// Projects a full-rank square matrix to its nearest unitary (polar
/// factor) via the eigendecomposition of `M^dag M`:
/// `M (M^dag M)^{-1/2}`. Rescues operators typeset with defective entries.
pub fn nearest_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let gram = m.adjoint().mul(m)?;
    let (vals, vecs) = gram.hermitian_eig(crate::states::HERMITICITY_TOL)?;
    let n = m.rows();
    let mut inv_sqrt = ComplexMatrix::zeros(n, n);
    for (i, &lam) in vals.iter().enumerate() {
        if lam < 1e-12 {
            return Err(Error::InvalidState {
                reason: format!("matrix is rank-deficient (Gram eigenvalue {lam:.3e}), cannot repair"),
            });
        }
        inv_sqrt[(i, i)] = c64(1.0 / lam.sqrt(), 0.0);
    }
    let gram_inv_sqrt = vecs.mul(&inv_sqrt)?.mul(&vecs.adjoint())?;
    m.mul(&gram_inv_sqrt)
}

/// Convex combination of unitary conjugations, `K_i = sqrt(p_i) U_i`.
#[derive(Debug, Clone)]
pub struct MixedUnitarySpec {
    weights: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl MixedUnitarySpec {
    pub fn new(weights: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.len() != unitaries.len() || weights.is_empty() {
            return Err(Error::InvalidWeights {
                reason: format!("{} weights for {} unitaries", weights.len(), unitaries.len()),
            });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights { reason: format!("weights sum to {sum}, expected 1") });
        }
        if weights.iter().any(|&p| !(-1e-15..=1.0 + 1e-12).contains(&p)) {
            return Err(Error::InvalidWeights { reason: "weight outside [0, 1]".into() });
        }
        let dim = unitaries[0].rows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidState {
                reason: format!("unitary dimension {dim} is not a power of two >= 2"),
            });
        }
        for u in &unitaries {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::DimensionMismatch {
                    context: "mixed-unitary member shapes",
                    left_rows: u.rows(),
                    left_cols: u.cols(),
                    right_rows: dim,
                    right_cols: dim,
                });
            }
            let dev = u.unitarity_deviation();
            if dev > CHANNEL_TOL {
                return Err(Error::NotUnitary { deviation: dev, tolerance: CHANNEL_TOL });
            }
        }
        Ok(Self { weights, unitaries })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn system_qubits(&self) -> usize {
        self.unitaries[0].rows().trailing_zeros() as usize
    }

    /// Direct Kraus form `{sqrt(p_i) U_i}` (zero-weight members dropped).
    pub fn kraus(&self) -> Result<KrausChannel> {
        let n = self.system_qubits();
        let ops = self
            .weights
            .iter()
            .zip(&self.unitaries)
            .filter(|(&p, _)| p > ENV_WEIGHT_FLOOR)
            .map(|(&p, u)| u.scale(c64(p.sqrt(), 0.0)))
            .collect();
        KrausChannel::new(n, n, ops)
    }

    /// Global unitary `U = sum_i U_i ⊗ |i><i|` with environment input
    /// `sum_i p_i |i><i|`. When the member count is not a power of two the
    /// environment is padded with identity unitaries at weight zero.
    pub fn to_dilation(&self) -> Result<UnitaryDilation> {
        let m = self.unitaries.len();
        let ne = usize::max(1, m.next_power_of_two().trailing_zeros() as usize);
        let de = 1usize << ne;
        let ds = self.unitaries[0].rows();
        let ns = self.system_qubits();

        let mut u = ComplexMatrix::zeros(ds * de, ds * de);
        let mut env = ComplexMatrix::zeros(de, de);
        for i in 0..de {
            let block = if i < m { self.unitaries[i].clone() } else { ComplexMatrix::identity(ds) };
            for s1 in 0..ds {
                for s2 in 0..ds {
                    u[(s1 * de + i, s2 * de + i)] = block[(s1, s2)];
                }
            }
            env[(i, i)] = c64(if i < m { self.weights[i] } else { 0.0 }, 0.0);
        }
        let env_init = DensityMatrix::new(env)?;
        let split = Bipartition::contiguous(ns, ne)?;
        UnitaryDilation::new(u, split, env_init)
    }
}
