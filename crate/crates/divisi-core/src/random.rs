//! Seeded random generators for states, Hermitian matrices and unitaries.
//!
//! Unitaries come from QR-style (modified Gram-Schmidt) orthonormalization
//! of complex Gaussian matrices; the positive column norms fix the phases.
//! Used by the witness search and by the property/acceptance suites.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matkernel::{c64, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Gaussian matrix (Ginibre ensemble).
pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite Gaussian entries")
}

/// Haar-ish random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    // columns of g, orthonormalized in order
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            let (head, tail) = cols.split_at_mut(j);
            for (t, &b) in tail[0].iter_mut().zip(&head[k]) {
                *t -= proj * b;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            u[(i, j)] = cols[j][i];
        }
    }
    u
}

/// Random Hermitian matrix with O(1) entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    g.add(&g.adjoint()).expect("square").scale(c64(0.5, 0.0))
}

/// Random pure state: normalized complex Gaussian amplitudes.
pub fn random_pure(qubits: usize, rng: &mut impl Rng) -> PureState {
    let dim = 1usize << qubits;
    let mut amps: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in amps.iter_mut() {
        *z /= norm;
    }
    PureState::new(qubits, amps).expect("normalized by construction")
}

/// Random full-rank density matrix `A A^dag / Tr[A A^dag]`.
pub fn random_density(qubits: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = 1usize << qubits;
    let a = random_gaussian_matrix(dim, dim, rng);
    let p = a.mul(&a.adjoint()).expect("square");
    let tr = p.trace().expect("square").re;
    DensityMatrix::new(p.scale(c64(1.0 / tr, 0.0))).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [2usize, 4, 8] {
            let u = random_unitary(dim, &mut rng);
            assert!(u.unitarity_deviation() < 1e-12, "dim {dim}");
        }
        let a = random_unitary(4, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_unitary(4, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a.max_abs_diff(&b), 0.0);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(2, &mut rng);
        assert!((rho.mat().trace().unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_pure_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_pure(3, &mut rng);
        let n: f64 = psi.amps().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
