//! Dense complex matrix kernel.
//!
//! Every quantity downstream reduces to products, adjoints, Kronecker
//! products, traces and Hermitian eigendecompositions of small dense
//! matrices, so this module keeps its own row-major storage instead of
//! pulling in a general linear-algebra stack. The eigensolver is a cyclic
//! Jacobi iteration with complex rotations; dimensions stay below ~2^10.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf and
    /// length mismatches.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadEntryCount { rows, cols, len: data.len(), expected: rows * cols });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::BadEntryCount { rows: r, cols: c, len: 0, expected: r * c });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Real-entry convenience constructor, mostly for tests and gates.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| c64(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Standard matrix product; dimensions must chain.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix sum", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix difference", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        context: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| s * z).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product with block ordering
    /// `(a ⊗ b)[i*b.rows + k, j*b.cols + l] = a[i,j] * b[k,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Sum of diagonal entries; errors on non-square input.
    pub fn trace(&self) -> Result<Complex64> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self[(i, i)]).sum())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry distance to `other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Max-entry magnitude of `self - self^dag`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Max-entry magnitude of `U^dag U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        match self.adjoint().mul(self) {
            Ok(p) => p.max_abs_diff(&Self::identity(self.rows)),
            Err(_) => f64::INFINITY,
        }
    }

    /// All real eigenvalues of a Hermitian matrix, ascending with
    /// multiplicity. `tol` bounds the accepted hermiticity deviation.
    pub fn hermitian_eigvals(&self, tol: f64) -> Result<Vec<f64>> {
        Ok(self.hermitian_eig(tol)?.0)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues ascending and a unitary whose columns are the
    /// matching eigenvectors, so `self ≈ V diag(λ) V^dag`. The input is
    /// symmetrized as `(h + h^dag)/2` before iterating to suppress
    /// roundoff drift.
    pub fn hermitian_eig(&self, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
        let n = self.require_square()?;
        let asym = self.hermiticity_deviation();
        if !asym.is_finite() || asym > tol {
            return Err(Error::NotHermitian { asymmetry: asym, tolerance: tol });
        }

        // symmetrize
        let mut h = self.clone();
        for i in 0..n {
            h[(i, i)] = c64(h[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = 0.5 * (h[(i, j)] + h[(j, i)].conj());
                h[(i, j)] = avg;
                h[(j, i)] = avg.conj();
            }
        }

        let mut v = ComplexMatrix::identity(n);
        let scale = h.frobenius_norm().max(1.0);
        let target = 1e-14 * scale;
        const MAX_SWEEPS: usize = 100;

        let off_mass = |m: &ComplexMatrix| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += m[(i, j)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };

        let mut sweeps = 0;
        while off_mass(&h) > target {
            if sweeps >= MAX_SWEEPS {
                return Err(Error::EigenConvergence { off_diagonal: off_mass(&h), sweeps });
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    let beta = h[(p, q)];
                    let r = beta.norm();
                    if r <= target / (n as f64 * 10.0) {
                        continue;
                    }
                    let phase = beta / r;
                    let a = h[(p, p)].re;
                    let b = h[(q, q)].re;
                    let tau = (b - a) / (2.0 * r);
                    // stable root of t^2 + 2 tau t - 1 = 0
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let cth = 1.0 / (1.0 + t * t).sqrt();
                    let f = (t * cth) * phase; // s * e^{i phi}

                    // H <- G^dag H G with G[p,p]=G[q,q]=c, G[p,q]=f, G[q,p]=-conj(f)
                    for k in 0..n {
                        let hpk = h[(p, k)];
                        let hqk = h[(q, k)];
                        h[(p, k)] = cth * hpk - f * hqk;
                        h[(q, k)] = f.conj() * hpk + cth * hqk;
                    }
                    for k in 0..n {
                        let hkp = h[(k, p)];
                        let hkq = h[(k, q)];
                        h[(k, p)] = cth * hkp - f.conj() * hkq;
                        h[(k, q)] = f * hkp + cth * hkq;
                    }
                    h[(p, q)] = Complex64::ZERO;
                    h[(q, p)] = Complex64::ZERO;
                    h[(p, p)] = c64(h[(p, p)].re, 0.0);
                    h[(q, q)] = c64(h[(q, q)].re, 0.0);

                    // V <- V G
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = cth * vkp - f.conj() * vkq;
                        v[(k, q)] = f * vkp + cth * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| h[(i, i)].re.partial_cmp(&h[(j, j)].re).unwrap());
        let eigvals: Vec<f64> = order.iter().map(|&i| h[(i, i)].re).collect();
        let mut vectors = ComplexMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new_col)] = v[(k, old_col)];
            }
        }
        Ok((eigvals, vectors))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}
