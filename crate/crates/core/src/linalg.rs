//! Dense complex linear algebra for the small matrices that show up in
//! capacity computations: fading realizations, Gram products, covariances.
//!
//! Everything is row-major `Complex64`. There is deliberately no general
//! solver surface; only the Hermitian eigendecomposition (cyclic Jacobi),
//! the Cholesky-based log-determinant and Gram products are provided.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Cholesky pivots below this fraction of the largest diagonal entry are
/// treated as a loss of positive definiteness.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from a function of `(row, col)`.
    ///
    /// Panics if `f` produces a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    /// Constructor for trusted internal producers (samplers); skips the
    /// finiteness scan.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidParameter(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `self - other`. Panics on shape mismatch.
    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}j ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Square complex matrix equal to its conjugate transpose. Entries are
/// stored exactly symmetrized with a real diagonal.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accepts `data` if it is Hermitian to within [`HERMITIAN_TOLERANCE`]
    /// relative to its largest entry, and stores `(A + Aᴴ)/2`.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::new(dim, dim, data)?)
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::InvalidParameter(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let scale = m.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = HERMITIAN_TOLERANCE * scale;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let a = m.get(i, j);
                let b = m.get(j, i).conj();
                if (a - b).norm() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not Hermitian at ({i}, {j}): {a} vs conj {b}"
                    )));
                }
                let avg = (a + b) * 0.5;
                if i == j {
                    out.set(i, i, Complex64::new(avg.re, 0.0));
                } else {
                    out.set(i, j, avg);
                    out.set(j, i, avg.conj());
                }
            }
        }
        Ok(Self { inner: out })
    }

    /// Mirrors the upper triangle of `m` into the lower one and drops the
    /// imaginary part of the diagonal. For producers that are Hermitian by
    /// construction.
    pub(crate) fn from_upper(mut m: ComplexMatrix) -> Self {
        let n = m.rows;
        debug_assert_eq!(n, m.cols);
        for i in 0..n {
            let d = m.get(i, i);
            m.set(i, i, Complex64::new(d.re, 0.0));
            for j in (i + 1)..n {
                let v = m.get(i, j);
                m.set(j, i, v.conj());
            }
        }
        Self { inner: m }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(*d, 0.0));
        }
        Self { inner: m }
    }

    /// Real symmetric matrix `alpha * I + beta * Ψ`, with Ψ the all-ones matrix.
    pub fn identity_plus_ones(n: usize, alpha: f64, beta: f64) -> Self {
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let v = if i == j { alpha + beta } else { beta };
            Complex64::new(v, 0.0)
        });
        Self { inner: m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            inner: self.inner.scaled(factor),
        }
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.inner.clone();
        for i in 0..m.rows {
            let d = m.get(i, i);
            m.set(i, i, d + shift);
        }
        Self { inner: m }
    }

    /// `P · self · Pᵀ` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidParameter(
                "not a permutation of the matrix indices".into(),
            ));
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(perm[i], perm[j], self.get(i, j));
            }
        }
        Ok(Self { inner: m })
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.inner)
    }
}

/// Which Gram product to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSide {
    /// `H·Hᴴ` (rows × rows)
    Left,
    /// `Hᴴ·H` (cols × cols)
    Right,
}

pub fn gram(h: &ComplexMatrix, side: GramSide) -> HermitianMatrix {
    match side {
        GramSide::Left => {
            let n = h.rows;
            let mut out = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                let ri = h.row(i);
                for j in i..n {
                    let rj = h.row(j);
                    let v: Complex64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                    out.set(i, j, v);
                }
            }
            HermitianMatrix::from_upper(out)
        }
        GramSide::Right => {
            let n = h.cols;
            let mut out = ComplexMatrix::zeros(n, n);
            for k in 0..h.rows {
                let r = h.row(k);
                for (i, ri) in r.iter().enumerate() {
                    let a = ri.conj();
                    for (j, rj) in r.iter().enumerate().skip(i) {
                        let cur = out.get(i, j);
                        out.set(i, j, cur + a * rj);
                    }
                }
            }
            HermitianMatrix::from_upper(out)
        }
    }
}

/// Eigendecomposition `A = U·diag(values)·Uᴴ` with eigenvalues descending
/// and eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// Rebuilds `U·diag(λ)·Uᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors.get(i, k) * self.values[k] * self.vectors.get(j, k).conj())
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq`, reducing the
/// 2×2 block to a real symmetric one, then applies the classical real
/// rotation. Sweeps continue until the off-diagonal Frobenius norm falls
/// below `1e-15·‖A‖_F`.
pub fn hermitian_eigen(a: &HermitianMatrix) -> Result<Eigen> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let total = m.frobenius_norm();
    let target = 1e-15 * total;

    let off_norm = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&m);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m.get(p, q);
                let abs_g = g.norm();
                if abs_g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = g / abs_g;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let theta = (aqq - app) / (2.0 * abs_g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let cphase = phase.conj();

                // columns: A <- A U
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, akp * c - akq * cphase * s);
                    m.set(k, q, akp * s + akq * cphase * c);
                }
                // rows: A <- Uᴴ A
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, apk * c - aqk * phase * s);
                    m.set(q, k, apk * s + aqk * phase * c);
                }
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));
                m.set(p, p, Complex64::new(app - t * abs_g, 0.0));
                m.set(q, q, Complex64::new(aqq + t * abs_g, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c - vkq * cphase * s);
                    v.set(k, q, vkp * s + vkq * cphase * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).re.total_cmp(&m.get(i, i).re));
    let values = order.iter().map(|&i| m.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok(Eigen { values, vectors })
}

/// Lower-triangular Cholesky factor `L` with `A = L·Lᴴ`.
///
/// Fails with [`Error::NotPositiveDefinite`] as soon as a pivot drops to
/// `PIVOT_THRESHOLD` times the largest diagonal entry or below.
pub fn cholesky(a: &HermitianMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let max_diag = (0..n)
        .map(|i| a.get(i, i).re)
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = PIVOT_THRESHOLD * max_diag.max(0.0);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if !(d > threshold) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l.set(j, j, Complex64::new(ljj, 0.0));
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(l)
}

/// Natural log of the determinant of a positive definite matrix, from the
/// Cholesky diagonal.
pub fn logdet_posdef(a: &HermitianMatrix) -> Result<f64> {
    let l = cholesky(a)?;
    Ok(2.0 * (0..a.dim()).map(|i| l.get(i, i).re.ln()).sum::<f64>())
}
