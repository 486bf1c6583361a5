//! Dense complex matrix kernel.
//!
//! Everything in this crate is built on [`CMatrix`], a row-major dense matrix
//! of double-precision complex numbers. The kernel supplies the arithmetic,
//! a cyclic complex Jacobi eigensolver for Hermitian matrices, PSD testing,
//! Kronecker and direct-sum calculus, Haar-random unitaries and the null-space
//! routine used for commutants and intertwiners.
//!
//! Vectorization is row-major: `vec(z)[i * cols + j] = z[(i, j)]`. Under this
//! convention `vec(a · z · b) = (a ⊗ bᵀ) · vec(z)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default relative tolerance for PSD decisions.
pub const PSD_TOL: f64 = 1e-9;
/// Relative off-diagonal mass at which the Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-13;
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct CMatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        CMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = CMatrixRepr::deserialize(deserializer)?;
        let data = repr.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        CMatrix::from_vec(repr.rows, repr.cols, data).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
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

impl CMatrix {
    /// Builds a matrix from row-major data, checking length and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SpinError::InvalidData(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SpinError::InvalidData("non-finite entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn scalar(z: C64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Row-major vectorization.
    pub fn vec(&self) -> Vec<C64> {
        self.data.clone()
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖a − b‖_F`; panics on shape mismatch.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖a − a*‖_F`.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `‖a*·a − 1‖_F` for any shape (isometry test).
    pub fn isometry_residual(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .distance(&CMatrix::identity(self.cols))
    }

    /// `‖a*·a − 1‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .distance(&CMatrix::identity(self.cols))
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[l * m..(l + 1) * m];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        CMatrix {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product with `self` as the outer factor.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = CMatrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
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

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> CMatrix {
        assert!(
            row + rows <= self.rows && col + cols <= self.cols,
            "block out of range"
        );
        CMatrix::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }

    pub fn set_block(&mut self, row: usize, col: usize, b: &CMatrix) {
        assert!(
            row + b.rows <= self.rows && col + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(row + i, col + j)] = b[(i, j)];
            }
        }
    }

    /// Assembles a matrix from a square grid of equally sized blocks.
    pub fn from_blocks(blocks: &[Vec<CMatrix>]) -> CMatrix {
        let br = blocks[0][0].rows;
        let bc = blocks[0][0].cols;
        let mut out = CMatrix::zeros(br * blocks.len(), bc * blocks[0].len());
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                out.set_block(i * br, j * bc, b);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> CMatrix {
        CMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// `a·b + b·a`.
    pub fn anticommutator(&self, other: &CMatrix) -> CMatrix {
        &self.matmul(other) + &other.matmul(self)
    }

    /// `a·b − b·a`.
    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Largest singular value, from the top eigenvalue of `a*·a`.
    pub fn op_norm(&self) -> f64 {
        let gram = self.adjoint().matmul(self).hermitian_part();
        match eigvalsh(&gram, 1e-8) {
            Ok(vals) => vals.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
            Err(_) => f64::NAN,
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub shape mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

/// Hilbert–Schmidt inner product `⟨a, b⟩ = tr(b*·a)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(SpinError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| y.conj() * x).sum())
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver
// ---------------------------------------------------------------------------

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `V·diag(λ)·V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled.matmul(&self.vectors.adjoint())
    }
}

fn check_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(SpinError::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let residual = a.hermitian_residual();
    if residual > tol * a.frobenius_norm().max(1.0) {
        return Err(SpinError::NotHermitian { residual });
    }
    Ok(())
}

/// Cyclic complex Jacobi. Returns unsorted diagonal and (optionally) the
/// accumulated rotations.
fn jacobi(a: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = m.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        let vals = (0..n).map(|i| m[(i, i)].re).collect();
        return Ok((vals, v));
    }
    let target = JACOBI_TOL * scale;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += m[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= target {
            let vals = (0..n).map(|i| m[(i, i)].re).collect();
            return Ok((vals, v));
        }

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Entries far below the diagonal scale are rounding noise.
                if b < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / b;
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let r_pp = C64::new(c, 0.0);
                let r_pq = C64::new(s, 0.0);
                let r_qp = -phase.conj() * s;
                let r_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * r_pp + akq * r_qp;
                    m[(k, q)] = akp * r_pq + akq * r_qq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = r_pp.conj() * apk + r_qp.conj() * aqk;
                    m[(q, k)] = r_pq.conj() * apk + r_qq.conj() * aqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * r_pp + vkq * r_qp;
                        v[(k, q)] = vkp * r_pq + vkq * r_qq;
                    }
                }
            }
        }
    }
    Err(SpinError::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(a: &CMatrix, tol: f64) -> Result<EigenDecomposition> {
    check_hermitian(a, tol)?;
    let (vals, vecs) = jacobi(a, true)?;
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let n = a.rows;
    Ok(EigenDecomposition {
        values: order.iter().map(|&i| vals[i]).collect(),
        vectors: CMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]),
    })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    check_hermitian(a, tol)?;
    let (mut vals, _) = jacobi(a, false)?;
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Outcome of a PSD test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eig: f64,
}

/// PSD test with relative tolerance: PSD iff `λ_min ≥ −tol·max(1, ‖a‖_F)`.
/// The input is symmetrized before the eigenvalue computation.
pub fn is_psd(a: &CMatrix, tol: f64) -> Result<PsdVerdict> {
    check_hermitian(a, tol.max(1e-10))?;
    let vals = eigvalsh(&a.hermitian_part(), f64::INFINITY)?;
    let min_eig = vals.first().copied().unwrap_or(0.0);
    let bound = -tol * a.frobenius_norm().max(1.0);
    Ok(PsdVerdict {
        psd: min_eig >= bound,
        min_eig,
    })
}

/// Smallest eigenvalue of a Hermitian matrix (symmetrized first).
pub fn min_eig(a: &CMatrix) -> Result<f64> {
    Ok(is_psd(a, PSD_TOL)?.min_eig)
}

/// Largest eigenvalue of a Hermitian matrix (symmetrized first).
pub fn max_eig(a: &CMatrix) -> Result<f64> {
    check_hermitian(a, 1e-8)?;
    let vals = eigvalsh(&a.hermitian_part(), f64::INFINITY)?;
    Ok(vals.last().copied().unwrap_or(0.0))
}

/// Unitary polar factor `z·(z*z)^{-1/2}`, or `None` if `z` is numerically
/// singular (smallest eigenvalue of `z*z` below `rel_tol` times the largest).
pub fn polar_unitary(z: &CMatrix, rel_tol: f64) -> Option<CMatrix> {
    let gram = z.adjoint().matmul(z).hermitian_part();
    let eig = hermitian_eig(&gram, f64::INFINITY).ok()?;
    let top = eig.values.last().copied()?;
    if top <= 0.0 || eig.values[0] <= rel_tol * top {
        return None;
    }
    let n = gram.rows;
    let v = &eig.vectors;
    let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] / eig.values[j].sqrt());
    let inv_sqrt = scaled.matmul(&v.adjoint());
    Some(z.matmul(&inv_sqrt))
}

// ---------------------------------------------------------------------------
// Null spaces
// ---------------------------------------------------------------------------

/// Orthonormal basis of the joint null space of a family of linear maps.
#[derive(Clone, Debug)]
pub struct NullSpace {
    pub basis: Vec<Vec<C64>>,
    /// Singular values of the stacked operator, ascending, evaluated as
    /// `‖A·v_k‖` on the eigenvectors of `A*A`.
    pub singular_values: Vec<f64>,
}

/// Joint null space of the maps `blocks[j]` (all with `ncols` columns).
///
/// The right singular vectors come from the eigenvectors of `Σ Bⱼ*Bⱼ`; each
/// singular value is then measured directly as `‖B·v‖` so that null
/// directions sit at rounding level rather than at `√eps`.
pub fn joint_null_space(blocks: &[CMatrix], ncols: usize, rel_tol: f64) -> NullSpace {
    let mut gram = CMatrix::zeros(ncols, ncols);
    for b in blocks {
        assert_eq!(b.cols, ncols, "null space block shape mismatch");
        gram = &gram + &b.adjoint().matmul(b);
    }
    let eig = hermitian_eig(&gram.hermitian_part(), f64::INFINITY)
        .expect("Gram matrix of a stacked operator is Hermitian");
    let vectors: Vec<Vec<C64>> = (0..ncols).map(|k| eig.vectors.column(k)).collect();
    let mut sv: Vec<(f64, usize)> = vectors
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let s2: f64 = blocks.iter().map(|b| vnorm(&b.matvec(v)).powi(2)).sum();
            (s2.sqrt(), k)
        })
        .collect();
    sv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let smax = sv.last().map_or(0.0, |s| s.0);
    let basis = sv
        .iter()
        .filter(|(s, _)| *s <= rel_tol * smax)
        .map(|&(_, k)| vectors[k].clone())
        .collect();
    NullSpace {
        basis,
        singular_values: sv.iter().map(|s| s.0).collect(),
    }
}

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Random Hermitian matrix from the Gaussian unitary ensemble, scaled by `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    gaussian_matrix(rng, n, n).hermitian_part().scale_re(scale)
}

/// Uniformly distributed unit vector in `ℝ^d`.
pub fn random_unit_vector_real<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniformly distributed unit vector in `ℂ^d`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        let n = vnorm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar unitary from an RNG: Gram–Schmidt QR of a complex Gaussian matrix.
/// Gram–Schmidt yields a positive real `R` diagonal, which is exactly the
/// phase normalization that makes `Q` Haar distributed.
pub fn haar_unitary_from<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    loop {
        let g = gaussian_matrix(rng, d, d);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
        let mut ok = true;
        for j in 0..d {
            let mut v = g.column(j);
            for _pass in 0..2 {
                for q in &cols {
                    let r = vdot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= r * qi;
                    }
                }
            }
            let n = vnorm(&v);
            if n < 1e-10 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
        if ok {
            return CMatrix::from_columns(d, &cols);
        }
    }
}

/// Deterministic Haar-random unitary for a fixed seed.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    haar_unitary_from(&mut rng, d)
}

// ---------------------------------------------------------------------------
// Pauli matrices
// ---------------------------------------------------------------------------

pub fn sigma_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}
