//! Dense complex linear algebra for small matrices.
//!
//! Everything here is written for matrices of at most a few hundred rows:
//! a cyclic Jacobi eigensolver for Hermitian matrices, a one-sided Jacobi
//! singular value routine, and the handful of norms and moduli the bounds
//! are built from.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius mass, relative to ‖H‖_F, at which a Jacobi run stops.
pub const EIGEN_CONVERGENCE: f64 = 1e-14;

/// Default relative tolerance for Hermitian input checks.
pub const DEFAULT_TOL_EIG: f64 = 1e-10;

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_TOL_RANK: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyDimension { rows: usize, cols: usize },
    #[error("a {rows}x{cols} matrix needs {expected} entries, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: ‖H − H*‖ = {defect:e} exceeds {tol:e}·‖H‖ = {bound:e}")]
    NotHermitian { defect: f64, tol: f64, bound: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (relative off-diagonal mass {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}

/// Dense row-major complex matrix with at least one row and one column and
/// finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: idx / cols,
                col: idx % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(LinalgError::RaggedRows {
                    row: i,
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    /// Builds a matrix from real rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zero-sized matrix");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag_real(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            assert!(d.is_finite(), "non-finite diagonal entry");
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Column vector from its entries.
    pub fn column(entries: Vec<C64>) -> Result<Self, LinalgError> {
        let n = entries.len();
        Self::new(n, 1, entries)
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "zero-sized matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Option<C64> {
        (i < self.rows && j < self.cols).then(|| self.data[i * self.cols + j])
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: C64) {
        debug_assert!(z.re.is_finite() && z.im.is_finite());
        self.data[i * self.cols + j] = z;
    }

    pub fn row_vec(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col_vec(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[l * other.cols..(l + 1) * other.cols];
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "apply",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Hermitian part (M + M*)/2 of a square matrix.
    pub fn hermitian_part(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Copy of the `rows × cols` window starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "window out of bounds");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub(crate) fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block[(i, j)];
            }
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "vstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `self` and `other` side by side.
    pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }
}

/// Standard inner product ⟨x, y⟩ = Σ x_i · conj(y_i).
pub fn vec_inner(x: &[C64], y: &[C64]) -> Result<C64, LinalgError> {
    if x.len() != y.len() {
        return Err(LinalgError::DimensionMismatch {
            op: "vec_inner",
            left: (x.len(), 1),
            right: (y.len(), 1),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b.conj()).sum())
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨Mx, x⟩.
pub fn quadratic_form(m: &ComplexMatrix, x: &[C64]) -> Result<C64, LinalgError> {
    let mx = m.apply(x)?;
    vec_inner(&mx, x)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> Vec<C64> {
        self.eigenvectors.col_vec(self.eigenvalues.len() - 1)
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// The input is accepted when ‖H − H*‖_F ≤ `tol_eig`·‖H‖_F and is
/// symmetrized before iterating. Eigenvalues come back ascending (ties keep
/// their diagonal order) and each eigenvector is rotated so that its
/// largest-magnitude entry is real and positive.
pub fn hermitian_eigen(h: &ComplexMatrix, tol_eig: f64) -> Result<HermitianEigen, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let n = h.rows;
    let norm = h.frobenius_norm();
    let defect = h.sub(&h.adjoint())?.frobenius_norm();
    if defect > tol_eig * norm {
        return Err(LinalgError::NotHermitian {
            defect,
            tol: tol_eig,
            bound: tol_eig * norm,
        });
    }

    let mut a = h.hermitian_part()?.data;
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n).data;

    let off_mass = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_mass(&a);
        if off <= EIGEN_CONVERGENCE * norm || norm == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                residual: off / norm,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // negligible against both diagonal entries
                if sweeps > 4 && app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs() {
                    a[p * n + q] = C64::new(0.0, 0.0);
                    a[q * n + p] = C64::new(0.0, 0.0);
                    continue;
                }
                // Phase-reduce to a real symmetric 2x2 block, then rotate.
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U acting on coordinates (p, q):
                //   [ c              s            ]
                //   [ -s·conj(phase)  c·conj(phase) ]
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;

                // A ← A U (columns p, q)
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = arp * upp + arq * uqp;
                    a[r * n + q] = arp * upq + arq * uqq;
                }
                // A ← U* A (rows p, q)
                for col in 0..n {
                    let apc = a[p * n + col];
                    let aqc = a[q * n + col];
                    a[p * n + col] = upp.conj() * apc + uqp.conj() * aqc;
                    a[q * n + col] = upq.conj() * apc + uqq.conj() * aqc;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
                // V ← V U
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp * upp + vrq * uqp;
                    v[r * n + q] = vrp * upq + vrq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re).then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..n).map(|r| v[r * n + src]).collect();
        normalize_phase(&mut col);
        for (r, z) in col.into_iter().enumerate() {
            vecs.data[r * n + dst] = z;
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Rotates `x` so that its first largest-magnitude entry is real positive.
pub fn normalize_phase(x: &mut [C64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in x.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let rot = x[best].conj() / best_mag;
        for z in x.iter_mut() {
            *z *= rot;
        }
        x[best] = C64::new(x[best].re, 0.0);
    }
}

/// Singular values in descending order, `min(rows, cols)` of them.
///
/// Computed by one-sided (Hestenes) Jacobi on the columns of `A` (or of `A*`
/// when `A` is wide), so small singular values carry absolute error of order
/// ε·‖A‖ rather than √ε·‖A‖.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let w = if a.rows >= a.cols { a.clone() } else { a.adjoint() };
    let n = w.cols();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| w.col_vec(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = phase.conj();
                let (left, right) = cols.split_at_mut(q);
                for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (wp, wq) = (*xp, *xq);
                    *xp = wp * c - wq * ph * s;
                    *xq = wp * s + wq * ph * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols.iter().map(|c| vec_norm(c)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a)[0]
}

/// m(A) = min over unit x of ‖Ax‖; exactly 0 when A has more columns than rows.
pub fn minimum_modulus(a: &ComplexMatrix) -> f64 {
    if a.rows < a.cols {
        return 0.0;
    }
    *singular_values(a).last().expect("nonempty")
}

/// Number of singular values above `tol_rank`·‖A‖.
pub fn numerical_rank(a: &ComplexMatrix, tol_rank: f64) -> usize {
    let sv = singular_values(a);
    let cutoff = tol_rank * sv[0];
    if sv[0] == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// γ(A): the smallest nonzero singular value, 0 for the zero matrix.
///
/// "Nonzero" means above [`DEFAULT_TOL_RANK`]·‖A‖.
pub fn reduced_minimum_modulus(a: &ComplexMatrix) -> f64 {
    reduced_minimum_modulus_with(a, DEFAULT_TOL_RANK)
}

pub fn reduced_minimum_modulus_with(a: &ComplexMatrix, tol_rank: f64) -> f64 {
    let sv = singular_values(a);
    if sv[0] == 0.0 {
        return 0.0;
    }
    let cutoff = tol_rank * sv[0];
    sv.iter().rev().copied().find(|&s| s > cutoff).unwrap_or(0.0)
}

/// True iff m(A) > `tol_rank`·‖A‖; the zero matrix is never left invertible.
pub fn left_invertible(a: &ComplexMatrix, tol_rank: f64) -> bool {
    let norm = operator_norm(a);
    norm > 0.0 && minimum_modulus(a) > tol_rank * norm
}

/// Largest eigenvalue of the Hermitian part together with its eigenvector.
pub fn max_real_part_eigen(m: &ComplexMatrix, tol_eig: f64) -> Result<(f64, Vec<C64>), LinalgError> {
    let eig = hermitian_eigen(&m.hermitian_part()?, tol_eig)?;
    Ok((eig.max_eigenvalue(), eig.top_vector()))
}
