//! Dense complex linear algebra shared by every analysis stage.
//!
//! Matrices are `nalgebra` dense matrices over `Complex<f64>`. Rank decisions
//! go through [`Tolerance`]: singular values and eigenvalues below the rank
//! cutoff count as zero, and containment tests compare residuals against the
//! containment cutoff.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Numerical cutoffs used for rank, containment and probability decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    eps_rank: f64,
    eps_contain: f64,
    eps_prob: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_rank: 1e-9,
            eps_contain: 1e-8,
            eps_prob: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(eps_rank: f64, eps_contain: f64, eps_prob: f64) -> Result<Self> {
        for v in [eps_rank, eps_contain, eps_prob] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance("cutoffs must be finite and positive"));
            }
        }
        if eps_contain < eps_rank {
            return Err(Error::InvalidTolerance(
                "containment cutoff must not be below the rank cutoff",
            ));
        }
        Ok(Tolerance {
            eps_rank,
            eps_contain,
            eps_prob,
        })
    }

    /// Tolerance derived from a single containment cutoff: the rank cutoff is
    /// a tenth of it and the probability cutoff keeps its default.
    pub fn from_contain(eps_contain: f64) -> Result<Self> {
        Tolerance::new(eps_contain / 10.0, eps_contain, Tolerance::default().eps_prob)
    }

    pub fn eps_rank(&self) -> f64 {
        self.eps_rank
    }

    pub fn eps_contain(&self) -> f64 {
        self.eps_contain
    }

    pub fn eps_prob(&self) -> f64 {
        self.eps_prob
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Computational basis vector `|index>` of `C^dim`.
pub fn ket(dim: usize, index: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[index] = c64(1.0, 0.0);
    v
}

/// `|index><index|`.
pub fn basis_projector(dim: usize, index: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    m[(index, index)] = c64(1.0, 0.0);
    m
}

/// Projector `B B^dag` onto the span of the orthonormal columns of `basis`.
pub fn projector(basis: &Matrix) -> Matrix {
    basis * basis.adjoint()
}

pub fn real_trace(m: &Matrix) -> f64 {
    m.trace().re
}

pub fn check_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn check_square(m: &Matrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// `(m + m^dag) / 2`.
pub fn hermitize(m: &Matrix) -> Matrix {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm of `m - m^dag`.
pub fn hermitian_deviation(m: &Matrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one column per entry of `values`.
    pub vectors: Matrix,
}

pub fn hermitian_eig(m: &Matrix, tol: &Tolerance) -> Result<Eigen> {
    check_square(m)?;
    check_finite(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol.eps_rank() * m.norm() {
        return Err(Error::NotHermitian { deviation });
    }
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

/// One Gram-Schmidt step: the normalized residual of `candidate` against the
/// orthonormal columns of `basis`, or `None` when the residual norm is at most
/// `eps_rank * (1 + |candidate|)`.
///
/// The projection is applied twice, which keeps the result orthogonal to the
/// basis to working precision even when the candidate is nearly dependent.
pub fn orthonormalize_extend(basis: &Matrix, candidate: &Vector, tol: &Tolerance) -> Option<Vector> {
    let scale = candidate.norm();
    let mut residual = candidate.clone();
    if basis.ncols() > 0 {
        for _ in 0..2 {
            let coeffs = basis.adjoint() * &residual;
            residual -= basis * coeffs;
        }
    }
    let norm = residual.norm();
    if norm <= tol.eps_rank() * (1.0 + scale) {
        None
    } else {
        Some(residual.unscale(norm))
    }
}

/// Singular values (padded with zeros to `cols`, descending) and a full
/// unitary matrix of right singular vectors.
///
/// nalgebra's complex SVD occasionally returns an inaccurate factorization
/// for rank-deficient input, so the result is checked and recomputed from
/// the real embedding `[[Re, -Im], [Im, Re]]` when the check fails.
fn right_singular(m: &Matrix) -> (Vec<f64>, Matrix) {
    let rows = m.nrows();
    let cols = m.ncols();
    // nalgebra only returns min(rows, cols) right singular vectors; pad with
    // zero rows so the whole right space is covered.
    let padded = if rows < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.clone().svd(true, true);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.resize(cols, 0.0);
    if let Ok(rebuilt) = svd.recompose() {
        let scale = padded.norm().max(f64::MIN_POSITIVE);
        if (rebuilt - &padded).norm() <= 1e-12 * scale * (rows + cols) as f64 {
            let v = padded.svd(false, true).v_t.expect("right singular vectors requested");
            let v = v.adjoint();
            if is_unitary(&v) {
                return (sv, v);
            }
        }
    }
    right_singular_real(m)
}

fn is_unitary(v: &Matrix) -> bool {
    let n = v.ncols();
    v.nrows() == n && (v.adjoint() * v - Matrix::identity(n, n)).norm() <= 1e-12 * n.max(1) as f64
}

fn right_singular_real(m: &Matrix) -> (Vec<f64>, Matrix) {
    let (rows, cols) = (m.nrows(), m.ncols());
    let real_rows = (2 * rows).max(2 * cols);
    let mut r = nalgebra::DMatrix::<f64>::zeros(real_rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i, j + cols)] = -z.im;
            r[(i + rows, j)] = z.im;
            r[(i + rows, j + cols)] = z.re;
        }
    }
    let svd = r.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    // Each complex singular pair appears twice as (x; y) and (-y; x). Keep
    // the complex vectors x + iy that extend the basis built so far.
    let mut v = Matrix::zeros(cols, 0);
    let mut sv = Vec::with_capacity(cols);
    for &k in &order {
        if v.ncols() == cols {
            break;
        }
        let cand = Vector::from_fn(cols, |j, _| c64(vt[(k, j)], vt[(k, j + cols)]));
        let mut res = cand.clone();
        for _ in 0..2 {
            res -= &v * (v.adjoint() * &res);
        }
        let n = res.norm();
        if n > 0.5 {
            let col = v.ncols();
            v = v.insert_column(col, c64(0.0, 0.0));
            v.set_column(col, &res.unscale(n));
            sv.push(svd.singular_values[k]);
        }
    }
    (sv, v)
}

fn select_columns(m: &Matrix, keep: &[usize]) -> Matrix {
    Matrix::from_fn(m.nrows(), keep.len(), |r, c| m[(r, keep[c])])
}

/// Orthonormal basis of `{v : |m v| <= eps_rank * |m|}` where `|m|` is the
/// spectral norm.
pub fn null_space(m: &Matrix, tol: &Tolerance) -> Matrix {
    let cols = m.ncols();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return Matrix::identity(cols, cols);
    }
    let (sv, v) = right_singular(m);
    let norm = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol.eps_rank() * norm;
    let keep: Vec<usize> = (0..cols).filter(|&i| sv[i] <= cutoff).collect();
    select_columns(&v, &keep)
}

/// Orthonormal basis of the range of `m`. Singular values at most
/// `eps_rank * max(|m|, 1)` are treated as zero, so a matrix whose entries
/// are all round-off has an empty range.
pub fn column_space(m: &Matrix, tol: &Tolerance) -> Matrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Matrix::zeros(rows, 0);
    }
    let (sv, u) = right_singular(&m.adjoint());
    let norm = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol.eps_rank() * norm.max(1.0);
    let keep: Vec<usize> = (0..rows).filter(|&i| sv[i] > cutoff).collect();
    select_columns(&u, &keep)
}
