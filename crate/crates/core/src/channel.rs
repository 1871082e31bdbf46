//! States, termination measurements and super-operators in Kraus form.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Tolerance, Vector};
use crate::subspace::Subspace;

/// A (possibly sub-normalized) density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
}

impl DensityOperator {
    pub fn new(matrix: Matrix, tol: &Tolerance) -> Result<Self> {
        linalg::check_square(&matrix)?;
        let eig = linalg::hermitian_eig(&matrix, tol)?;
        if let Some(&lowest) = eig.values.last() {
            if lowest < -10.0 * tol.eps_rank() * linalg::spectral_norm(&matrix).max(1.0) {
                return Err(Error::NotPsd { eigenvalue: lowest });
            }
        }
        let trace = linalg::real_trace(&matrix);
        if trace > 1.0 + tol.eps_prob() {
            return Err(Error::TraceTooLarge { trace });
        }
        Ok(DensityOperator {
            matrix: linalg::hermitize(&matrix),
        })
    }

    /// `|psi><psi|` for the normalization of `psi`.
    pub fn pure(psi: &Vector) -> Result<Self> {
        let norm = psi.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let unit = psi.unscale(norm);
        Ok(DensityOperator {
            matrix: &unit * unit.adjoint(),
        })
    }

    /// `|index><index|` on `C^dim`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        DensityOperator {
            matrix: linalg::basis_projector(dim, index),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix) -> Self {
        DensityOperator { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::real_trace(&self.matrix)
    }

    pub fn support(&self, tol: &Tolerance) -> Result<Subspace> {
        Subspace::support(&self.matrix, tol)
    }

    /// `a * self + b * other` for non-negative weights.
    pub fn combine(&self, a: f64, other: &DensityOperator, b: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(DensityOperator {
            matrix: self.matrix.scale(a) + other.matrix.scale(b),
        })
    }
}

/// A completely positive map `rho -> sum_i E_i rho E_i^dag`.
///
/// Constructors validate that the map is trace preserving or trace
/// non-increasing. [`SuperOperator::dual`] yields the Heisenberg-picture map,
/// which in general is neither.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    kraus: Vec<Matrix>,
    trace_preserving: bool,
    unitary: bool,
}

fn kraus_gram(dim: usize, kraus: &[Matrix]) -> Matrix {
    kraus
        .iter()
        .fold(Matrix::zeros(dim, dim), |acc, e| acc + e.adjoint() * e)
}

fn check_kraus(dim: usize, kraus: &[Matrix]) -> Result<()> {
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    for e in kraus {
        linalg::check_finite(e)?;
        for found in [e.nrows(), e.ncols()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
    }
    Ok(())
}

fn is_isometry(e: &Matrix, tol: &Tolerance) -> bool {
    let d = e.ncols();
    (e.adjoint() * e - Matrix::identity(d, d)).norm() <= tol.eps_rank() * d as f64
}

impl SuperOperator {
    /// A trace-preserving map: `sum_i E_i^dag E_i = I`.
    pub fn new(dim: usize, kraus: Vec<Matrix>, tol: &Tolerance) -> Result<Self> {
        check_kraus(dim, &kraus)?;
        let deviation = (kraus_gram(dim, &kraus) - Matrix::identity(dim, dim)).norm();
        if deviation > tol.eps_rank() * dim as f64 {
            return Err(Error::NotTracePreserving { deviation });
        }
        let unitary = kraus.len() == 1 && is_isometry(&kraus[0], tol);
        Ok(SuperOperator {
            dim,
            kraus,
            trace_preserving: true,
            unitary,
        })
    }

    /// A trace non-increasing map: `sum_i E_i^dag E_i <= I`.
    pub fn trace_nonincreasing(dim: usize, kraus: Vec<Matrix>, tol: &Tolerance) -> Result<Self> {
        check_kraus(dim, &kraus)?;
        let gram = kraus_gram(dim, &kraus);
        let largest = linalg::hermitian_eig(&linalg::hermitize(&gram), tol)?
            .values
            .first()
            .copied()
            .unwrap_or(0.0);
        if largest > 1.0 + tol.eps_rank() * dim as f64 {
            return Err(Error::NotTraceNonIncreasing { largest });
        }
        let deviation = (gram - Matrix::identity(dim, dim)).norm();
        let unitary = kraus.len() == 1 && is_isometry(&kraus[0], tol);
        Ok(SuperOperator {
            dim,
            kraus,
            trace_preserving: deviation <= tol.eps_rank() * dim as f64,
            unitary,
        })
    }

    pub fn unitary(u: Matrix, tol: &Tolerance) -> Result<Self> {
        let dim = linalg::check_square(&u)?;
        SuperOperator::new(dim, vec![u], tol)
    }

    pub fn identity(dim: usize) -> Self {
        SuperOperator {
            dim,
            kraus: vec![Matrix::identity(dim, dim)],
            trace_preserving: true,
            unitary: true,
        }
    }

    pub(crate) fn from_parts_unchecked(dim: usize, kraus: Vec<Matrix>, trace_preserving: bool) -> Self {
        let unitary = kraus.len() == 1 && is_isometry(&kraus[0], &Tolerance::default());
        SuperOperator {
            dim,
            kraus,
            trace_preserving,
            unitary,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Single Kraus element that is an isometry.
    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        }
    }

    /// `sum_i E_i m E_i^dag` for any square matrix `m`.
    pub fn apply_matrix(&self, m: &Matrix) -> Result<Matrix> {
        self.check_dim(m.nrows())?;
        self.check_dim(m.ncols())?;
        Ok(self
            .kraus
            .iter()
            .fold(Matrix::zeros(self.dim, self.dim), |acc, e| acc + e * m * e.adjoint()))
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator::from_matrix_unchecked(self.apply_matrix(rho.matrix())?))
    }

    /// The Heisenberg-picture map `A -> sum_i E_i^dag A E_i`.
    pub fn dual(&self) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            kraus: self.kraus.iter().map(|e| e.adjoint()).collect(),
            trace_preserving: false,
            unitary: self.unitary,
        }
    }

    /// `supp E(P_X)`, computed as the range of `[E_1 B, E_2 B, ...]`.
    pub fn image_subspace(&self, x: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_dim(x.ambient_dim())?;
        if x.is_zero() {
            return Ok(Subspace::zero(self.dim));
        }
        if self.unitary {
            return Ok(x.mapped(&self.kraus[0], tol));
        }
        let k = x.dim();
        let mut stacked = Matrix::zeros(self.dim, k * self.kraus.len());
        for (i, e) in self.kraus.iter().enumerate() {
            stacked.columns_mut(i * k, k).copy_from(&(e * x.basis()));
        }
        Ok(Subspace::from_basis_unchecked(linalg::column_space(&stacked, tol)))
    }

    /// The largest subspace `Y` with `E(Y) ⊆ X`, via `E^{-1}(X) = (E*(X^⊥))^⊥`.
    pub fn preimage_subspace(&self, x: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_dim(x.ambient_dim())?;
        if self.unitary {
            return Ok(x.mapped(&self.kraus[0].adjoint(), tol));
        }
        let outside = x.complement(tol);
        Ok(self.dual().image_subspace(&outside, tol)?.complement(tol))
    }
}

/// A two-outcome termination measurement: outcome 0 halts, outcome 1 continues.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    m0: Matrix,
    m1: Matrix,
}

impl Measurement {
    pub fn new(m0: Matrix, m1: Matrix, tol: &Tolerance) -> Result<Self> {
        let dim = linalg::check_square(&m0)?;
        linalg::check_square(&m1)?;
        if m1.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m1.nrows(),
            });
        }
        linalg::check_finite(&m0)?;
        linalg::check_finite(&m1)?;
        let deviation =
            (m0.adjoint() * &m0 + m1.adjoint() * &m1 - Matrix::identity(dim, dim)).norm();
        if deviation > tol.eps_rank() * dim as f64 {
            return Err(Error::IncompleteMeasurement { deviation });
        }
        Ok(Measurement { m0, m1 })
    }

    /// `{P, I - P}` for an orthogonal projector `P` onto the halting subspace.
    pub fn projective(halting: &Subspace) -> Self {
        let d = halting.ambient_dim();
        let p0 = halting.projector();
        let p1 = Matrix::identity(d, d) - &p0;
        Measurement { m0: p0, m1: p1 }
    }

    pub fn dim(&self) -> usize {
        self.m0.nrows()
    }

    pub fn m0(&self) -> &Matrix {
        &self.m0
    }

    pub fn m1(&self) -> &Matrix {
        &self.m1
    }

    /// `tr(M0 rho M0^dag)`.
    pub fn halt_probability(&self, rho: &Matrix) -> f64 {
        linalg::real_trace(&(&self.m0 * rho * self.m0.adjoint()))
    }

    /// `tr(M1 rho M1^dag)`.
    pub fn continue_probability(&self, rho: &Matrix) -> f64 {
        linalg::real_trace(&(&self.m1 * rho * self.m1.adjoint()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_projector, c64, ket};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn walk_w1() -> Matrix {
        let s = 1.0 / 3f64.sqrt();
        let rows = [
            [1.0, 1.0, 0.0, -1.0],
            [1.0, -1.0, 1.0, 0.0],
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, -1.0, 1.0],
        ];
        Matrix::from_fn(4, 4, |r, c| c64(rows[r][c] * s, 0.0))
    }

    #[test]
    fn identity_channel_leaves_state() {
        let rho = DensityOperator::basis_state(3, 1);
        let out = SuperOperator::identity(3).apply(&rho).unwrap();
        assert_eq!(out.matrix(), rho.matrix());
    }

    #[test]
    fn walk_unitary_on_origin() {
        let w = SuperOperator::unitary(walk_w1(), &tol()).unwrap();
        assert!(w.is_unitary());
        let out = w.apply(&DensityOperator::basis_state(4, 0)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| out.matrix()[(i, i)].re).collect();
        for (got, want) in diag.iter().zip([1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn amplitude_damping_preserves_trace() {
        let g: f64 = 0.3;
        let mut e0 = Matrix::zeros(2, 2);
        e0[(0, 0)] = c64(1.0, 0.0);
        e0[(1, 1)] = c64((1.0 - g).sqrt(), 0.0);
        let mut e1 = Matrix::zeros(2, 2);
        e1[(0, 1)] = c64(g.sqrt(), 0.0);
        let ch = SuperOperator::new(2, vec![e0, e1], &tol()).unwrap();
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = c64(0.4, 0.0);
        m[(1, 1)] = c64(0.6, 0.0);
        m[(0, 1)] = c64(0.1, 0.2);
        m[(1, 0)] = c64(0.1, -0.2);
        let rho = DensityOperator::new(m, &tol()).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructor_rejects_non_tp() {
        let e = Matrix::identity(2, 2).scale(0.5);
        assert!(matches!(
            SuperOperator::new(2, vec![e.clone()], &tol()),
            Err(Error::NotTracePreserving { .. })
        ));
        let ch = SuperOperator::trace_nonincreasing(2, vec![e], &tol()).unwrap();
        assert!(!ch.is_trace_preserving());
        let big = Matrix::identity(2, 2).scale(1.5);
        assert!(matches!(
            SuperOperator::trace_nonincreasing(2, vec![big], &tol()),
            Err(Error::NotTraceNonIncreasing { .. })
        ));
        assert!(SuperOperator::new(3, vec![Matrix::identity(2, 2)], &tol()).is_err());
    }

    #[test]
    fn dual_of_unitary_is_adjoint() {
        let w = walk_w1();
        let ch = SuperOperator::unitary(w.clone(), &tol()).unwrap();
        assert_eq!(ch.dual().kraus()[0], w.adjoint());
        assert_eq!(SuperOperator::identity(2).dual().kraus()[0], Matrix::identity(2, 2));
    }

    #[test]
    fn image_and_preimage_under_unitary() {
        let w = walk_w1();
        let ch = SuperOperator::unitary(w.clone(), &tol()).unwrap();
        let x = Subspace::span(4, &[ket(4, 0), ket(4, 2)], &tol()).unwrap();
        let img = ch.image_subspace(&x, &tol()).unwrap();
        assert_eq!(img.dim(), 2);
        assert!(img.contains_vector(&(&w * ket(4, 0)), &tol()));
        let pre = ch.preimage_subspace(&x, &tol()).unwrap();
        assert!(pre.contains_vector(&(w.adjoint() * ket(4, 2)), &tol()));
        assert!(ch.image_subspace(&Subspace::zero(4), &tol()).unwrap().is_zero());
        let general = SuperOperator::trace_nonincreasing(4, vec![w], &tol()).unwrap();
        assert_eq!(general.preimage_subspace(&Subspace::full(4), &tol()).unwrap().dim(), 4);
    }

    #[test]
    fn measurement_validation() {
        let p0 = basis_projector(4, 2);
        let p1 = Matrix::identity(4, 4) - &p0;
        assert!(Measurement::new(p0.clone(), p1, &tol()).is_ok());
        assert!(matches!(
            Measurement::new(p0.clone(), p0, &tol()),
            Err(Error::IncompleteMeasurement { .. })
        ));
        let rho = DensityOperator::basis_state(4, 2);
        let meas = Measurement::projective(&Subspace::span(4, &[ket(4, 2)], &tol()).unwrap());
        assert!((meas.halt_probability(rho.matrix()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_operator_validation() {
        let m = basis_projector(2, 0).scale(1.5);
        assert!(matches!(DensityOperator::new(m, &tol()), Err(Error::TraceTooLarge { .. })));
        let neg = basis_projector(2, 0) - basis_projector(2, 1).scale(0.5);
        assert!(matches!(DensityOperator::new(neg, &tol()), Err(Error::NotPsd { .. })));
        assert!(matches!(DensityOperator::pure(&Vector::zeros(2)), Err(Error::ZeroVector)));
    }
}
