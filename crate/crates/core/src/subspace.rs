//! The lattice of subspaces of `C^d` and finite unions of subspaces.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, orthonormalize_extend, Matrix, Tolerance, Vector};

/// A subspace of `C^d` held as orthonormal basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

/// Outcome of a containment test together with the residual that decided it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Containment {
    pub holds: bool,
    /// Largest per-column residual `|(I - P_outer) b|`.
    pub residual: f64,
}

impl Containment {
    /// The decision sat within a factor ten of the containment cutoff.
    pub fn is_fragile(&self, tol: &Tolerance) -> bool {
        let eps = tol.eps_contain();
        self.residual >= eps / 10.0 && self.residual <= eps * 10.0
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(dim, 0),
        }
    }

    pub fn full(dim: usize) -> Self {
        Subspace {
            basis: Matrix::identity(dim, dim),
        }
    }

    /// Wraps basis columns that are already orthonormal.
    pub fn from_orthonormal(basis: Matrix, tol: &Tolerance) -> Result<Self> {
        linalg::check_finite(&basis)?;
        let k = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let deviation = (gram - Matrix::identity(k, k)).norm();
        if deviation > tol.eps_rank() * (k.max(1) as f64) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Subspace { basis })
    }

    pub(crate) fn from_basis_unchecked(basis: Matrix) -> Self {
        Subspace { basis }
    }

    /// Span of arbitrary vectors, orthonormalized in order.
    pub fn span(dim: usize, vectors: &[Vector], tol: &Tolerance) -> Result<Self> {
        let mut s = Subspace::zero(dim);
        for v in vectors {
            check_dims(dim, v.len())?;
            s.extend_with(v, tol);
        }
        Ok(s)
    }

    /// Adds the normalized residual of `v` to the basis if it is not already
    /// spanned. Returns whether the basis grew.
    pub(crate) fn extend_with(&mut self, v: &Vector, tol: &Tolerance) -> bool {
        match orthonormalize_extend(&self.basis, v, tol) {
            Some(x) => {
                let k = self.basis.ncols();
                let basis = std::mem::replace(&mut self.basis, Matrix::zeros(0, 0));
                let mut basis = basis.insert_column(k, linalg::c64(0.0, 0.0));
                basis.set_column(k, &x);
                self.basis = basis;
                true
            }
            None => false,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }

    pub fn projector(&self) -> Matrix {
        linalg::projector(&self.basis)
    }

    /// Norm of the component of `v` orthogonal to this subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        let coeffs = self.basis.adjoint() * v;
        (v - &self.basis * coeffs).norm()
    }

    pub fn contains_vector(&self, v: &Vector, tol: &Tolerance) -> bool {
        self.residual(v) <= tol.eps_contain() * v.norm().max(1.0)
    }

    /// Support of a positive semi-definite operator: the span of eigenvectors
    /// whose eigenvalue exceeds `eps_rank * tr(rho)`.
    pub fn support(rho: &Matrix, tol: &Tolerance) -> Result<Self> {
        let eig = hermitian_eig(rho, tol)?;
        if let Some(&lowest) = eig.values.last() {
            if lowest < -10.0 * tol.eps_rank() * linalg::spectral_norm(rho) {
                return Err(Error::NotPsd { eigenvalue: lowest });
            }
        }
        let cutoff = tol.eps_rank() * linalg::real_trace(rho).max(0.0);
        let keep = eig.values.iter().take_while(|&&v| v > cutoff).count();
        Ok(Subspace {
            basis: eig.vectors.columns(0, keep).into_owned(),
        })
    }

    /// `span(self ∪ other)`; the basis of `self` is kept as a prefix.
    pub fn join(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        check_dims(self.ambient_dim(), other.ambient_dim())?;
        let mut out = self.clone();
        for i in 0..other.dim() {
            if out.dim() == out.ambient_dim() {
                break;
            }
            out.extend_with(&other.basis_vector(i), tol);
        }
        Ok(out)
    }

    pub fn complement(&self, tol: &Tolerance) -> Subspace {
        let d = self.ambient_dim();
        if self.is_zero() {
            return Subspace::full(d);
        }
        if self.dim() == d {
            return Subspace::zero(d);
        }
        Subspace {
            basis: linalg::null_space(&self.basis.adjoint(), tol),
        }
    }

    /// Intersection computed as `(X^⊥ ∨ Y^⊥)^⊥`.
    pub fn intersect(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        let d = self.ambient_dim();
        check_dims(d, other.ambient_dim())?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(d));
        }
        if self.dim() == d {
            return Ok(other.clone());
        }
        if other.dim() == d {
            return Ok(self.clone());
        }
        let joined = self.complement(tol).join(&other.complement(tol), tol)?;
        Ok(joined.complement(tol))
    }

    /// Containment of `inner` in `self` with its deciding residual.
    pub fn containment(&self, inner: &Subspace, tol: &Tolerance) -> Result<Containment> {
        check_dims(self.ambient_dim(), inner.ambient_dim())?;
        let residual = (0..inner.dim())
            .map(|i| self.residual(&inner.basis_vector(i)))
            .fold(0.0, f64::max);
        Ok(Containment {
            holds: residual <= tol.eps_contain(),
            residual,
        })
    }

    /// `inner ⊆ self` within the containment cutoff.
    pub fn contains(&self, inner: &Subspace, tol: &Tolerance) -> Result<bool> {
        Ok(self.containment(inner, tol)?.holds)
    }

    /// Mutual containment.
    pub fn same_as(&self, other: &Subspace, tol: &Tolerance) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains(other, tol)? && other.contains(self, tol)?)
    }

    /// Apply a linear map to the basis and re-orthonormalize. Used for unitaries.
    pub(crate) fn mapped(&self, op: &Matrix, tol: &Tolerance) -> Subspace {
        let images: Vec<Vector> = (0..self.dim()).map(|i| op * self.basis_vector(i)).collect();
        let mut out = Subspace::zero(op.nrows());
        for v in &images {
            out.extend_with(v, tol);
        }
        out
    }
}

/// Result of reducing a list of subspaces to its maximal members.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSelection {
    /// Indices of kept subspaces, in their original order.
    pub keep: Vec<usize>,
    /// Containment decisions that fell inside the fragile band.
    pub fragile: usize,
}

/// Drops zero subspaces, subspaces strictly contained in another, and all but
/// the first of mutually equal subspaces.
pub fn canonical_selection(spaces: &[Subspace], tol: &Tolerance) -> Result<CanonicalSelection> {
    let n = spaces.len();
    let mut fragile = 0;
    // inside[i][j] == spaces[i] ⊆ spaces[j]
    let mut inside = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || spaces[i].is_zero() || spaces[j].is_zero() {
                continue;
            }
            if spaces[i].dim() > spaces[j].dim() {
                check_dims(spaces[i].ambient_dim(), spaces[j].ambient_dim())?;
                continue;
            }
            let c = spaces[j].containment(&spaces[i], tol)?;
            if c.is_fragile(tol) {
                fragile += 1;
            }
            inside[i][j] = c.holds;
        }
    }
    let keep = (0..n)
        .filter(|&i| {
            !spaces[i].is_zero()
                && !(0..n).any(|j| j != i && inside[i][j] && (!inside[j][i] || j < i))
        })
        .collect();
    Ok(CanonicalSelection { keep, fragile })
}

/// A finite union of subspaces of a common ambient space, kept in canonical
/// form. The empty component list denotes `{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceUnion {
    ambient_dim: usize,
    components: Vec<Subspace>,
}

impl SubspaceUnion {
    pub fn new(ambient_dim: usize, components: Vec<Subspace>, tol: &Tolerance) -> Result<Self> {
        for c in &components {
            check_dims(ambient_dim, c.ambient_dim())?;
        }
        SubspaceUnion {
            ambient_dim,
            components,
        }
        .canonicalize(tol)
    }

    /// The set `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceUnion {
            ambient_dim,
            components: Vec::new(),
        }
    }

    pub fn single(space: Subspace) -> Self {
        let ambient_dim = space.ambient_dim();
        let components = if space.is_zero() { Vec::new() } else { vec![space] };
        SubspaceUnion {
            ambient_dim,
            components,
        }
    }

    pub(crate) fn from_canonical(ambient_dim: usize, components: Vec<Subspace>) -> Self {
        SubspaceUnion {
            ambient_dim,
            components,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn components(&self) -> &[Subspace] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    /// True when the union is the set `{0}`.
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn canonicalize(&self, tol: &Tolerance) -> Result<SubspaceUnion> {
        let sel = canonical_selection(&self.components, tol)?;
        Ok(SubspaceUnion {
            ambient_dim: self.ambient_dim,
            components: sel.keep.iter().map(|&i| self.components[i].clone()).collect(),
        })
    }

    /// Whether `p` lies inside the union. A subspace covered by finitely many
    /// subspaces lies inside one of them, so this is a per-component test.
    pub fn contains_subspace(&self, p: &Subspace, tol: &Tolerance) -> Result<bool> {
        check_dims(self.ambient_dim, p.ambient_dim())?;
        if p.is_zero() {
            return Ok(true);
        }
        for q in &self.components {
            if q.contains(p, tol)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn contains_vector(&self, v: &Vector, tol: &Tolerance) -> bool {
        v.norm() <= tol.eps_contain() || self.components.iter().any(|q| q.contains_vector(v, tol))
    }

    /// `{Q ∩ x : Q in self}`, canonicalized.
    pub fn intersect_subspace(&self, x: &Subspace, tol: &Tolerance) -> Result<SubspaceUnion> {
        check_dims(self.ambient_dim, x.ambient_dim())?;
        let parts = self
            .components
            .iter()
            .map(|q| q.intersect(x, tol))
            .collect::<Result<Vec<_>>>()?;
        SubspaceUnion::new(self.ambient_dim, parts, tol)
    }
}
