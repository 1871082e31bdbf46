//! The reachable space `H_R(rho)`: the span of the supports of every state the
//! program can reach from `rho` under some schedule fragment.
//!
//! All schedulers together reach exactly what the averaged program reaches,
//! so the computation runs on the single averaged transition map. A worklist
//! walks the growing orthonormal basis `b_1, b_2, ...`, pushes every Kraus
//! image `E_j |b_i>` through one Gram-Schmidt step and appends the residual
//! when it is non-zero. The basis can grow at most `d` times, so the loop
//! ends after at most `d` passes.

use crate::channel::DensityOperator;
use crate::error::Result;
use crate::linalg::Tolerance;
use crate::program::Program;
use crate::subspace::Subspace;

/// A basis vector appended by the worklist: the residual of `E_kraus |b_source>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Insertion {
    pub source: usize,
    pub kraus: usize,
}

#[derive(Debug, Clone)]
pub struct ReachabilityRun {
    /// Orthonormal basis in insertion order; the first columns span `supp rho`.
    pub space: Subspace,
    pub initial_dim: usize,
    pub insertions: Vec<Insertion>,
    pub residual_evaluations: usize,
}

pub fn reachable_space(program: &Program, rho: &DensityOperator, tol: &Tolerance) -> Result<Subspace> {
    Ok(reachable_space_traced(program, rho, tol)?.space)
}

pub fn reachable_space_traced(
    program: &Program,
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<ReachabilityRun> {
    program.check_state(rho)?;
    let average = program.average();
    let kraus = average.transition(0)?.kraus();
    let mut space = rho.support(tol)?;
    let initial_dim = space.dim();
    let mut insertions = Vec::new();
    let mut residual_evaluations = 0;
    let mut i = 0;
    while i < space.dim() {
        let b = space.basis_vector(i);
        for (j, e) in kraus.iter().enumerate() {
            residual_evaluations += 1;
            if space.extend_with(&(e * &b), tol) {
                insertions.push(Insertion { source: i, kraus: j });
            }
        }
        i += 1;
    }
    Ok(ReachabilityRun {
        space,
        initial_dim,
        insertions,
        residual_evaluations,
    })
}

#[derive(Debug, Clone)]
pub struct FixpointRun {
    pub space: Subspace,
    /// `dim X_0, dim X_1, ...` up to and including the first repeated value.
    pub dims: Vec<usize>,
}

impl FixpointRun {
    /// Smallest `n` with `X_{n+1} = X_n`.
    pub fn stabilized_at(&self) -> usize {
        self.dims.len().saturating_sub(2)
    }
}

/// Independent route to the reachable space: iterate
/// `X_{n+1} = X_n ∨ T(X_n)` from `X_0 = supp rho` until the dimension stops
/// growing.
pub fn reachable_space_fixpoint_oracle(
    program: &Program,
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<FixpointRun> {
    program.check_state(rho)?;
    let average = program.average();
    let step = average.transition(0)?;
    let mut space = rho.support(tol)?;
    let mut dims = vec![space.dim()];
    loop {
        let next = space.join(&step.image_subspace(&space, tol)?, tol)?;
        dims.push(next.dim());
        if next.dim() == space.dim() {
            return Ok(FixpointRun { space: next, dims });
        }
        space = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Measurement, SuperOperator};
    use crate::linalg::{basis_projector, Matrix};
    use crate::walks::{build_walk, WalkKind, WalkSpec};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn dead_continuation_reaches_only_support() {
        let meas = Measurement::new(Matrix::identity(3, 3), Matrix::zeros(3, 3), &tol()).unwrap();
        let p = Program::new(vec![SuperOperator::identity(3)], meas).unwrap();
        let rho = DensityOperator::basis_state(3, 1);
        let r = reachable_space(&p, &rho, &tol()).unwrap();
        assert!(r.same_as(&rho.support(&tol()).unwrap(), &tol()).unwrap());
    }

    #[test]
    fn identity_program_reaches_only_support() {
        let meas = Measurement::new(Matrix::zeros(3, 3), Matrix::identity(3, 3), &tol()).unwrap();
        let p = Program::new(vec![SuperOperator::identity(3)], meas).unwrap();
        let rho = DensityOperator::new((basis_projector(3, 0) + basis_projector(3, 2)).scale(0.5), &tol()).unwrap();
        let r = reachable_space(&p, &rho, &tol()).unwrap();
        assert_eq!(r.dim(), 2);
        let f = reachable_space_fixpoint_oracle(&p, &rho, &tol()).unwrap();
        assert_eq!(f.dims, vec![2, 2]);
        assert_eq!(f.stabilized_at(), 0);
    }

    #[test]
    fn walk_fixpoint_dims() {
        let p = build_walk(&WalkSpec::new(WalkKind::Nondeterministic));
        let rho = DensityOperator::basis_state(4, 0);
        let f = reachable_space_fixpoint_oracle(&p, &rho, &tol()).unwrap();
        assert_eq!(f.dims, vec![1, 3, 4, 4]);
        assert_eq!(f.stabilized_at(), 2);
    }

    #[test]
    fn full_rank_state_is_one_iteration() {
        let p = build_walk(&WalkSpec::new(WalkKind::W1Only));
        let rho = DensityOperator::new(Matrix::identity(4, 4).scale(0.25), &tol()).unwrap();
        let f = reachable_space_fixpoint_oracle(&p, &rho, &tol()).unwrap();
        assert_eq!(f.dims, vec![4, 4]);
    }
}
