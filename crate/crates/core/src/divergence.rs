//! Diverging pure states: unit vectors that some schedule drives to
//! termination probability zero.
//!
//! For a fragment `f`, `PD_f` is the subspace of states that never halt
//! along `f`. It satisfies `PD_ε = H0 = ker M0` and
//! `PD_{kf} = H0 ∩ T_k^{-1}(PD_f)`. The sets `PD_n = ∪_{|f|=n} PD_f` form a
//! descending chain of finite unions of subspaces which stabilizes; its limit
//! is the set of diverging pure states.

use crate::channel::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance, Vector};
use crate::program::{Program, ScheduleFragment};
use crate::search::{self, DEFAULT_SEARCH_CAP};
use crate::subspace::{canonical_selection, Subspace, SubspaceUnion};

/// Default bound on the number of refinement steps.
pub const DEFAULT_MAX_ITERATIONS: usize = 64;

/// `PD_f` together with its fragment `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub label: ScheduleFragment,
    pub space: Subspace,
}

#[derive(Debug, Clone)]
pub struct DivergenceResult {
    pub pd: SubspaceUnion,
    /// `labels[i]` is the fragment `f` with `pd.components()[i] = PD_f`.
    pub labels: Vec<ScheduleFragment>,
    pub iterations: usize,
    pub converged: bool,
    /// Containment decisions within a factor ten of the cutoff.
    pub fragile_containments: usize,
    /// The uncanonicalized component list produced by every step, starting
    /// with `[PD_ε]`.
    pub history: Vec<Vec<Component>>,
}

impl DivergenceResult {
    pub fn components(&self) -> impl Iterator<Item = Component> + '_ {
        self.labels
            .iter()
            .zip(self.pd.components())
            .map(|(label, space)| Component {
                label: label.clone(),
                space: space.clone(),
            })
    }
}

/// `H0 = {psi : M0 psi = 0}`.
pub fn h_zero_subspace(program: &Program, tol: &Tolerance) -> Subspace {
    Subspace::from_basis_unchecked(linalg::null_space(program.measurement().m0(), tol))
}

/// One refinement step on labelled components, before canonicalization.
/// Output order is outer over `prev`, inner over processes.
pub fn pd_step_labeled(
    program: &Program,
    h0: &Subspace,
    prev: &[Component],
    tol: &Tolerance,
) -> Result<Vec<Component>> {
    let mut out = Vec::with_capacity(prev.len() * program.process_count());
    for p in prev {
        for (k, t) in program.transitions().iter().enumerate() {
            let space = h0.intersect(&t.preimage_subspace(&p.space, tol)?, tol)?;
            out.push(Component {
                label: p.label.prepend(k),
                space,
            });
        }
    }
    Ok(out)
}

/// `{H0 ∩ T_k^{-1}(P) : k, P in j_prev}`, canonicalized.
pub fn pd_step(program: &Program, j_prev: &SubspaceUnion, tol: &Tolerance) -> Result<SubspaceUnion> {
    if j_prev.ambient_dim() != program.dim() {
        return Err(Error::DimensionMismatch {
            expected: program.dim(),
            found: j_prev.ambient_dim(),
        });
    }
    let h0 = h_zero_subspace(program, tol);
    let mut parts = Vec::new();
    for p in j_prev.components() {
        for t in program.transitions() {
            parts.push(h0.intersect(&t.preimage_subspace(p, tol)?, tol)?);
        }
    }
    SubspaceUnion::new(program.dim(), parts, tol)
}

fn canonical_components(list: &[Component], tol: &Tolerance, fragile: &mut usize) -> Result<Vec<Component>> {
    let spaces: Vec<Subspace> = list.iter().map(|c| c.space.clone()).collect();
    let sel = canonical_selection(&spaces, tol)?;
    *fragile += sel.fragile;
    Ok(sel.keep.iter().map(|&i| list[i].clone()).collect())
}

fn as_union(dim: usize, list: &[Component]) -> SubspaceUnion {
    SubspaceUnion::from_canonical(dim, list.iter().map(|c| c.space.clone()).collect())
}

/// Iterates refinement steps from `{H0}` until every component of the
/// previous set lies inside some component of the new one, then returns the
/// previous set. A finite-dimensional space is never a finite union of proper
/// subspaces, so this per-component test decides `PD_n = PD_{n-1}`.
pub fn diverging_states(program: &Program, tol: &Tolerance, max_iter: usize) -> Result<DivergenceResult> {
    let dim = program.dim();
    let h0 = h_zero_subspace(program, tol);
    let mut fragile = 0;
    let start = vec![Component {
        label: ScheduleFragment::empty(),
        space: h0.clone(),
    }];
    let mut history = vec![start.clone()];
    let mut current = canonical_components(&start, tol, &mut fragile)?;
    for iteration in 1..=max_iter.max(1) {
        let raw = pd_step_labeled(program, &h0, &current, tol)?;
        history.push(raw.clone());
        let next = canonical_components(&raw, tol, &mut fragile)?;
        let mut stable = true;
        for p in &current {
            let mut covered = false;
            for q in &next {
                let c = q.space.containment(&p.space, tol)?;
                if c.is_fragile(tol) {
                    fragile += 1;
                }
                if c.holds {
                    covered = true;
                    break;
                }
            }
            if !covered {
                stable = false;
                break;
            }
        }
        if stable {
            return Ok(DivergenceResult {
                pd: as_union(dim, &current),
                labels: current.into_iter().map(|c| c.label).collect(),
                iterations: iteration,
                converged: true,
                fragile_containments: fragile,
                history,
            });
        }
        if iteration == max_iter.max(1) {
            return Err(Error::IterationCapExceeded {
                iterations: iteration,
                last: Box::new((as_union(dim, &current), as_union(dim, &next))),
            });
        }
        current = next;
    }
    unreachable!("loop returns on its final iteration")
}

/// Finite-depth membership test: is there a fragment of length `depth` along
/// which `psi` halts with probability at most `eps_prob`? Exhaustive over
/// `m^depth` fragments; over-approximates membership in the diverging set.
pub fn pd_membership_oracle(
    program: &Program,
    psi: &Vector,
    depth: usize,
    tol: &Tolerance,
) -> Result<bool> {
    pd_membership_oracle_capped(program, psi, depth, tol, DEFAULT_SEARCH_CAP)
}

pub fn pd_membership_oracle_capped(
    program: &Program,
    psi: &Vector,
    depth: usize,
    tol: &Tolerance,
    cap: u128,
) -> Result<bool> {
    let rho = DensityOperator::pure(psi)?;
    let out = search::min_termination(program, &rho, depth, cap)?;
    Ok(out.value <= tol.eps_prob())
}
