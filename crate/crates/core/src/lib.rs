//! Termination analysis for nondeterministic quantum programs.
//!
//! A program is a finite set of quantum processes (super-operators) acting on
//! `C^d` together with a two-outcome termination measurement. Before every
//! step the measurement is applied; outcome 0 halts, outcome 1 lets a
//! scheduler-chosen process run. The program terminates on input `rho` when
//! every schedule halts with probability one.
//!
//! The decision procedure has three parts:
//!
//! * [`reachability`] computes the reachable space `H_R(rho)`, the span of
//!   every state reachable under any schedule fragment.
//! * [`divergence`] computes `PD`, the pure states some schedule can keep
//!   from ever halting, as a finite union of subspaces.
//! * [`termination`] intersects the two: `rho` terminates iff
//!   `H_R(rho) ∩ PD = {0}`. Otherwise it extracts a witness state and a
//!   schedule that never halts from it.
//!
//! ```
//! use qterm::{check_termination, AnalysisOptions, DensityOperator};
//! use qterm::walks::{build_walk, WalkKind, WalkSpec};
//!
//! let program = build_walk(&WalkSpec::new(WalkKind::Nondeterministic));
//! let verdict = check_termination(
//!     &program,
//!     &DensityOperator::basis_state(4, 0),
//!     &AnalysisOptions::default(),
//! )?;
//! assert!(!verdict.terminating);
//! assert!(verdict.witness_schedule.unwrap().to_string().starts_with("1212"));
//! # Ok::<(), qterm::Error>(())
//! ```

pub mod channel;
pub mod divergence;
mod error;
pub mod linalg;
pub mod program;
pub mod reachability;
pub mod search;
pub mod subspace;
pub mod termination;
pub mod walks;

pub use channel::{DensityOperator, Measurement, SuperOperator};
pub use divergence::{diverging_states, DivergenceResult};
pub use error::{Error, Result};
pub use linalg::{Matrix, Tolerance, Vector};
pub use program::{Program, ScheduleFragment};
pub use reachability::reachable_space;
pub use subspace::{Subspace, SubspaceUnion};
pub use termination::{check_termination, AnalysisOptions, Verdict};
