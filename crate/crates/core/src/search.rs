//! Exhaustive search over schedule fragments of a fixed length.

use crate::channel::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::program::{Program, ScheduleFragment};

/// Largest number of fragments a search may enumerate by default.
pub const DEFAULT_SEARCH_CAP: u128 = 1 << 22;

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// `min_{|f| = length} t_f(rho)`.
    pub value: f64,
    /// A fragment attaining `value`; the first in lexicographic order among ties.
    pub best: ScheduleFragment,
    /// Prefix nodes expanded, for pruning diagnostics.
    pub expanded: usize,
}

pub fn check_search_size(process_count: usize, length: usize, cap: u128) -> Result<()> {
    let size = u32::try_from(length)
        .ok()
        .and_then(|l| (process_count as u128).checked_pow(l))
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    Ok(())
}

/// Branch-and-bound minimum of the termination probability over all
/// fragments of exactly `length` steps.
///
/// `t_{fg} >= t_f`, so a prefix whose accumulated probability already reaches
/// the incumbent cannot improve it and is cut.
pub fn min_termination(
    program: &Program,
    rho: &DensityOperator,
    length: usize,
    cap: u128,
) -> Result<SearchOutcome> {
    program.check_state(rho)?;
    check_search_size(program.process_count(), length, cap)?;
    let mut search = Search {
        program,
        length,
        best_value: f64::INFINITY,
        best: Vec::new(),
        path: Vec::with_capacity(length),
        expanded: 0,
    };
    let start = rho.matrix().clone();
    let t0 = program.measurement().halt_probability(&start);
    search.descend(&start, t0)?;
    Ok(SearchOutcome {
        value: search.best_value,
        best: ScheduleFragment::new(search.best),
        expanded: search.expanded,
    })
}

struct Search<'a> {
    program: &'a Program,
    length: usize,
    best_value: f64,
    best: Vec<usize>,
    path: Vec<usize>,
    expanded: usize,
}

impl Search<'_> {
    fn descend(&mut self, state: &Matrix, accumulated: f64) -> Result<()> {
        if accumulated >= self.best_value {
            return Ok(());
        }
        if self.path.len() == self.length {
            self.best_value = accumulated;
            self.best = self.path.clone();
            return Ok(());
        }
        self.expanded += 1;
        for (k, t) in self.program.transitions().iter().enumerate() {
            let next = t.apply_matrix(state)?;
            let halted = self.program.measurement().halt_probability(&next);
            self.path.push(k);
            self.descend(&next, accumulated + halted)?;
            self.path.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::{build_walk, WalkKind, WalkSpec};

    #[test]
    fn size_cap() {
        assert!(check_search_size(2, 10, 1024).is_ok());
        assert!(matches!(
            check_search_size(2, 11, 1024),
            Err(Error::SearchSpaceTooLarge { size: 2048, cap: 1024 })
        ));
        assert!(check_search_size(3, 1000, 1 << 20).is_err());
        assert!(check_search_size(1, 1000, 1).is_ok());
    }

    #[test]
    fn walk_minimum_is_alternating() {
        let p = build_walk(&WalkSpec::new(WalkKind::Nondeterministic));
        let rho = DensityOperator::basis_state(4, 0);
        let out = min_termination(&p, &rho, 4, DEFAULT_SEARCH_CAP).unwrap();
        assert!(out.value < 1e-15);
        assert_eq!(out.best.to_string(), "1212");
    }
}
