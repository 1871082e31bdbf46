//! Nondeterministic quantum programs, schedule fragments and termination
//! probabilities along a fragment.
//!
//! A program is a set of trace-preserving processes sharing one state space
//! together with a termination measurement `{M0, M1}`. One step of process
//! `k` first measures; outcome 1 continues and process `k` runs. This is the
//! transition map `T_k(rho) = E_k(M1 rho M1^dag)`.

use std::fmt;
use std::str::FromStr;

use crate::channel::{DensityOperator, Measurement, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};

/// A finite sequence of process choices.
///
/// Indices are zero-based in the API; the textual form (`"1212"` or
/// `"1,2,1,2"`) and [`ScheduleFragment::labels`] use one-based labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ScheduleFragment(Vec<usize>);

impl ScheduleFragment {
    pub fn empty() -> Self {
        ScheduleFragment(Vec::new())
    }

    pub fn new(indices: Vec<usize>) -> Self {
        ScheduleFragment(indices)
    }

    /// From one-based labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        labels
            .iter()
            .map(|&l| {
                l.checked_sub(1)
                    .ok_or_else(|| Error::InvalidFragment("process labels start at 1".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(ScheduleFragment)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `f(<= n)`, the first `n` choices.
    pub fn prefix(&self, n: usize) -> ScheduleFragment {
        ScheduleFragment(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &ScheduleFragment) -> ScheduleFragment {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ScheduleFragment(v)
    }

    /// `k f`: the fragment that runs `k` first and then `self`.
    pub fn prepend(&self, k: usize) -> ScheduleFragment {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(k);
        v.extend_from_slice(&self.0);
        ScheduleFragment(v)
    }

    pub fn push(&mut self, k: usize) {
        self.0.push(k);
    }

    pub fn repeat(&self, times: usize) -> ScheduleFragment {
        ScheduleFragment(self.0.repeat(times))
    }

    pub fn check(&self, process_count: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= process_count) {
            Some(&i) => Err(Error::IndexOutOfRange {
                index: i,
                count: process_count,
            }),
            None => Ok(()),
        }
    }
}

impl FromStr for ScheduleFragment {
    type Err = Error;

    /// Digits run together (`"1212"`) or labels separated by commas or
    /// whitespace (`"1, 12, 3"`). `""` and `"ε"` are the empty fragment.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "eps" {
            return Ok(ScheduleFragment::empty());
        }
        let bad = || Error::InvalidFragment(format!("cannot parse {s:?}"));
        let labels: Vec<usize> = if s.contains(|c: char| c == ',' || c.is_whitespace()) {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        ScheduleFragment::from_labels(&labels)
    }
}

impl fmt::Display for ScheduleFragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let sep = if self.0.iter().all(|&i| i < 9) { "" } else { "," };
        let parts: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// A nondeterministic quantum program `({E_1, ..., E_m}, {M0, M1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    dim: usize,
    processes: Vec<SuperOperator>,
    measurement: Measurement,
    transitions: Vec<SuperOperator>,
}

impl Program {
    pub fn new(processes: Vec<SuperOperator>, measurement: Measurement) -> Result<Self> {
        let dim = measurement.dim();
        if processes.is_empty() {
            return Err(Error::NoProcesses);
        }
        for (index, p) in processes.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if !p.is_trace_preserving() {
                return Err(Error::ProcessNotTracePreserving { index });
            }
        }
        let m1 = measurement.m1();
        let transitions = processes
            .iter()
            .map(|p| {
                let kraus = p.kraus().iter().map(|e| e * m1).collect();
                SuperOperator::from_parts_unchecked(dim, kraus, false)
            })
            .collect();
        Ok(Program {
            dim,
            processes,
            measurement,
            transitions,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn process_count(&self) -> usize {
        self.processes.len()
    }

    pub fn processes(&self) -> &[SuperOperator] {
        &self.processes
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    /// `T_k` with Kraus elements `{E_{k,j} M1}` (zero-based `k`).
    pub fn transition(&self, k: usize) -> Result<&SuperOperator> {
        self.transitions.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            count: self.processes.len(),
        })
    }

    pub fn transitions(&self) -> &[SuperOperator] {
        &self.transitions
    }

    pub(crate) fn check_state(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            })
        }
    }

    /// `T_f(rho) = T_{f_n} ∘ ... ∘ T_{f_1}(rho)`.
    pub fn run_fragment(&self, f: &ScheduleFragment, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_state(rho)?;
        f.check(self.process_count())?;
        let mut m = rho.matrix().clone();
        for &k in f.indices() {
            m = self.transitions[k].apply_matrix(&m)?;
        }
        Ok(DensityOperator::from_matrix_unchecked(m))
    }

    /// `t_f(rho) = sum_{n=0}^{|f|} tr(M0 T_{f(<=n)}(rho) M0^dag)`.
    pub fn termination_prob(&self, f: &ScheduleFragment, rho: &DensityOperator) -> Result<f64> {
        self.check_state(rho)?;
        f.check(self.process_count())?;
        let mut m = rho.matrix().clone();
        let mut total = self.measurement.halt_probability(&m);
        for &k in f.indices() {
            m = self.transitions[k].apply_matrix(&m)?;
            total += self.measurement.halt_probability(&m);
        }
        Ok(total)
    }

    /// The same probability as `tr(rho) - tr(M1 T_f(rho) M1^dag)`.
    pub fn termination_prob_closed_form(&self, f: &ScheduleFragment, rho: &DensityOperator) -> Result<f64> {
        let last = self.run_fragment(f, rho)?;
        Ok(rho.trace() - self.measurement.continue_probability(last.matrix()))
    }

    /// The deterministic program whose single process is the arithmetic mean
    /// of the processes, with Kraus set `{E_{i,j} / sqrt(m)}`.
    pub fn average(&self) -> Program {
        if self.processes.len() == 1 {
            return self.clone();
        }
        let scale = 1.0 / (self.processes.len() as f64).sqrt();
        let kraus = self
            .processes
            .iter()
            .flat_map(|p| p.kraus().iter().map(|e| e.scale(scale)))
            .collect();
        let avg = SuperOperator::from_parts_unchecked(self.dim, kraus, true);
        Program::new(vec![avg], self.measurement.clone()).expect("average of valid processes is valid")
    }

    /// Validates that `rho` has unit trace, as the termination verdict assumes.
    pub fn check_initial_state(&self, rho: &DensityOperator, tol: &Tolerance) -> Result<()> {
        self.check_state(rho)?;
        let trace = linalg::real_trace(rho.matrix());
        if (trace - 1.0).abs() > tol.eps_prob() {
            return Err(Error::TraceNotOne { trace });
        }
        Ok(())
    }
}
