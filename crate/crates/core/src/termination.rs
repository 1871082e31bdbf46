//! The termination verdict and its constructive companions.
//!
//! A unit-trace input `rho` terminates with probability one under every
//! schedule exactly when its reachable space meets no diverging pure state,
//! i.e. `H_R(rho) ∩ PD = {0}`. The reachable termination probability obeys a
//! zero-one law, which is what lets this qualitative test stand in for the
//! quantitative infimum over schedules.
//!
//! When the intersection is non-trivial, [`adversarial_schedule`] builds an
//! explicit schedule that keeps a witness state inside `PD` step after step,
//! so it never halts.

use std::str::FromStr;

use crate::channel::DensityOperator;
use crate::divergence::{diverging_states, DEFAULT_MAX_ITERATIONS};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Tolerance, Vector};
use crate::program::{Program, ScheduleFragment};
use crate::reachability::reachable_space_traced;
use crate::search::{self, DEFAULT_SEARCH_CAP};
use crate::subspace::{Subspace, SubspaceUnion};

/// Knobs shared by the analyses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub tol: Tolerance,
    pub max_iterations: usize,
    /// Length of witness schedules and greedy simulations.
    pub horizon: usize,
    pub search_cap: u128,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tol: Tolerance::default(),
            max_iterations: DEFAULT_MAX_ITERATIONS,
            horizon: 200,
            search_cap: DEFAULT_SEARCH_CAP,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub divergence_iterations: usize,
    pub reachability_insertions: usize,
    pub residual_evaluations: usize,
    pub fragile_containments: usize,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub terminating: bool,
    pub reachable: Subspace,
    pub pd: SubspaceUnion,
    pub pd_labels: Vec<ScheduleFragment>,
    /// `H_R(rho) ∩ PD`; the empty union is `{0}`.
    pub intersection: SubspaceUnion,
    pub witness_vector: Option<Vector>,
    pub witness_schedule: Option<ScheduleFragment>,
    /// `t_f(witness)` along the witness schedule.
    pub witness_termination: Option<f64>,
    pub diagnostics: Diagnostics,
}

pub fn check_termination(program: &Program, rho: &DensityOperator, opts: &AnalysisOptions) -> Result<Verdict> {
    let tol = &opts.tol;
    program.check_initial_state(rho, tol)?;
    let reach = reachable_space_traced(program, rho, tol)?;
    let div = diverging_states(program, tol, opts.max_iterations)?;
    let intersection = div.pd.intersect_subspace(&reach.space, tol)?;
    let diagnostics = Diagnostics {
        divergence_iterations: div.iterations,
        reachability_insertions: reach.insertions.len(),
        residual_evaluations: reach.residual_evaluations,
        fragile_containments: div.fragile_containments,
    };
    let terminating = intersection.is_zero();
    let (witness_vector, witness_schedule, witness_termination) = if terminating {
        (None, None, None)
    } else {
        let psi = intersection.components()[0].basis_vector(0);
        let schedule = adversarial_schedule(program, &psi, &div.pd, opts.horizon, tol)?;
        let t = program.termination_prob(&schedule, &DensityOperator::pure(&psi)?)?;
        (Some(psi), Some(schedule), Some(t))
    };
    Ok(Verdict {
        terminating,
        reachable: reach.space,
        pd: div.pd,
        pd_labels: div.labels,
        intersection,
        witness_vector,
        witness_schedule,
        witness_termination,
        diagnostics,
    })
}

/// Greedy non-halting schedule for a pure state inside `pd`: at every step
/// take the smallest process index whose image stays inside some component.
pub fn adversarial_schedule(
    program: &Program,
    psi: &Vector,
    pd: &SubspaceUnion,
    horizon: usize,
    tol: &Tolerance,
) -> Result<ScheduleFragment> {
    adversarial_schedule_from_state(program, &DensityOperator::pure(psi)?, pd, horizon, tol)
}

fn enclosing_component<'a>(pd: &'a SubspaceUnion, state: &Matrix, tol: &Tolerance) -> Result<Option<&'a Subspace>> {
    let support = Subspace::support(state, tol)?;
    if support.is_zero() {
        return Ok(None);
    }
    for q in pd.components() {
        if q.contains(&support, tol)? {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

/// As [`adversarial_schedule`] for a mixed starting state whose support lies
/// inside one component of `pd`.
pub fn adversarial_schedule_from_state(
    program: &Program,
    rho: &DensityOperator,
    pd: &SubspaceUnion,
    horizon: usize,
    tol: &Tolerance,
) -> Result<ScheduleFragment> {
    program.check_state(rho)?;
    let Some(q) = enclosing_component(pd, rho.matrix(), tol)? else {
        return Err(Error::NoDivergingStep { step: 0 });
    };
    let proj = q.projector();
    let mut state = &proj * rho.matrix() * &proj;
    let mut schedule = ScheduleFragment::empty();
    for step in 0..horizon {
        let mass = state.trace().re;
        let mut chosen = None;
        for (k, t) in program.transitions().iter().enumerate() {
            let next = t.apply_matrix(&state)?;
            if next.trace().re < 0.5 * mass {
                continue;
            }
            if let Some(q) = enclosing_component(pd, &next, tol)? {
                chosen = Some((k, next, q.projector()));
                break;
            }
        }
        let Some((k, next, p)) = chosen else {
            return Err(Error::NoDivergingStep { step });
        };
        // Keep the tracked state inside the component so round-off does not
        // accumulate over long horizons.
        state = &p * next * &p;
        schedule.push(k);
    }
    Ok(schedule)
}

/// `min_{|f| = length} t_f(rho)`: a lower bound on the termination
/// probability over all infinite schedules, nondecreasing in `length`.
pub fn infimum_lower_bound(program: &Program, rho: &DensityOperator, length: usize, cap: u128) -> Result<f64> {
    Ok(search::min_termination(program, rho, length, cap)?.value)
}

/// One row of a simulation trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Number of transitions applied.
    pub step: usize,
    /// `tr(T_{f(<=step)}(rho))`.
    pub trace: f64,
    /// `t_{f(<=step)}(rho)`: probability of halting at one of the first
    /// `step + 1` measurements.
    pub cumulative: f64,
}

/// Runs `f` from `rho`, recording one row per measurement.
pub fn simulate(program: &Program, f: &ScheduleFragment, rho: &DensityOperator) -> Result<Vec<StepRecord>> {
    program.check_state(rho)?;
    f.check(program.process_count())?;
    let meas = program.measurement();
    let mut state = rho.matrix().clone();
    let mut cumulative = meas.halt_probability(&state);
    let mut records = Vec::with_capacity(f.len() + 1);
    records.push(StepRecord {
        step: 0,
        trace: state.trace().re,
        cumulative,
    });
    for (n, &k) in f.indices().iter().enumerate() {
        state = program.transitions()[k].apply_matrix(&state)?;
        cumulative += meas.halt_probability(&state);
        records.push(StepRecord {
            step: n + 1,
            trace: state.trace().re,
            cumulative,
        });
    }
    Ok(records)
}

/// How a simulation picks its schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Fragment(ScheduleFragment),
    /// The adversarial schedule, of length `horizon`.
    Greedy,
    /// `steps` steps of the averaged program, i.e. the uniformly random
    /// scheduler in expectation.
    Uniform { steps: usize },
}

impl FromStr for ScheduleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "greedy" {
            return Ok(ScheduleSpec::Greedy);
        }
        if let Some(n) = s.strip_prefix("uniform:") {
            let steps = n
                .parse()
                .map_err(|_| Error::InvalidFragment(format!("bad step count in {s:?}")))?;
            return Ok(ScheduleSpec::Uniform { steps });
        }
        s.parse().map(ScheduleSpec::Fragment)
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    /// The fragment that was run; for `Uniform` it indexes the averaged program.
    pub schedule: ScheduleFragment,
    pub records: Vec<StepRecord>,
}

pub fn simulate_spec(
    program: &Program,
    spec: &ScheduleSpec,
    rho: &DensityOperator,
    opts: &AnalysisOptions,
) -> Result<Simulation> {
    let (schedule, records) = match spec {
        ScheduleSpec::Fragment(f) => (f.clone(), simulate(program, f, rho)?),
        ScheduleSpec::Greedy => {
            let div = diverging_states(program, &opts.tol, opts.max_iterations)?;
            let f = adversarial_schedule_from_state(program, rho, &div.pd, opts.horizon, &opts.tol)?;
            let records = simulate(program, &f, rho)?;
            (f, records)
        }
        ScheduleSpec::Uniform { steps } => {
            let f = ScheduleFragment::new(vec![0; *steps]);
            let records = simulate(&program.average(), &f, rho)?;
            (f, records)
        }
    };
    Ok(Simulation { schedule, records })
}
