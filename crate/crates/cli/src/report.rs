//! Machine-readable reports and their text rendering.

use std::fmt::Write as _;

use qterm::linalg::{Tolerance, Vector};
use qterm::reachability::ReachabilityRun;
use qterm::termination::{Simulation, Verdict};
use qterm::{DivergenceResult, Subspace};
use serde::Serialize;

use crate::file::{entries, Entry, Rows};
use crate::render::{self, compact_json, display_basis, fix_phase, ket, probability, tidy_phase};

/// Longest schedule printed in full by the text format.
const SCHEDULE_PREVIEW: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub command: &'static str,
    pub tool: Tool,
    pub tolerances: Tolerances,
    pub input: InputSummary,
    pub result: CommandResult,
    /// Excluded from the determinism guarantee.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: "qterm",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub eps_rank: f64,
    pub eps_contain: f64,
    pub eps_prob: f64,
    pub max_iterations: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub source: String,
    pub dimension: usize,
    pub processes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Rows>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CommandResult {
    Check(CheckResult),
    Reach(ReachResult),
    Diverge(DivergeResult),
    Simulate(SimulateResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceReport {
    pub dimension: usize,
    /// Orthonormal basis vectors.
    pub basis: Vec<Vec<Entry>>,
}

impl SubspaceReport {
    fn canonical(s: &Subspace) -> Self {
        SubspaceReport {
            dimension: s.dim(),
            basis: display_basis(s).iter().map(entries).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    /// The fragment `f` with this component equal to `PD_f`.
    pub label: String,
    pub dimension: usize,
    pub basis: Vec<Vec<Entry>>,
}

fn components(div: &DivergenceResult) -> Vec<ComponentReport> {
    div.components()
        .map(|c| {
            let s = SubspaceReport::canonical(&c.space);
            ComponentReport {
                label: c.label.to_string(),
                dimension: s.dimension,
                basis: s.basis,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub state: Vec<Entry>,
    pub schedule: String,
    pub termination_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Iterations {
    pub divergence: usize,
    pub reachability_insertions: usize,
    pub residual_evaluations: usize,
    pub fragile_containments: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub terminating: bool,
    pub reachable: SubspaceReport,
    pub diverging: Vec<ComponentReport>,
    pub intersection: Vec<SubspaceReport>,
    pub witness: Option<WitnessReport>,
    pub iterations: Iterations,
}

impl CheckResult {
    pub fn new(v: &Verdict) -> Self {
        let witness = match (&v.witness_vector, &v.witness_schedule, v.witness_termination) {
            (Some(psi), Some(f), Some(t)) => Some(WitnessReport {
                state: entries(&fix_phase(psi)),
                schedule: f.to_string(),
                termination_probability: t,
            }),
            _ => None,
        };
        let diverging = v
            .pd_labels
            .iter()
            .zip(v.pd.components())
            .map(|(label, space)| {
                let s = SubspaceReport::canonical(space);
                ComponentReport {
                    label: label.to_string(),
                    dimension: s.dimension,
                    basis: s.basis,
                }
            })
            .collect();
        CheckResult {
            terminating: v.terminating,
            reachable: SubspaceReport::canonical(&v.reachable),
            diverging,
            intersection: v.intersection.components().iter().map(SubspaceReport::canonical).collect(),
            witness,
            iterations: Iterations {
                divergence: v.diagnostics.divergence_iterations,
                reachability_insertions: v.diagnostics.reachability_insertions,
                residual_evaluations: v.diagnostics.residual_evaluations,
                fragile_containments: v.diagnostics.fragile_containments,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InsertionReport {
    /// Index of the basis vector that was mapped.
    pub source: usize,
    /// Index of the Kraus element of the averaged transition.
    pub kraus: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReachResult {
    pub dimension: usize,
    /// The basis in insertion order.
    pub basis: Vec<Vec<Entry>>,
    pub initial_dimension: usize,
    pub insertions: Vec<InsertionReport>,
    pub residual_evaluations: usize,
}

impl ReachResult {
    pub fn new(run: &ReachabilityRun) -> Self {
        ReachResult {
            dimension: run.space.dim(),
            basis: (0..run.space.dim())
                .map(|i| entries(&tidy_phase(&run.space.basis_vector(i))))
                .collect(),
            initial_dimension: run.initial_dim,
            insertions: run
                .insertions
                .iter()
                .map(|i| InsertionReport {
                    source: i.source,
                    kraus: i.kraus,
                })
                .collect(),
            residual_evaluations: run.residual_evaluations,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergeResult {
    pub components: Vec<ComponentReport>,
    pub iterations: usize,
    pub converged: bool,
    pub fragile_containments: usize,
}

impl DivergeResult {
    pub fn new(div: &DivergenceResult) -> Self {
        DivergeResult {
            components: components(div),
            iterations: div.iterations,
            converged: div.converged,
            fragile_containments: div.fragile_containments,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub trace: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateResult {
    /// `"program"` or `"average"` for the uniformly random scheduler.
    pub runs_on: &'static str,
    pub schedule: String,
    pub steps: Vec<StepReport>,
    pub termination_probability: f64,
}

impl SimulateResult {
    pub fn new(sim: &Simulation, average: bool) -> Self {
        let steps: Vec<StepReport> = sim
            .records
            .iter()
            .map(|r| StepReport {
                step: r.step,
                trace: r.trace,
                cumulative: r.cumulative,
            })
            .collect();
        SimulateResult {
            runs_on: if average { "average" } else { "program" },
            schedule: sim.schedule.to_string(),
            termination_probability: steps.last().map_or(0.0, |s| s.cumulative),
            steps,
        }
    }
}

pub fn tolerances(tol: &Tolerance, max_iterations: usize, horizon: usize) -> Tolerances {
    Tolerances {
        eps_rank: tol.eps_rank(),
        eps_contain: tol.eps_contain(),
        eps_prob: tol.eps_prob(),
        max_iterations,
        horizon,
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        compact_json(&serde_json::to_string_pretty(self).expect("reports always serialize"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        let _ = writeln!(
            out,
            "program: {} (dimension {}, {} process{})",
            i.source,
            i.dimension,
            i.processes,
            if i.processes == 1 { "" } else { "es" }
        );
        if let Some(rho) = &i.initial_state {
            let _ = writeln!(out, "initial state: {}", describe_state(rho));
        }
        match &self.result {
            CommandResult::Check(r) => check_text(&mut out, r),
            CommandResult::Reach(r) => reach_text(&mut out, r),
            CommandResult::Diverge(r) => diverge_text(&mut out, r),
            CommandResult::Simulate(r) => simulate_text(&mut out, r),
        }
        let t = &self.tolerances;
        let _ = writeln!(
            out,
            "tolerances: eps_rank {:e}, eps_contain {:e}, eps_prob {:e}",
            t.eps_rank, t.eps_contain, t.eps_prob
        );
        out
    }
}

fn to_vector(v: &[Entry]) -> Vector {
    Vector::from_iterator(v.len(), v.iter().map(|e| qterm::linalg::c64(e[0], e[1])))
}

/// A pure state as a ket, anything else by its rank.
fn describe_state(rho: &Rows) -> String {
    let d = rho.len();
    let m = qterm::Matrix::from_fn(d, d, |r, c| qterm::linalg::c64(rho[r][c][0], rho[r][c][1]));
    let purity = (&m * &m).trace().re;
    let trace = m.trace().re;
    if (purity - trace * trace).abs() <= 1e-9 {
        if let Some(col) = (0..d).max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re)) {
            let v = m.column(col).into_owned();
            let n = v.norm();
            if n > 0.0 {
                return ket(&fix_phase(&v.unscale(n)));
            }
        }
    }
    format!("mixed, trace {}", render::real(trace))
}

fn span_text(basis: &[Vec<Entry>]) -> String {
    let vs: Vec<Vector> = basis.iter().map(|b| to_vector(b)).collect();
    render::span(&vs)
}

fn label_text(label: &str) -> String {
    format!("PD_{label}")
}

fn schedule_text(s: &str) -> String {
    let n = s.chars().count();
    if n <= SCHEDULE_PREVIEW {
        s.to_string()
    } else {
        let head: String = s.chars().take(SCHEDULE_PREVIEW).collect();
        format!("{head}... ({n} symbols)")
    }
}

fn components_text(out: &mut String, title: &str, list: &[ComponentReport]) {
    let _ = writeln!(out, "{title}: {} component{}", list.len(), if list.len() == 1 { "" } else { "s" });
    for c in list {
        let _ = writeln!(out, "  {} (dimension {}) = {}", label_text(&c.label), c.dimension, span_text(&c.basis));
    }
}

fn check_text(out: &mut String, r: &CheckResult) {
    let _ = writeln!(out, "verdict: {}", if r.terminating { "terminating" } else { "not terminating" });
    let _ = writeln!(out, "reachable space: dimension {}", r.reachable.dimension);
    for (i, b) in r.reachable.basis.iter().enumerate() {
        let _ = writeln!(out, "  b{} = {}", i + 1, ket(&to_vector(b)));
    }
    components_text(out, "diverging pure states", &r.diverging);
    let _ = writeln!(out, "reachable diverging states: {} component{}", r.intersection.len(), if r.intersection.len() == 1 { "" } else { "s" });
    for s in &r.intersection {
        let _ = writeln!(out, "  {}", span_text(&s.basis));
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness state: {}", ket(&to_vector(&w.state)));
        let _ = writeln!(out, "witness schedule: {}", schedule_text(&w.schedule));
        let _ = writeln!(out, "witness termination probability: {}", probability(w.termination_probability));
    }
    let _ = writeln!(out, "divergence iterations: {}", r.iterations.divergence);
}

fn reach_text(out: &mut String, r: &ReachResult) {
    let _ = writeln!(out, "reachable space: dimension {}", r.dimension);
    for (i, b) in r.basis.iter().enumerate() {
        let _ = writeln!(out, "  b{} = {}", i + 1, ket(&to_vector(b)));
    }
    let _ = writeln!(out, "residual evaluations: {}", r.residual_evaluations);
}

fn diverge_text(out: &mut String, r: &DivergeResult) {
    components_text(out, "diverging pure states", &r.components);
    let _ = writeln!(out, "iterations: {}", r.iterations);
}

fn simulate_text(out: &mut String, r: &SimulateResult) {
    let on = if r.runs_on == "average" { " on the average program" } else { "" };
    let _ = writeln!(out, "schedule{on}: {}", schedule_text(&r.schedule));
    let _ = writeln!(out, "{:>6}  {:>16}  {:>16}", "step", "trace", "cumulative");
    for s in &r.steps {
        let _ = writeln!(out, "{:>6}  {:>16.12}  {:>16.12}", s.step, s.trace, s.cumulative);
    }
    let _ = writeln!(out, "termination probability: {}", probability(r.termination_probability));
}
