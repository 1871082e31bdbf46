//! Argument definitions and command execution.

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qterm::divergence::diverging_states;
use qterm::linalg::Tolerance;
use qterm::reachability::reachable_space_traced;
use qterm::termination::{check_termination, simulate_spec, AnalysisOptions, ScheduleSpec};
use qterm::walks::{build_walk, WalkSpec, EXAMPLE_NAMES};
use qterm::{Error, Program};

use crate::file::{parse_state_arg, rows, InputError, LoadedState, ProgramFile, StateFile};
use crate::report::{
    tolerances, CheckResult, CommandResult, DivergeResult, InputSummary, ReachResult, Report, SimulateResult, Tool,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_ITERATION_CAP: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qterm", version, about = "Termination analysis for nondeterministic quantum programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the program terminates from a state under every schedule.
    Check(StateCommand),
    /// Compute the reachable space of a state.
    Reach(StateCommand),
    /// Compute the diverging pure states.
    Diverge(InputCommand),
    /// Run one schedule and print the per-step termination trace.
    Simulate(SimulateCommand),
    /// Print a built-in program as a program file, or list the built-ins.
    Example(ExampleCommand),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Program file in JSON, or `-` for standard input.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    pub file: Option<PathBuf>,

    /// Use a built-in program instead of a file.
    #[arg(long)]
    pub example: Option<String>,
}

#[derive(Debug, Args)]
pub struct Settings {
    /// Containment tolerance; the rank tolerance is a tenth of it.
    #[arg(long, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,

    /// Cap on refinement steps of the diverging-state computation.
    #[arg(long, default_value_t = 64)]
    pub max_iterations: usize,

    /// Length of witness and greedy schedules.
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct InputCommand {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Args)]
pub struct StateCommand {
    #[command(flatten)]
    pub source: Source,

    /// Initial state: a basis index or a JSON vector such as `[[1,0],[0,0]]`.
    /// Defaults to the file's `initial_state`.
    #[arg(long)]
    pub state: Option<String>,

    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Args)]
pub struct SimulateCommand {
    #[command(flatten)]
    pub run: StateCommand,

    /// A fragment such as `1212`, `greedy`, or `uniform:N`.
    #[arg(long)]
    pub schedule: String,
}

#[derive(Debug, Args)]
pub struct ExampleCommand {
    /// One of the built-in names; omit to list them.
    pub name: Option<String>,
}

/// What a command printed and how it ended.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

enum Failure {
    Input(InputError),
    Analysis(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Analysis(e)
    }
}

struct Loaded {
    program: Program,
    file: ProgramFile,
    source: String,
    opts: AnalysisOptions,
}

fn options(settings: &Settings) -> Result<AnalysisOptions, InputError> {
    let tol = match settings.tolerance {
        Some(t) => Tolerance::from_contain(t).map_err(|e| InputError::at("--tolerance", e))?,
        None => Tolerance::default(),
    };
    Ok(AnalysisOptions {
        tol,
        max_iterations: settings.max_iterations,
        horizon: settings.horizon,
        ..AnalysisOptions::default()
    })
}

fn read_source(source: &Source) -> Result<(ProgramFile, String), InputError> {
    if let Some(name) = &source.example {
        let spec = WalkSpec::by_name(name).ok_or_else(|| {
            InputError::at("--example", format!("unknown example {name:?}; expected one of {}", EXAMPLE_NAMES.join(", ")))
        })?;
        let file = example_file(&build_walk(&spec));
        return Ok((file, format!("example {name}")));
    }
    let path = source.file.as_ref().expect("clap requires a file or an example");
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| InputError::new(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| InputError::new(format!("cannot read {}: {e}", path.display())))?
    };
    let file = ProgramFile::parse(&text).map_err(|e| InputError {
        message: format!("{}: {}", path.display(), e.message),
        ..e
    })?;
    Ok((file, path.display().to_string()))
}

/// Built-in programs start in `|0>`.
pub fn example_file(program: &Program) -> ProgramFile {
    let mut psi = vec![[0.0, 0.0]; program.dim()];
    psi[0] = [1.0, 0.0];
    ProgramFile::from_program(program, Some(StateFile::Pure(psi)))
}

fn load(source: &Source, settings: &Settings) -> Result<Loaded, InputError> {
    let opts = options(settings)?;
    let (file, source) = read_source(source)?;
    let program = file.to_program(&opts.tol)?;
    Ok(Loaded {
        program,
        file,
        source,
        opts,
    })
}

fn load_state(loaded: &Loaded, arg: Option<&str>, stderr: &mut String) -> Result<LoadedState, InputError> {
    let state = match arg {
        Some(s) => parse_state_arg(s, loaded.program.dim(), &loaded.opts.tol)?,
        None => loaded
            .file
            .initial_state(&loaded.opts.tol)?
            .ok_or_else(|| InputError::at("--state", "no initial state given and the file has none"))?,
    };
    if let Some(w) = &state.warning {
        stderr.push_str(&format!("warning: {w}\n"));
    }
    Ok(state)
}

fn report(command: &'static str, loaded: &Loaded, state: Option<&LoadedState>, result: CommandResult, start: Instant) -> Report {
    Report {
        format_version: crate::file::FORMAT_VERSION,
        command,
        tool: Tool::default(),
        tolerances: tolerances(&loaded.opts.tol, loaded.opts.max_iterations, loaded.opts.horizon),
        input: InputSummary {
            source: loaded.source.clone(),
            dimension: loaded.program.dim(),
            processes: loaded.program.process_count(),
            initial_state: state.map(|s| rows(s.state.matrix())),
        },
        result,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    }
}

fn run_check(cmd: &StateCommand, err: &mut String) -> Result<String, Failure> {
    let start = Instant::now();
    let loaded = load(&cmd.source, &cmd.settings)?;
    let state = load_state(&loaded, cmd.state.as_deref(), err)?;
    let verdict = check_termination(&loaded.program, &state.state, &loaded.opts)?;
    let result = CommandResult::Check(CheckResult::new(&verdict));
    Ok(render(&report("check", &loaded, Some(&state), result, start), cmd.settings.format))
}

fn run_reach(cmd: &StateCommand, err: &mut String) -> Result<String, Failure> {
    let start = Instant::now();
    let loaded = load(&cmd.source, &cmd.settings)?;
    let state = load_state(&loaded, cmd.state.as_deref(), err)?;
    let run = reachable_space_traced(&loaded.program, &state.state, &loaded.opts.tol)?;
    let result = CommandResult::Reach(ReachResult::new(&run));
    Ok(render(&report("reach", &loaded, Some(&state), result, start), cmd.settings.format))
}

fn run_diverge(cmd: &InputCommand) -> Result<String, Failure> {
    let start = Instant::now();
    let loaded = load(&cmd.source, &cmd.settings)?;
    let div = diverging_states(&loaded.program, &loaded.opts.tol, loaded.opts.max_iterations)?;
    let result = CommandResult::Diverge(DivergeResult::new(&div));
    Ok(render(&report("diverge", &loaded, None, result, start), cmd.settings.format))
}

fn run_simulate(cmd: &SimulateCommand, err: &mut String) -> Result<String, Failure> {
    let start = Instant::now();
    let run = &cmd.run;
    let loaded = load(&run.source, &run.settings)?;
    let spec: ScheduleSpec = cmd.schedule.parse().map_err(|e| InputError::at("--schedule", e))?;
    if let ScheduleSpec::Fragment(f) = &spec {
        f.check(loaded.program.process_count())
            .map_err(|e| InputError::at("--schedule", e))?;
    }
    let state = load_state(&loaded, run.state.as_deref(), err)?;
    let sim = simulate_spec(&loaded.program, &spec, &state.state, &loaded.opts)?;
    let average = matches!(spec, ScheduleSpec::Uniform { .. });
    let result = CommandResult::Simulate(SimulateResult::new(&sim, average));
    Ok(render(&report("simulate", &loaded, Some(&state), result, start), run.settings.format))
}

fn run_example(cmd: &ExampleCommand) -> Result<String, Failure> {
    match &cmd.name {
        None => Ok(EXAMPLE_NAMES.iter().map(|n| format!("{n}\n")).collect()),
        Some(name) => {
            let spec = WalkSpec::by_name(name).ok_or_else(|| {
                InputError::at("example", format!("unknown example {name:?}; expected one of {}", EXAMPLE_NAMES.join(", ")))
            })?;
            Ok(example_file(&build_walk(&spec)).to_json() + "\n")
        }
    }
}

pub fn execute(command: &Command) -> Outcome {
    let mut stderr = String::new();
    let result = match command {
        Command::Check(c) => run_check(c, &mut stderr),
        Command::Reach(c) => run_reach(c, &mut stderr),
        Command::Diverge(c) => run_diverge(c),
        Command::Simulate(c) => run_simulate(c, &mut stderr),
        Command::Example(c) => run_example(c),
    };
    match result {
        Ok(stdout) => Outcome {
            stdout,
            stderr,
            code: EXIT_OK,
        },
        Err(failure) => {
            let code = match &failure {
                Failure::Input(e) => {
                    stderr.push_str(&format!("error: invalid input: {e}\n"));
                    EXIT_INVALID_INPUT
                }
                Failure::Analysis(e @ Error::IterationCapExceeded { last, .. }) => {
                    stderr.push_str(&format!(
                        "error: {e}; the last two sets have {} and {} components\n",
                        last.0.len(),
                        last.1.len()
                    ));
                    EXIT_ITERATION_CAP
                }
                Failure::Analysis(e) => {
                    stderr.push_str(&format!("error: {e}\n"));
                    EXIT_FAILURE
                }
            };
            Outcome {
                stdout: String::new(),
                stderr,
                code,
            }
        }
    }
}
