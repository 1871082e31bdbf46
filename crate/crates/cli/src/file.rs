//! The JSON program file and its validation.

use std::fmt;

use qterm::linalg::{c64, Matrix, Tolerance, Vector};
use qterm::{DensityOperator, Measurement, Program, SuperOperator};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

/// A complex number as `[re, im]`.
pub type Entry = [f64; 2];

/// A matrix as a list of rows.
pub type Rows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramFile {
    pub format_version: u32,
    pub dimension: usize,
    /// One list of Kraus matrices per process.
    pub kraus_sets: Vec<Vec<Rows>>,
    pub measurement: MeasurementFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub m0: Rows,
    pub m1: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFile {
    /// A state vector; normalized on load.
    Pure(Vec<Entry>),
    Density(Rows),
}

/// Invalid input, located by line and column or by field path.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub location: Option<Location>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    Text { line: usize, column: usize },
    Field(String),
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError {
            location: None,
            message: message.into(),
        }
    }

    pub fn at(field: impl Into<String>, message: impl fmt::Display) -> Self {
        InputError {
            location: Some(Location::Field(field.into())),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(Location::Text { line, column }) => write!(f, "line {line}, column {column}: {}", self.message),
            Some(Location::Field(field)) => write!(f, "{field}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for InputError {}

fn json_error(e: serde_json::Error) -> InputError {
    InputError {
        location: Some(Location::Text {
            line: e.line(),
            column: e.column(),
        }),
        // serde_json appends the position itself; keep only the message
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    }
}

pub fn entry(z: qterm::linalg::C64) -> Entry {
    [z.re, z.im]
}

pub fn rows(m: &Matrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| entry(m[(i, j)])).collect())
        .collect()
}

pub fn entries(v: &Vector) -> Vec<Entry> {
    v.iter().map(|&z| entry(z)).collect()
}

fn finite(e: &Entry, field: impl FnOnce() -> String) -> Result<(), InputError> {
    if e[0].is_finite() && e[1].is_finite() {
        Ok(())
    } else {
        Err(InputError::at(field(), "entry is not a finite number"))
    }
}

pub fn matrix(r: &Rows, dim: usize, field: &str) -> Result<Matrix, InputError> {
    if r.len() != dim {
        return Err(InputError::at(field, format!("expected {dim} rows, found {}", r.len())));
    }
    for (i, row) in r.iter().enumerate() {
        if row.len() != dim {
            return Err(InputError::at(
                format!("{field}[{i}]"),
                format!("row has {} entries, expected {dim}", row.len()),
            ));
        }
        for (j, e) in row.iter().enumerate() {
            finite(e, || format!("{field}[{i}][{j}]"))?;
        }
    }
    Ok(Matrix::from_fn(dim, dim, |i, j| c64(r[i][j][0], r[i][j][1])))
}

pub fn vector(v: &[Entry], dim: usize, field: &str) -> Result<Vector, InputError> {
    if v.len() != dim {
        return Err(InputError::at(field, format!("expected {dim} entries, found {}", v.len())));
    }
    for (i, e) in v.iter().enumerate() {
        finite(e, || format!("{field}[{i}]"))?;
    }
    Ok(Vector::from_iterator(dim, v.iter().map(|e| c64(e[0], e[1]))))
}

/// A loaded state and an optional warning about normalization.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub state: DensityOperator,
    pub warning: Option<String>,
}

/// Normalizes a state vector, warning when its norm is off by more than
/// `eps_prob`.
pub fn pure_state(psi: &Vector, tol: &Tolerance, field: &str) -> Result<LoadedState, InputError> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(InputError::at(field, "state vector is zero"));
    }
    let warning = ((norm * norm - 1.0).abs() > tol.eps_prob())
        .then(|| format!("{field}: state vector has norm {norm}; normalized"));
    let state = DensityOperator::pure(psi).map_err(|e| InputError::at(field, e))?;
    Ok(LoadedState { state, warning })
}

impl ProgramFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let file: ProgramFile = serde_json::from_str(text).map_err(json_error)?;
        if file.format_version != FORMAT_VERSION {
            return Err(InputError::at(
                "format_version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", file.format_version),
            ));
        }
        Ok(file)
    }

    pub fn from_program(program: &Program, initial_state: Option<StateFile>) -> Self {
        ProgramFile {
            format_version: FORMAT_VERSION,
            dimension: program.dim(),
            kraus_sets: program
                .processes()
                .iter()
                .map(|p| p.kraus().iter().map(rows).collect())
                .collect(),
            measurement: MeasurementFile {
                m0: rows(program.measurement().m0()),
                m1: rows(program.measurement().m1()),
            },
            initial_state,
        }
    }

    pub fn to_json(&self) -> String {
        crate::render::compact_json(&serde_json::to_string_pretty(self).expect("program files always serialize"))
    }

    pub fn to_program(&self, tol: &Tolerance) -> Result<Program, InputError> {
        let d = self.dimension;
        if d == 0 {
            return Err(InputError::at("dimension", "must be at least 1"));
        }
        if self.kraus_sets.is_empty() {
            return Err(InputError::at("kraus_sets", "at least one process is required"));
        }
        let mut processes = Vec::with_capacity(self.kraus_sets.len());
        for (k, set) in self.kraus_sets.iter().enumerate() {
            let field = format!("kraus_sets[{k}]");
            if set.is_empty() {
                return Err(InputError::at(field, "process has no Kraus matrices"));
            }
            let kraus = set
                .iter()
                .enumerate()
                .map(|(i, r)| matrix(r, d, &format!("{field}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            processes.push(SuperOperator::new(d, kraus, tol).map_err(|e| InputError::at(field, e))?);
        }
        let m0 = matrix(&self.measurement.m0, d, "measurement.m0")?;
        let m1 = matrix(&self.measurement.m1, d, "measurement.m1")?;
        let measurement = Measurement::new(m0, m1, tol).map_err(|e| InputError::at("measurement", e))?;
        Program::new(processes, measurement).map_err(|e| InputError::at("kraus_sets", e))
    }

    /// The `initial_state` field, if present.
    pub fn initial_state(&self, tol: &Tolerance) -> Result<Option<LoadedState>, InputError> {
        let Some(s) = &self.initial_state else {
            return Ok(None);
        };
        let d = self.dimension;
        let loaded = match s {
            StateFile::Pure(v) => pure_state(&vector(v, d, "initial_state.pure")?, tol, "initial_state.pure")?,
            StateFile::Density(r) => {
                let field = "initial_state.density";
                let state = DensityOperator::new(matrix(r, d, field)?, tol).map_err(|e| InputError::at(field, e))?;
                LoadedState { state, warning: None }
            }
        };
        Ok(Some(loaded))
    }
}

/// Parses the `--state` argument: a basis index or a JSON vector whose
/// entries are `[re, im]` pairs or real numbers.
pub fn parse_state_arg(arg: &str, dim: usize, tol: &Tolerance) -> Result<LoadedState, InputError> {
    let arg = arg.trim();
    if let Ok(index) = arg.parse::<usize>() {
        if index >= dim {
            return Err(InputError::at(
                "--state",
                format!("basis index {index} out of range for dimension {dim}"),
            ));
        }
        return Ok(LoadedState {
            state: DensityOperator::basis_state(dim, index),
            warning: None,
        });
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Loose {
        Pair(Entry),
        Real(f64),
    }
    let raw: Vec<Loose> = serde_json::from_str(arg)
        .map_err(|e| InputError::at("--state", format!("expected a basis index or a JSON vector ({})", json_error(e))))?;
    let v: Vec<Entry> = raw
        .into_iter()
        .map(|e| match e {
            Loose::Pair(p) => p,
            Loose::Real(x) => [x, 0.0],
        })
        .collect();
    pure_state(&vector(&v, dim, "--state")?, tol, "--state")
}
