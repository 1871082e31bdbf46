//! Quantum walks on the four-vertex cycle `C4` with an absorbing vertex.
//!
//! Two coin-free walk unitaries move left, right or stay with probability 1/3
//! each. Either walk alone terminates with probability one from `|0>`; letting
//! a scheduler choose between them does not, because `W2 W1 |0> = |0>`.

use crate::channel::{Measurement, SuperOperator};
use crate::linalg::{basis_projector, c64, Matrix, Tolerance};
use crate::program::Program;

const W1_PATTERN: [[f64; 4]; 4] = [
    [1.0, 1.0, 0.0, -1.0],
    [1.0, -1.0, 1.0, 0.0],
    [0.0, 1.0, 1.0, 1.0],
    [1.0, 0.0, -1.0, 1.0],
];

const W2_PATTERN: [[f64; 4]; 4] = [
    [1.0, 1.0, 0.0, 1.0],
    [-1.0, 1.0, -1.0, 0.0],
    [0.0, 1.0, 1.0, -1.0],
    [1.0, 0.0, -1.0, -1.0],
];

fn scaled(pattern: &[[f64; 4]; 4]) -> Matrix {
    let s = 1.0 / 3f64.sqrt();
    Matrix::from_fn(4, 4, |r, c| c64(pattern[r][c] * s, 0.0))
}

/// The first walk unitary.
pub fn w1() -> Matrix {
    scaled(&W1_PATTERN)
}

/// The second walk unitary.
pub fn w2() -> Matrix {
    scaled(&W2_PATTERN)
}

/// Which unitaries the scheduler may choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    W1Only,
    W2Only,
    Nondeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkSpec {
    pub which: WalkKind,
    /// Vertex in `0..4` where the walk is absorbed.
    pub absorbing: usize,
}

impl WalkSpec {
    pub fn new(which: WalkKind) -> Self {
        WalkSpec { which, absorbing: 2 }
    }

    pub fn with_absorbing(mut self, vertex: usize) -> Self {
        assert!(vertex < 4, "C4 has vertices 0..4");
        self.absorbing = vertex;
        self
    }

    /// Looks up `c4-w1`, `c4-w2` or `c4-nondet`.
    pub fn by_name(name: &str) -> Option<Self> {
        let which = match name {
            "c4-w1" => WalkKind::W1Only,
            "c4-w2" => WalkKind::W2Only,
            "c4-nondet" => WalkKind::Nondeterministic,
            _ => return None,
        };
        Some(WalkSpec::new(which))
    }
}

pub const EXAMPLE_NAMES: [&str; 3] = ["c4-w1", "c4-w2", "c4-nondet"];

pub fn build_walk(spec: &WalkSpec) -> Program {
    let tol = Tolerance::default();
    let unitary = |m: Matrix| SuperOperator::unitary(m, &tol).expect("walk matrices are unitary");
    let processes = match spec.which {
        WalkKind::W1Only => vec![unitary(w1())],
        WalkKind::W2Only => vec![unitary(w2())],
        WalkKind::Nondeterministic => vec![unitary(w1()), unitary(w2())],
    };
    let p0 = basis_projector(4, spec.absorbing);
    let p1 = Matrix::identity(4, 4) - &p0;
    let measurement = Measurement::new(p0, p1, &tol).expect("projective measurement is complete");
    Program::new(processes, measurement).expect("walk program is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ket;

    #[test]
    fn walks_are_unitary() {
        for w in [w1(), w2()] {
            assert!((w.adjoint() * &w - Matrix::identity(4, 4)).norm() < 1e-12);
        }
    }

    #[test]
    fn w2_undoes_w1_on_origin() {
        let v = w2() * w1() * ket(4, 0);
        assert!((v - ket(4, 0)).norm() < 1e-12);
    }

    #[test]
    fn build_specs() {
        assert_eq!(build_walk(&WalkSpec::new(WalkKind::W1Only)).process_count(), 1);
        let p = build_walk(&WalkSpec::new(WalkKind::Nondeterministic));
        assert_eq!(p.process_count(), 2);
        assert_eq!(p.processes()[0].kraus()[0], w1());
        assert_eq!(p.measurement().m0()[(2, 2)].re, 1.0);
        let moved = build_walk(&WalkSpec::new(WalkKind::W1Only).with_absorbing(3));
        assert_eq!(moved.measurement().m0()[(3, 3)].re, 1.0);
        assert!(WalkSpec::by_name("c4-nondet").is_some());
        assert!(WalkSpec::by_name("c5").is_none());
    }
}
