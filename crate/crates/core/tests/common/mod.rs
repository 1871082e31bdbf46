#![allow(dead_code)]

use nalgebra::Complex;
use qterm::linalg::{hermitian_eig, Matrix, Tolerance, Vector};
use qterm::{DensityOperator, Measurement, Program, Subspace, SuperOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn gaussian(rng: &mut TestRng) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector(rng: &mut TestRng, d: usize) -> Vector {
    let v = Vector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

pub fn unitary(rng: &mut TestRng, d: usize) -> Matrix {
    let qr = gaussian_matrix(rng, d, d).qr();
    let (q, r) = qr.unpack();
    // fix column phases so the distribution is Haar
    Matrix::from_fn(d, d, |i, j| {
        let z = r[(j, j)];
        q[(i, j)] * (z / z.norm())
    })
}

fn diag(values: &[f64]) -> Matrix {
    Matrix::from_diagonal(&Vector::from_iterator(
        values.len(),
        values.iter().map(|&x| Complex::new(x, 0.0)),
    ))
}

/// A trace-preserving Kraus set with `count` elements.
pub fn kraus_set(rng: &mut TestRng, d: usize, count: usize) -> Vec<Matrix> {
    if count == 1 {
        return vec![unitary(rng, d)];
    }
    let raw: Vec<Matrix> = (0..count).map(|_| gaussian_matrix(rng, d, d)).collect();
    let gram = raw
        .iter()
        .fold(Matrix::zeros(d, d), |acc, a| acc + a.adjoint() * a);
    let eig = hermitian_eig(&gram, &tol()).unwrap();
    let inv_sqrt: Vec<f64> = eig.values.iter().map(|v| 1.0 / v.sqrt()).collect();
    let s = &eig.vectors * diag(&inv_sqrt) * eig.vectors.adjoint();
    raw.iter().map(|a| a * &s).collect()
}

pub fn channel(rng: &mut TestRng, d: usize) -> SuperOperator {
    let count = rng.random_range(1..=2);
    SuperOperator::new(d, kraus_set(rng, d, count), &tol()).unwrap()
}

/// A trace non-increasing channel: a TP channel damped by a random contraction.
pub fn subchannel(rng: &mut TestRng, d: usize) -> SuperOperator {
    let count = rng.random_range(1..=2);
    let damp: Vec<f64> = (0..d).map(|_| rng.random_range(0.3..1.0)).collect();
    let u = unitary(rng, d);
    let c = &u * diag(&damp) * u.adjoint();
    let kraus = kraus_set(rng, d, count).into_iter().map(|e| e * &c).collect();
    SuperOperator::trace_nonincreasing(d, kraus, &tol()).unwrap()
}

pub fn subspace(rng: &mut TestRng, d: usize, k: usize) -> Subspace {
    let vs: Vec<Vector> = (0..k).map(|_| unit_vector(rng, d)).collect();
    Subspace::span(d, &vs, &tol()).unwrap()
}

/// A random `k`-dimensional subspace of `s` (or all of `s` if smaller).
pub fn subspace_within(rng: &mut TestRng, s: &Subspace, k: usize) -> Subspace {
    let vs: Vec<Vector> = (0..k.min(s.dim()))
        .map(|_| s.basis() * unit_vector(rng, s.dim()))
        .collect();
    Subspace::span(s.ambient_dim(), &vs, &tol()).unwrap()
}

pub fn vector_in(rng: &mut TestRng, s: &Subspace) -> Vector {
    s.basis() * unit_vector(rng, s.dim())
}

pub fn density(rng: &mut TestRng, d: usize, rank: usize) -> DensityOperator {
    let a = gaussian_matrix(rng, d, rank);
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.unscale(tr), &tol()).unwrap()
}

/// A measurement `M0 = Q sqrt(L) Q^dag`, `M1 = Q sqrt(1 - L) Q^dag` whose
/// halting weights `L` are zero on the first `kernel` columns of `q`.
pub fn measurement_with_kernel(rng: &mut TestRng, q: &Matrix, kernel: usize, projective: bool) -> Measurement {
    let d = q.nrows();
    let weights: Vec<f64> = (0..d)
        .map(|i| {
            if i < kernel {
                0.0
            } else if projective {
                1.0
            } else {
                rng.random_range(0.2..=1.0)
            }
        })
        .collect();
    let halt: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let cont: Vec<f64> = weights.iter().map(|w| (1.0 - w).sqrt()).collect();
    Measurement::new(q * diag(&halt) * q.adjoint(), q * diag(&cont) * q.adjoint(), &tol()).unwrap()
}

/// Unitary that leaves the span of the first `k` columns of `q` invariant.
pub fn block_unitary(rng: &mut TestRng, q: &Matrix, k: usize) -> Matrix {
    let d = q.nrows();
    let mut block = Matrix::zeros(d, d);
    block.view_mut((0, 0), (k, k)).copy_from(&unitary(rng, k));
    if d > k {
        block.view_mut((k, k), (d - k, d - k)).copy_from(&unitary(rng, d - k));
    }
    q * block * q.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Random channels and a random measurement.
    Generic,
    /// Unitary processes and a projective measurement with a large kernel.
    Unitary,
    /// One process keeps a subspace of the kernel of `M0` invariant, so the
    /// program has diverging states by construction.
    Planted,
}

pub fn program(rng: &mut TestRng, d: usize, m: usize, family: Family) -> Program {
    let q = unitary(rng, d);
    match family {
        Family::Generic => {
            let kernel = rng.random_range(0..d);
            let projective = rng.random_bool(0.5);
            let meas = measurement_with_kernel(rng, &q, kernel, projective);
            let procs = (0..m).map(|_| channel(rng, d)).collect();
            Program::new(procs, meas).unwrap()
        }
        Family::Unitary => {
            let meas = measurement_with_kernel(rng, &q, d - 1, true);
            let procs = (0..m)
                .map(|_| SuperOperator::unitary(unitary(rng, d), &tol()).unwrap())
                .collect();
            Program::new(procs, meas).unwrap()
        }
        Family::Planted => {
            let kernel = rng.random_range(1..d);
            let invariant = rng.random_range(1..=kernel);
            let projective = rng.random_bool(0.5);
            let meas = measurement_with_kernel(rng, &q, kernel, projective);
            let planted = rng.random_range(0..m);
            let procs = (0..m)
                .map(|k| {
                    if k == planted {
                        SuperOperator::unitary(block_unitary(rng, &q, invariant), &tol()).unwrap()
                    } else {
                        channel(rng, d)
                    }
                })
                .collect();
            Program::new(procs, meas).unwrap()
        }
    }
}

pub fn any_program(rng: &mut TestRng, max_d: usize, max_m: usize) -> Program {
    let d = rng.random_range(2..=max_d);
    let m = rng.random_range(1..=max_m);
    let family = match rng.random_range(0..3) {
        0 => Family::Generic,
        1 => Family::Unitary,
        _ => Family::Planted,
    };
    program(rng, d, m, family)
}

pub fn fragment(rng: &mut TestRng, m: usize, len: usize) -> qterm::ScheduleFragment {
    qterm::ScheduleFragment::new((0..len).map(|_| rng.random_range(0..m)).collect())
}

/// Projector distance between two subspaces.
pub fn projector_distance(a: &Subspace, b: &Subspace) -> f64 {
    (a.projector() - b.projector()).norm()
}
