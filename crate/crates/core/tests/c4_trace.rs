//! The worked example on the four-cycle, step by step.

mod common;

use common::{projector_distance, tol};
use nalgebra::Complex;
use qterm::divergence::{h_zero_subspace, pd_step_labeled, Component};
use qterm::linalg::{ket, Vector};
use qterm::program::ScheduleFragment;
use qterm::reachability::{reachable_space_traced, Insertion};
use qterm::termination::{adversarial_schedule, check_termination, AnalysisOptions};
use qterm::walks::{build_walk, w1, w2, WalkKind, WalkSpec};
use qterm::{diverging_states, DensityOperator, Program, Subspace};

fn v(entries: &[f64]) -> Vector {
    let n = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
    Vector::from_iterator(entries.len(), entries.iter().map(|&x| Complex::new(x / n, 0.0)))
}

fn span(vs: &[Vector]) -> Subspace {
    Subspace::span(4, vs, &tol()).unwrap()
}

fn minus() -> Vector {
    v(&[0.0, 1.0, 0.0, -1.0])
}

fn plus() -> Vector {
    v(&[0.0, 1.0, 0.0, 1.0])
}

fn nondet() -> Program {
    build_walk(&WalkSpec::new(WalkKind::Nondeterministic))
}

fn label(s: &str) -> ScheduleFragment {
    s.parse().unwrap()
}

fn find<'a>(list: &'a [Component], l: &str) -> &'a Subspace {
    &list.iter().find(|c| c.label == label(l)).unwrap().space
}

#[test]
fn kraus_images_of_origin() {
    let e1 = w1() * ket(4, 0);
    let e2 = w2() * ket(4, 0);
    let want1 = v(&[1.0, 1.0, 0.0, 1.0]);
    let want2 = v(&[1.0, -1.0, 0.0, 1.0]);
    assert!((e1 - want1).norm() < 1e-15);
    assert!((e2 - want2).norm() < 1e-15);
    assert!((w1().adjoint() * ket(4, 2) - v(&[0.0, 1.0, 1.0, 1.0])).norm() < 1e-15);
    assert!((w2().adjoint() * ket(4, 2) - v(&[0.0, 1.0, 1.0, -1.0])).norm() < 1e-15);
}

#[test]
fn reachability_basis_order() {
    let p = nondet();
    let run = reachable_space_traced(&p, &DensityOperator::basis_state(4, 0), &tol()).unwrap();
    assert_eq!(run.initial_dim, 1);
    assert_eq!(
        run.insertions,
        vec![
            Insertion { source: 0, kraus: 0 },
            Insertion { source: 0, kraus: 1 },
            Insertion { source: 1, kraus: 0 },
        ]
    );
    let expected = [ket(4, 0), plus(), v(&[0.0, -1.0, 0.0, 1.0]), ket(4, 2)];
    assert_eq!(run.space.dim(), 4);
    for (i, want) in expected.iter().enumerate() {
        assert!((run.space.basis_vector(i) - want).norm() < 1e-9, "basis vector {i}");
    }
    // 4 basis vectors, 2 Kraus elements each
    assert_eq!(run.residual_evaluations, 8);
}

#[test]
fn divergence_trace() {
    let p = nondet();
    let t = tol();
    let h0 = h_zero_subspace(&p, &t);
    assert!(h0.same_as(&span(&[ket(4, 0), ket(4, 1), ket(4, 3)]), &t).unwrap());

    let start = vec![Component {
        label: ScheduleFragment::empty(),
        space: h0.clone(),
    }];
    let step1 = pd_step_labeled(&p, &h0, &start, &t).unwrap();
    let pd1 = span(&[ket(4, 0), minus()]);
    let pd2 = span(&[ket(4, 0), plus()]);
    assert!(projector_distance(find(&step1, "1"), &pd1) < 1e-9);
    assert!(projector_distance(find(&step1, "2"), &pd2) < 1e-9);

    let step2 = pd_step_labeled(&p, &h0, &step1, &t).unwrap();
    assert_eq!(step2.len(), 4);
    let pd11 = span(&[v(&[1.0, 1.0, 0.0, -1.0])]);
    let pd22 = span(&[v(&[1.0, 1.0, 0.0, 1.0])]);
    assert!(projector_distance(find(&step2, "11"), &pd11) < 1e-9);
    assert!(projector_distance(find(&step2, "22"), &pd22) < 1e-9);
    assert!(projector_distance(find(&step2, "21"), &pd2) < 1e-9);
    assert!(projector_distance(find(&step2, "12"), &pd1) < 1e-9);
}

#[test]
fn divergence_fixpoint() {
    let p = nondet();
    let t = tol();
    let r = diverging_states(&p, &t, 64).unwrap();
    assert!(r.converged);
    assert_eq!(r.iterations, 2);
    assert_eq!(r.pd.len(), 2);
    assert_eq!(r.labels, vec![label("1"), label("2")]);
    assert!(projector_distance(&r.pd.components()[0], &span(&[ket(4, 0), minus()])) < 1e-9);
    assert!(projector_distance(&r.pd.components()[1], &span(&[ket(4, 0), plus()])) < 1e-9);
    assert_eq!(r.fragile_containments, 0);
    // the history holds [PD_ε], then J_1, then the raw J_2
    assert_eq!(r.history.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4]);
}

#[test]
fn verdict_and_witness() {
    let p = nondet();
    let t = tol();
    let rho = DensityOperator::basis_state(4, 0);
    let v = check_termination(&p, &rho, &AnalysisOptions::default()).unwrap();
    assert!(!v.terminating);
    assert_eq!(v.reachable.dim(), 4);
    assert_eq!(v.intersection.len(), 2);
    assert!(v.intersection.components().iter().all(|c| c.contains_vector(&ket(4, 0), &t)));
    assert_eq!(v.witness_schedule.as_ref().unwrap().len(), 200);

    let f = adversarial_schedule(&p, &ket(4, 0), &v.pd, 6, &t).unwrap();
    assert_eq!(f, label("121212"));
}

#[test]
fn single_walks_terminate() {
    for kind in [WalkKind::W1Only, WalkKind::W2Only] {
        let p = build_walk(&WalkSpec::new(kind));
        let v = check_termination(&p, &DensityOperator::basis_state(4, 0), &AnalysisOptions::default()).unwrap();
        assert!(v.terminating, "{kind:?}");
        assert!(v.pd.is_zero());
    }
}

#[test]
fn fragment_probabilities() {
    let p = nondet();
    let rho = DensityOperator::basis_state(4, 0);
    assert_eq!(p.termination_prob(&ScheduleFragment::empty(), &rho).unwrap(), 0.0);

    let out = p.run_fragment(&label("12"), &rho).unwrap();
    assert!((out.matrix() - rho.matrix()).norm() < 1e-12);

    let f = label("11");
    let after = p.run_fragment(&f, &rho).unwrap();
    // T_11(|0><0|) keeps its full trace; the 4/9 on |2> halts at the next measurement
    assert!((after.trace() - 1.0).abs() < 1e-12);
    assert!((p.measurement().continue_probability(after.matrix()) - 5.0 / 9.0).abs() < 1e-12);
    assert!((p.termination_prob(&f, &rho).unwrap() - 4.0 / 9.0).abs() < 1e-12);

    for k in 0..10 {
        let f = label("12").repeat(k);
        assert!(p.termination_prob(&f, &rho).unwrap() < 1e-12);
    }
}

#[test]
fn transition_on_origin_is_the_walk() {
    let p = nondet();
    let rho = DensityOperator::basis_state(4, 0);
    let out = p.transition(0).unwrap().apply(&rho).unwrap();
    let w = w1() * ket(4, 0);
    assert!((out.matrix() - &w * w.adjoint()).norm() < 1e-12);
}

#[test]
fn average_structure() {
    let p = nondet();
    let avg = p.average();
    assert_eq!(avg.process_count(), 1);
    let kraus = avg.processes()[0].kraus();
    assert_eq!(kraus.len(), 2);
    let s = 2f64.sqrt();
    assert!((&kraus[0] - w1().unscale(s)).norm() < 1e-15);
    assert!((&kraus[1] - w2().unscale(s)).norm() < 1e-15);
    let single = build_walk(&WalkSpec::new(WalkKind::W1Only));
    assert_eq!(single.average(), single);
}

#[test]
fn image_under_average() {
    let p = nondet();
    let t = tol();
    let img = p
        .average()
        .transition(0)
        .unwrap()
        .image_subspace(&span(&[ket(4, 0)]), &t)
        .unwrap();
    let want = span(&[v(&[1.0, 1.0, 0.0, 1.0]), v(&[1.0, -1.0, 0.0, 1.0])]);
    assert!(projector_distance(&img, &want) < 1e-9);
}

#[test]
fn preimage_inside_pd1() {
    let p = nondet();
    let t = tol();
    let h0 = h_zero_subspace(&p, &t);
    let pre = p.transition(0).unwrap().preimage_subspace(&h0, &t).unwrap();
    let pd1 = h0.intersect(&pre, &t).unwrap();
    assert!(projector_distance(&pd1, &span(&[ket(4, 0), minus()])) < 1e-9);
}

#[test]
fn oracle_separates_members_from_outsiders() {
    let p = nondet();
    let t = tol();
    let r = diverging_states(&p, &t, 64).unwrap();
    let mut rng = common::rng(7);
    for q in r.pd.components() {
        for _ in 0..5 {
            let psi = common::vector_in(&mut rng, q);
            for depth in 1..=4 {
                assert!(qterm::divergence::pd_membership_oracle(&p, &psi, depth, &t).unwrap());
            }
        }
    }
    let depth = r.iterations + 1;
    let mut checked = 0;
    while checked < 20 {
        let psi = common::unit_vector(&mut rng, 4);
        let res = r.pd.components().iter().map(|q| q.residual(&psi)).fold(f64::INFINITY, f64::min);
        if res <= 0.1 {
            continue;
        }
        checked += 1;
        let min = qterm::search::min_termination(&p, &DensityOperator::pure(&psi).unwrap(), depth, 1 << 20)
            .unwrap()
            .value;
        assert!(min > 0.5 * res * res, "min {min} at residual {res}");
    }
}
