use std::f64::consts::PI;

use semiflow::registry::{duhamel_probe, example5_replica};
use semiflow::semigroup::scenarios::{self, example4};
use semiflow::semigroup::{
    duhamel_extension, jordan_block_q, matrix_semigroup, semigroup_law_residual, GrowthClass,
    MatrixFlow, TriangularSpec,
};
use semiflow::space::{
    angle, deficiency, distance_to_subspace, unit_sphere_samples, AmbientSpace, Subspace, Vector,
};
use semiflow::Error;

fn r2(y: f64, z: f64) -> Vector {
    scenarios::r2(y, z).unwrap()
}

#[test]
fn sup_norm_axes_are_at_angle_one() {
    let a = Subspace::new(vec![r2(1.0, 0.0)]).unwrap();
    let b = Subspace::new(vec![r2(0.0, 1.0)]).unwrap();
    let (d, beta) = distance_to_subspace(&r2(1.0, 0.0), &b).unwrap();
    assert!((d - 1.0).abs() < 1e-12);
    assert!(beta[0].abs() < 1e-9);
    assert!((deficiency(&a, &b, 1).unwrap() - 1.0).abs() < 1e-12);
    assert!((angle(&a, &b, 720).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sphere_samples_of_the_plane() {
    let plane = Subspace::new(vec![r2(1.0, 0.0), r2(0.0, 1.0)]).unwrap();
    let s = unit_sphere_samples(&plane, 4).unwrap();
    assert_eq!(s.len(), 4);
    for v in &s {
        assert!((v.norm() - 1.0).abs() < 1e-10);
    }
    // θ = π/4 normalizes (1, 1)/√2 to (1, 1) in the sup norm
    assert!((s[1].samples()[0] - 1.0).abs() < 1e-12);
    assert!((s[1].samples()[1] - 1.0).abs() < 1e-12);

    let scaled = Subspace::new(vec![r2(2.0, 0.0)]).unwrap();
    let one = unit_sphere_samples(&scaled, 100).unwrap();
    assert_eq!(one.len(), 1);
    assert!((one[0].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn subspaces_of_different_spaces_are_rejected() {
    let a = Subspace::new(vec![r2(1.0, 0.0)]).unwrap();
    let other = AmbientSpace::seq_l2(2).unwrap();
    let b = Subspace::new(vec![Vector::from_samples(other, vec![1.0, 0.0]).unwrap()]).unwrap();
    assert!(matches!(angle(&a, &b, 8), Err(Error::SpaceMismatch)));
}

#[test]
fn multiplication_increments_follow_the_formula() {
    let sem = scenarios::multiplication_semigroup().unwrap();
    let f = Vector::from_fn(sem.space().clone(), |_| 1.0, None, vec![]).unwrap();
    let inc = |k: f64| {
        sem.apply(&f, k + 1.0)
            .unwrap()
            .sub(&sem.apply(&f, k).unwrap())
            .unwrap()
            .norm()
    };
    assert!((inc(1.0) - 0.25).abs() < 1e-4);
    assert!((inc(4.0) - 0.08192).abs() < 1e-4);
    assert_eq!(sem.apply(&f, 0.0).unwrap().samples(), f.samples());
}

#[test]
fn shift_double_edge_cases() {
    let sem = scenarios::shift_double_discrete(16).unwrap();
    let zero = Vector::zeros(sem.space().clone());
    assert_eq!(sem.apply(&zero, 3.0).unwrap().norm(), 0.0);
    let e3 = scenarios::unit_coordinate(sem.space(), 3).unwrap();
    assert_eq!(sem.apply(&e3, 3.0).unwrap().norm(), 0.0);
    assert!(matches!(sem.apply(&e3, 1.5), Err(Error::Domain(_))));
    assert!(matches!(sem.apply(&e3, -1.0), Err(Error::Domain(_))));
    assert!(scenarios::shift_double_discrete(4).is_err());

    // span{e1, e2} collapses after two steps
    let y = Subspace::new(vec![
        scenarios::unit_coordinate(sem.space(), 1).unwrap(),
        scenarios::unit_coordinate(sem.space(), 2).unwrap(),
    ])
    .unwrap();
    assert!(matches!(
        sem.evolve_subspace(&y, 2.0),
        Err(Error::DegenerateBasis(_))
    ));
}

#[test]
fn translation_keeps_constants_and_limits() {
    let sem = scenarios::translation_limit_semigroup().unwrap();
    let c = scenarios::constant_with_limit(sem.space(), 2.5).unwrap();
    let ct = sem.apply(&c, 7.3).unwrap();
    assert!(ct.sub(&c).unwrap().norm() < 1e-15);
    let f = scenarios::example3_vector(sem.space()).unwrap();
    assert_eq!(sem.apply(&f, 12.0).unwrap().limit_at_inf(), Some(1.0));
}

#[test]
fn jordan_block_examples() {
    assert_eq!(jordan_block_q(1.0, 0.0, 9.0), (1.0, 0.0));
    assert_eq!(jordan_block_q(0.0, 1.0, 5.0), (5.0, 1.0));
    let (y, z) = jordan_block_q(0.25, -0.75, 2.0);
    assert_eq!(jordan_block_q(y, z, 3.0), jordan_block_q(0.25, -0.75, 5.0));
    let sem = scenarios::remark2_jordan().unwrap();
    let v = sem.apply(&r2(1.0, -0.1), 10.0).unwrap();
    assert!(v.samples()[0].abs() < 1e-15);
    assert_eq!(v.samples()[1], -0.1);
}

#[test]
fn nilpotent_generator_is_the_jordan_flow() {
    let sem = matrix_semigroup(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
    let v = Vector::from_samples(sem.space().clone(), vec![0.4, -1.5]).unwrap();
    let out = sem.apply(&v, 3.0).unwrap();
    let (y, z) = jordan_block_q(0.4, -1.5, 3.0);
    assert!((out.samples()[0] - y).abs() < 1e-13);
    assert!((out.samples()[1] - z).abs() < 1e-13);
    assert_eq!(sem.growth_class(), GrowthClass::Linear);
    assert!(semigroup_law_residual(&sem, &v, 0.0, 0.0).unwrap() <= 1e-12);
}

#[test]
fn example4_zero_and_cosine_identity() {
    let sem = scenarios::example4_semigroup_on(40.0, 0.02).unwrap();
    let zero = Vector::zeros(sem.space().clone());
    for t in [0.0, 1.0, 17.5] {
        assert_eq!(sem.apply(&zero, t).unwrap().norm(), 0.0);
    }
    for t in [0.0, 3.0, 20.0, 41.5] {
        let w = example4::weighted_integral(0.0, t + 1.0) - example4::weighted_integral(0.0, t);
        // ∫ₜ^{t+1} sin s ds
        assert!((w - (t.cos() - (t + 1.0).cos())).abs() < 1e-12);
    }
}

#[test]
fn example5_reduces_to_translation_without_the_block() {
    let sem = scenarios::example5_semigroup_on(50.0, 0.02).unwrap();
    let bump = |x: f64| {
        if x < 10.0 {
            (PI * x / 10.0).sin().powi(2)
        } else {
            0.0
        }
    };
    let core = Vector::from_fn(sem.space().core().clone(), bump, None, vec![]).unwrap();
    let v = Vector::product(sem.space().clone(), core, vec![0.0]).unwrap();
    let out = sem.apply(&v, 4.0).unwrap();
    for (i, x) in sem.space().grid().unwrap().points().enumerate() {
        assert!((out.samples()[i] - bump(x + 4.0)).abs() < 1e-15);
    }
    assert_eq!(out.fin_part(), &[0.0]);
}

#[test]
fn duhamel_with_zero_block_is_plain_translation() {
    let rep = example5_replica(50.0, 0.02, 1.0 / 64.0).unwrap();
    let core = Vector::from_fn(rep.space().core().clone(), |x| (-x).exp(), None, vec![]).unwrap();
    let v = Vector::product(rep.space().clone(), core, vec![0.0]).unwrap();
    let out = rep.apply(&v, 2.0).unwrap();
    for (i, x) in rep.space().grid().unwrap().points().enumerate() {
        assert_eq!(out.samples()[i], (-(x + 2.0)).exp());
    }
}

#[test]
fn duhamel_replica_law_at_unit_times() {
    let rep = example5_replica(100.0, 0.02, 1.0 / 64.0).unwrap();
    let v = duhamel_probe(rep.space()).unwrap();
    assert!(semigroup_law_residual(&rep, &v, 1.0, 1.0).unwrap() <= 1e-5);
}

#[test]
fn duhamel_reports_unconverged_quadrature() {
    let alpha = scenarios::translation_c0(20.0, 0.02).unwrap();
    let core = alpha.space().clone();
    let g = Vector::from_fn(core, |x| (40.0 * x).sin(), None, vec![]).unwrap();
    let sem = duhamel_extension(
        TriangularSpec::with_matrix(
            "rough",
            alpha,
            MatrixFlow::identity(1).unwrap(),
            vec![g],
            GrowthClass::Linear,
        )
        .quad_step(0.25),
    )
    .unwrap();
    let v = duhamel_probe(sem.space()).unwrap();
    assert!(matches!(
        sem.apply(&v, 2.0),
        Err(Error::QuadratureFailure(_))
    ));
}

#[test]
fn duhamel_rejects_bad_specs() {
    let alpha = scenarios::translation_c0(20.0, 0.02).unwrap();
    let core = alpha.space().clone();
    let g = Vector::from_fn(core.clone(), |x| (-x).exp(), None, vec![]).unwrap();
    let wrong_count = TriangularSpec::with_matrix(
        "bad",
        alpha.clone(),
        MatrixFlow::jordan(),
        vec![g.clone()],
        GrowthClass::Linear,
    );
    assert!(matches!(
        duhamel_extension(wrong_count),
        Err(Error::InvalidArgument(_))
    ));
    let sampled_only = Vector::from_samples(core.clone(), g.samples().to_vec()).unwrap();
    let no_eval = TriangularSpec::with_matrix(
        "bad",
        alpha.clone(),
        MatrixFlow::identity(1).unwrap(),
        vec![sampled_only],
        GrowthClass::Linear,
    );
    assert!(matches!(
        duhamel_extension(no_eval),
        Err(Error::MalformedVector(_))
    ));
    let discrete = scenarios::shift_double_discrete(8).unwrap();
    let spec = TriangularSpec::with_matrix(
        "bad",
        discrete,
        MatrixFlow::identity(1).unwrap(),
        vec![g],
        GrowthClass::Linear,
    );
    assert!(duhamel_extension(spec).is_err());
}
