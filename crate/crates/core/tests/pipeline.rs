use cgpt3d::cgpt::{compute_cgpt, transform_full, CgptBlockMatrix, Provenance};
use cgpt3d::descriptors::{compute_descriptor, dict_build, dict_match, registration_point, DictSource};
use cgpt3d::harmonics::EulerAngles;
use cgpt3d::mesh::{apply_transform, load_mesh, make_primitive, save_mesh, Primitive, QuadratureRule, RigidScaleTransform};
use cgpt3d::msr::{estimate_cgpt, msr_from_cgpt, simulate_msr, SensorArray, DEFAULT_RCOND};
use nalgebra::Vector3;

const LAMBDA: f64 = 3.0;
const RULE: QuadratureRule = QuadratureRule::Centroid;

#[test]
fn mesh_file_to_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_primitive(&Primitive::Ellipsoid { a: 0.5, b: 0.3, c: 0.2 }, 2).unwrap();
    let t = RigidScaleTransform::new(1.3, EulerAngles::new(0.2, 1.0, -0.7), Vector3::new(0.4, -0.3, 0.1)).unwrap();
    let path = dir.path().join("moved.obj");
    save_mesh(&apply_transform(&mesh, &t), &path, None).unwrap();
    let loaded = load_mesh(&path, None, false).unwrap();

    let base = compute_cgpt(&mesh, LAMBDA, 3, RULE).unwrap();
    let moved = compute_cgpt(&loaded, LAMBDA, 3, RULE).unwrap();
    let predicted = transform_full(&base, &t).unwrap();
    assert!((moved.full() - predicted.full()).norm() < 1e-10 * predicted.full().norm());

    let u = registration_point(&moved).unwrap();
    assert!((u.point - t.apply(&registration_point(&base).unwrap().point)).norm() < 1e-9);
    let diff = compute_descriptor(&moved).unwrap().max_abs_diff(&compute_descriptor(&base).unwrap()).unwrap();
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn measurements_to_dictionary_match() {
    let shapes = [
        ("ellipsoid", Primitive::Ellipsoid { a: 0.5, b: 0.25, c: 0.25 }),
        ("torus", Primitive::Torus { major: 0.35, minor: 0.15 }),
    ];
    let meshes: Vec<_> = shapes.iter().map(|(_, p)| make_primitive(p, 2).unwrap()).collect();
    let dict = dict_build(
        shapes.iter().zip(&meshes).map(|((n, _), m)| (n.to_string(), DictSource::Mesh { mesh: m, path: None })).collect(),
        LAMBDA,
        3,
        RULE,
    )
    .unwrap();

    let t = RigidScaleTransform::new(0.8, EulerAngles::new(1.0, 0.5, 2.0), Vector3::new(0.3, 0.2, -0.4)).unwrap();
    let target = apply_transform(&meshes[1], &t);
    let sensors = SensorArray::fibonacci(256, 3.0).unwrap();
    let data = simulate_msr(&target, LAMBDA, &sensors, RULE).unwrap();
    let est: CgptBlockMatrix = estimate_cgpt(&data, 3, LAMBDA, DEFAULT_RCOND).unwrap();
    assert_eq!(est.provenance(), Provenance::Estimated);

    let ranked = dict_match(&compute_descriptor(&est).unwrap(), &dict).unwrap();
    assert_eq!(ranked[0].name, "torus", "{ranked:?}");

    let residual = |order| {
        let synth = msr_from_cgpt(&compute_cgpt(&target, LAMBDA, order, RULE).unwrap(), &sensors);
        (&synth.v - &data.v).norm() / data.v.norm()
    };
    let (r2, r4) = (residual(2), residual(4));
    assert!(r4 < 0.2 * r2 && r4 < 1e-2, "{r2} {r4}");
}
