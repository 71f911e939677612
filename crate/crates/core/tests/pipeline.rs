use convexcut::cutter::cut_eps;
use convexcut::geom::{Transform, Vec3};
use convexcut::mesh::SolidMesh;
use convexcut::pipeline::{decompose, hulls_overlap, DecomposeError, DecomposeParams, PlannerKind};
use convexcut::primitives::{box_mesh, frame, l_prism, notched_box};

fn invariants(mesh: &SolidMesh, params: &DecomposeParams) -> usize {
    let d = decompose(mesh, params).unwrap();
    let hulls = d.hulls();
    for p in &d.parts {
        assert!(p.report.fast <= params.epsilon + 1e-12, "fast {}", p.report.fast);
    }
    let parts: f64 = d.parts.iter().map(|p| p.component.signed_volume()).sum();
    assert!(((parts - mesh.signed_volume()) / mesh.signed_volume()).abs() < 1e-5);
    let tol = 2.0 * cut_eps(mesh);
    for i in 0..hulls.len() {
        for j in i + 1..hulls.len() {
            assert!(!hulls_overlap(&hulls[i], &hulls[j], tol), "hulls {i} and {j} overlap");
        }
    }
    hulls.len()
}

#[test]
fn l_prism_invariants() {
    assert_eq!(invariants(&l_prism(), &DecomposeParams::default()), 2);
}

#[test]
fn notched_box_invariants() {
    invariants(&notched_box(), &DecomposeParams::default());
}

#[test]
fn frame_invariants_and_determinism() {
    let params = DecomposeParams::with_seed(3);
    assert_eq!(invariants(&frame(), &params), 4);
    let a = decompose(&frame(), &params).unwrap().hulls();
    let b = decompose(&frame(), &params).unwrap().hulls();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.vertices(), y.vertices());
    }
}

#[test]
fn greedy_and_verbatim_halves_run() {
    let params = DecomposeParams { planner_kind: PlannerKind::Greedy, ..DecomposeParams::default() };
    invariants(&l_prism(), &params);
    let mut params = DecomposeParams::default();
    params.planner.separate_shells = false;
    invariants(&l_prism(), &params);
}

#[test]
fn rotated_box_with_pca_is_one_part() {
    let r = nalgebra::Rotation3::from_euler_angles(0.3, 0.7, -0.2);
    let t = Transform { scale: 1.0, rotation: *r.matrix(), translation: Vec3::new(5.0, -2.0, 1.0) };
    let mesh = box_mesh(Vec3::zeros(), Vec3::new(3.0, 1.0, 0.5)).transformed(&t);
    let mut params = DecomposeParams::default();
    params.planner.use_pca = true;
    let d = decompose(&mesh, &params).unwrap();
    assert_eq!(d.parts.len(), 1);
    assert!((d.parts[0].hull.signed_volume() - 1.5).abs() < 1e-9);
}

#[test]
fn cap_returns_partial_result() {
    let params = DecomposeParams { max_components: 2, ..DecomposeParams::default() };
    match decompose(&frame(), &params) {
        Err(DecomposeError::CapExceeded { cap, partial }) => {
            assert_eq!(cap, 2);
            assert!(partial.stats.capped);
            let v: f64 = partial.parts.iter().map(|p| p.component.signed_volume()).sum();
            assert!((v - frame().signed_volume()).abs() < 1e-6);
        }
        other => panic!("expected cap, got {:?}", other.map(|d| d.parts.len())),
    }
}
