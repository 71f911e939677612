use convexcut::primitives::{cube_soup, frame};
use convexcut_py::{run, Failure, Options};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn cube() -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let (v, t) = cube_soup();
    (
        v.iter().map(|p| vec![p.x, p.y, p.z]).collect(),
        t.iter().map(|t| t.iter().map(|&i| i as i64).collect()).collect(),
    )
}

#[test]
fn cube_is_one_hull() {
    let (v, t) = cube();
    let hulls = run(&v, &t, &Options::default()).ok().unwrap();
    assert_eq!(hulls.len(), 1);
    assert_eq!(hulls[0].0.len(), 8);
    assert_eq!(hulls[0].1.len(), 12);
}

#[test]
fn malformed_arrays_are_rejected() {
    let (v, mut t) = cube();
    t[0][1] = 99;
    assert!(matches!(run(&v, &t, &Options::default()), Err(Failure::Malformed(m)) if m.contains("vertex 99")));
    let (mut v, t) = cube();
    v[3].pop();
    assert!(matches!(run(&v, &t, &Options::default()), Err(Failure::Malformed(_))));
    let (v, t) = cube();
    let opts = Options { planner: "random".into(), ..Options::default() };
    assert!(matches!(run(&v, &t, &opts), Err(Failure::Malformed(_))));
}

#[test]
fn open_mesh_fails_validation() {
    let (v, mut t) = cube();
    t.pop();
    assert!(matches!(run(&v, &t, &Options::default()), Err(Failure::Invalid(m)) if m.contains("open boundary")));
}

#[test]
fn cap_carries_partial_hulls() {
    let f = frame();
    let v: Vec<Vec<f64>> = f.vertices().iter().map(|p| vec![p.x, p.y, p.z]).collect();
    let t: Vec<Vec<i64>> = f.triangles().iter().map(|t| t.iter().map(|&i| i as i64).collect()).collect();
    let opts = Options { max_components: 2, ..Options::default() };
    match run(&v, &t, &opts) {
        Err(Failure::Capped(_, partial)) => assert!(!partial.is_empty()),
        _ => panic!("expected cap"),
    }
}

#[test]
fn module_from_python() {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(convexcut_py::convexcut_module)(py);
        let module = module.bind(py);
        let version: String = module.getattr("__version__").unwrap().extract().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));

        let (v, t) = cube();
        let kwargs = PyDict::new(py);
        kwargs.set_item("threshold", 0.05).unwrap();
        let hulls = module.call_method("decompose", (v.clone(), t.clone()), Some(&kwargs)).unwrap();
        assert_eq!(hulls.len().unwrap(), 1);

        let err = module.call_method1("decompose", (v.clone(), t[..11].to_vec())).unwrap_err();
        let validation = module.getattr("ValidationError").unwrap();
        assert!(err.get_type(py).is_subclass(&validation).unwrap());
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));

        kwargs.set_item("threshold", -1.0).unwrap();
        let err = module.call_method("decompose", (v, t), Some(&kwargs)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        assert!(!err.get_type(py).is_subclass(&validation).unwrap());
    });
}
