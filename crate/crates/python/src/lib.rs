//! Python bindings: `convexcut.decompose(vertices, triangles, **options)`.

use convexcut::geom::Vec3;
use convexcut::pipeline::{decompose_soup, DecomposeError, DecomposeParams, Decomposition, PlannerKind};
use convexcut::planner::Exploration;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

pyo3::create_exception!(convexcut, ValidationError, PyValueError, "The input is not a closed 2-manifold.");
pyo3::create_exception!(
    convexcut,
    CapExceeded,
    PyRuntimeError,
    "The component cap was reached. `args[1]` holds the partial list of hulls."
);

/// A hull as `(vertices, triangles)` in the input's frame.
pub type Hull = (Vec<[f64; 3]>, Vec<[u32; 3]>);

/// Keyword options accepted by `decompose`, mirroring the CLI flags.
#[derive(Clone, Debug)]
pub struct Options {
    pub threshold: f64,
    pub m: usize,
    pub iterations: usize,
    pub depth: usize,
    pub k: f64,
    pub seed: u64,
    pub exploration: Option<f64>,
    pub pca: bool,
    pub merge: bool,
    pub planner: String,
    pub max_components: usize,
}

impl Default for Options {
    fn default() -> Self {
        let d = DecomposeParams::default();
        Options {
            threshold: d.epsilon,
            m: d.planner.m,
            iterations: d.planner.t,
            depth: d.planner.d,
            k: d.concavity.k,
            seed: 0,
            exploration: None,
            pca: false,
            merge: true,
            planner: "mcts".into(),
            max_components: d.max_components,
        }
    }
}

impl Options {
    pub fn params(&self) -> Result<DecomposeParams, String> {
        let mut p = DecomposeParams::with_seed(self.seed);
        p.epsilon = self.threshold;
        p.concavity.k = self.k;
        p.planner.m = self.m;
        p.planner.t = self.iterations;
        p.planner.d = self.depth;
        p.planner.use_pca = self.pca;
        if let Some(c) = self.exploration {
            p.planner.exploration = Exploration::Fixed(c);
        }
        p.planner_kind = match self.planner.as_str() {
            "mcts" => PlannerKind::Mcts,
            "greedy" => PlannerKind::Greedy,
            other => return Err(format!("planner must be 'mcts' or 'greedy', got {other:?}")),
        };
        p.merge = self.merge;
        p.max_components = self.max_components;
        p.validate()?;
        Ok(p)
    }
}

pub enum Failure {
    Malformed(String),
    Invalid(String),
    Capped(String, Vec<Hull>),
}

/// Checks array shapes and indices, then decomposes.
pub fn run(vertices: &[Vec<f64>], triangles: &[Vec<i64>], options: &Options) -> Result<Vec<Hull>, Failure> {
    let params = options.params().map_err(Failure::Malformed)?;
    let mut verts = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        match v.as_slice() {
            [x, y, z] => verts.push(Vec3::new(*x, *y, *z)),
            _ => return Err(Failure::Malformed(format!("vertex {i} has {} coordinates, expected 3", v.len()))),
        }
    }
    let mut tris = Vec::with_capacity(triangles.len());
    for (i, t) in triangles.iter().enumerate() {
        if t.len() != 3 {
            return Err(Failure::Malformed(format!("triangle {i} has {} indices, expected 3", t.len())));
        }
        let mut tri = [0u32; 3];
        for (slot, &idx) in tri.iter_mut().zip(t) {
            if idx < 0 || idx as usize >= verts.len() {
                return Err(Failure::Malformed(format!("triangle {i} references vertex {idx} of {}", verts.len())));
            }
            *slot = idx as u32;
        }
        tris.push(tri);
    }
    match decompose_soup(&verts, &tris, &params) {
        Ok(d) => Ok(hulls(&d)),
        Err(DecomposeError::InvalidInput(m)) => Err(Failure::Malformed(m)),
        Err(e @ DecomposeError::InvalidMesh(_)) => Err(Failure::Invalid(e.to_string())),
        Err(e @ DecomposeError::CapExceeded { .. }) => {
            let msg = e.to_string();
            let DecomposeError::CapExceeded { partial, .. } = e else { unreachable!() };
            Err(Failure::Capped(msg, hulls(&partial)))
        }
    }
}

fn hulls(d: &Decomposition) -> Vec<Hull> {
    d.parts
        .iter()
        .map(|p| (p.hull.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(), p.hull.triangles().to_vec()))
        .collect()
}

/// Decomposes a closed triangle mesh into convex hulls.
///
/// `vertices` is an (n, 3) float array, `triangles` an (m, 3) integer array.
/// Returns a list of `(vertices, triangles)` hulls.
#[pyfunction]
#[pyo3(signature = (
    vertices, triangles, *, threshold = 0.05, m = 20, iterations = 500, depth = 4, k = 0.3,
    seed = 0, exploration = None, pca = false, merge = true, planner = "mcts", max_components = 512
))]
#[allow(clippy::too_many_arguments)]
fn decompose(
    py: Python<'_>,
    vertices: Vec<Vec<f64>>,
    triangles: Vec<Vec<i64>>,
    threshold: f64,
    m: usize,
    iterations: usize,
    depth: usize,
    k: f64,
    seed: u64,
    exploration: Option<f64>,
    pca: bool,
    merge: bool,
    planner: &str,
    max_components: usize,
) -> PyResult<Vec<Hull>> {
    let options = Options {
        threshold,
        m,
        iterations,
        depth,
        k,
        seed,
        exploration,
        pca,
        merge,
        planner: planner.to_string(),
        max_components,
    };
    match py.detach(|| run(&vertices, &triangles, &options)) {
        Ok(h) => Ok(h),
        Err(Failure::Malformed(m)) => Err(PyValueError::new_err(m)),
        Err(Failure::Invalid(m)) => Err(ValidationError::new_err(m)),
        Err(Failure::Capped(m, partial)) => Err(CapExceeded::new_err((m, partial))),
    }
}

#[pymodule]
#[pyo3(name = "convexcut")]
pub fn convexcut_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    Ok(())
}
