//! Incremental quickhull.

use rustc_hash::FxHashMap as HashMap;

use thiserror::Error;

use crate::geom::{Aabb, Vec3, HULL_EPS_REL};
use crate::mesh::SolidMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HullError {
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),
}

struct Face {
    v: [usize; 3],
    n: Vec3,
    d: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Face {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        let n = if len > 0.0 { n / len } else { n };
        Face {
            v,
            n,
            d: n.dot(&a),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn dist(&self, p: &Vec3) -> f64 {
        self.n.dot(p) - self.d
    }
}

/// Convex hull of a point set as a closed, outward-oriented triangle mesh.
///
/// Points within `1e-9 × bbox diagonal` of an existing facet are treated as
/// on the hull and never become vertices, so coplanar and duplicate points
/// are absorbed.
pub fn convex_hull(points: &[Vec3]) -> Result<SolidMesh, HullError> {
    let diag = Aabb::from_points(points).diagonal();
    if points.len() < 4 || !(diag > 0.0) {
        return Err(HullError::DegenerateHull(format!("{} points", points.len())));
    }
    let mut eps = HULL_EPS_REL * diag;
    // A tolerance too tight for the input's noise can leave a non-manifold
    // horizon; loosen it a little before giving up.
    let mut last = None;
    for _ in 0..3 {
        match quickhull(points, eps) {
            Ok(m) => return Ok(m),
            Err(e) => last = Some(e),
        }
        eps *= 100.0;
    }
    Err(last.expect("at least one attempt"))
}

pub fn convex_hull_of_mesh(mesh: &SolidMesh) -> Result<SolidMesh, HullError> {
    convex_hull(mesh.vertices())
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Result<[usize; 4], HullError> {
    let mut extremes = [0usize; 6];
    for (i, p) in points.iter().enumerate() {
        for axis in 0..3 {
            if p[axis] < points[extremes[2 * axis]][axis] {
                extremes[2 * axis] = i;
            }
            if p[axis] > points[extremes[2 * axis + 1]][axis] {
                extremes[2 * axis + 1] = i;
            }
        }
    }
    let (mut a, mut b, mut best) = (0, 0, -1.0);
    for &i in &extremes {
        for &j in &extremes {
            let d = (points[i] - points[j]).norm_squared();
            if d > best {
                (a, b, best) = (i, j, d);
            }
        }
    }
    if best.sqrt() <= eps {
        return Err(HullError::DegenerateHull("all points coincide".into()));
    }
    let dir = (points[b] - points[a]).normalize();
    let (mut c, mut best) = (0, -1.0);
    for (i, p) in points.iter().enumerate() {
        let w = p - points[a];
        let d = (w - dir * w.dot(&dir)).norm_squared();
        if d > best {
            (c, best) = (i, d);
        }
    }
    if best.sqrt() <= eps {
        return Err(HullError::DegenerateHull("points are collinear".into()));
    }
    let n = (points[b] - points[a]).cross(&(points[c] - points[a])).normalize();
    let (mut d, mut best) = (0, -1.0);
    for (i, p) in points.iter().enumerate() {
        let h = (p - points[a]).dot(&n).abs();
        if h > best {
            (d, best) = (i, h);
        }
    }
    if best <= eps {
        return Err(HullError::DegenerateHull("points are coplanar".into()));
    }
    Ok([a, b, c, d])
}

fn quickhull(points: &[Vec3], eps: f64) -> Result<SolidMesh, HullError> {
    let [a, b, c, d] = initial_simplex(points, eps)?;
    let mut faces: Vec<Face> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::default();
    let add_face = |faces: &mut Vec<Face>, edges: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let f = faces.len();
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), f);
        }
        faces.push(Face::new(points, v));
        f
    };
    let above = (points[d] - points[a]).dot(&(points[b] - points[a]).cross(&(points[c] - points[a]))) > 0.0;
    let tets = if above {
        [[a, c, b], [a, b, d], [b, c, d], [c, a, d]]
    } else {
        [[a, b, c], [a, d, b], [b, d, c], [c, d, a]]
    };
    for t in tets {
        add_face(&mut faces, &mut edges, t);
    }
    for i in 0..points.len() {
        if [a, b, c, d].contains(&i) {
            continue;
        }
        if let Some(f) = (0..4).find(|&f| faces[f].dist(&points[i]) > eps) {
            faces[f].outside.push(i);
        }
    }

    let mut pending: Vec<usize> = (0..4).filter(|&f| !faces[f].outside.is_empty()).collect();
    let mut visible_mark: Vec<u32> = vec![0; faces.len()];
    let mut stamp = 0u32;
    while let Some(f) = pending.pop() {
        if !faces[f].alive || faces[f].outside.is_empty() {
            continue;
        }
        let eye = *faces[f]
            .outside
            .iter()
            .max_by(|&&p, &&q| faces[f].dist(&points[p]).total_cmp(&faces[f].dist(&points[q])))
            .expect("non-empty outside set");
        let ep = points[eye];

        stamp += 1;
        visible_mark.resize(faces.len(), 0);
        let mut visible = vec![f];
        visible_mark[f] = stamp;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < visible.len() {
            let vf = visible[i];
            i += 1;
            let v = faces[vf].v;
            for k in 0..3 {
                let (p, q) = (v[k], v[(k + 1) % 3]);
                let nb = *edges.get(&(q, p)).ok_or_else(|| {
                    HullError::DegenerateHull("hull lost an edge twin".into())
                })?;
                if visible_mark[nb] == stamp {
                    continue;
                }
                if faces[nb].dist(&ep) > eps {
                    visible_mark[nb] = stamp;
                    visible.push(nb);
                } else {
                    horizon.push((p, q));
                }
            }
        }
        // Horizon edges bordering a face later found visible are interior.
        horizon.retain(|&(p, q)| visible_mark[edges[&(q, p)]] != stamp);

        let mut orphans = Vec::new();
        for &vf in &visible {
            faces[vf].alive = false;
            orphans.append(&mut faces[vf].outside);
            let v = faces[vf].v;
            for k in 0..3 {
                let e = (v[k], v[(k + 1) % 3]);
                if edges.get(&e) == Some(&vf) {
                    edges.remove(&e);
                }
            }
        }
        let first_new = faces.len();
        for &(p, q) in &horizon {
            if edges.contains_key(&(p, q)) || edges.contains_key(&(q, eye)) || edges.contains_key(&(eye, p)) {
                return Err(HullError::DegenerateHull("non-manifold horizon".into()));
            }
            add_face(&mut faces, &mut edges, [p, q, eye]);
        }
        for o in orphans {
            if o == eye {
                continue;
            }
            if let Some(nf) = (first_new..faces.len()).find(|&nf| faces[nf].dist(&points[o]) > eps) {
                faces[nf].outside.push(o);
            }
        }
        for nf in first_new..faces.len() {
            if !faces[nf].outside.is_empty() {
                pending.push(nf);
            }
        }
    }

    let mut remap: HashMap<usize, u32> = HashMap::default();
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for face in faces.iter().filter(|f| f.alive) {
        let t = face.v.map(|i| {
            *remap.entry(i).or_insert_with(|| {
                verts.push(points[i]);
                (verts.len() - 1) as u32
            })
        });
        tris.push(t);
    }
    let hull = SolidMesh::from_parts_unchecked(verts, tris);
    hull.check_closed()
        .map_err(|e| HullError::DegenerateHull(format!("hull is not closed: {e}")))?;
    if hull.signed_volume() <= 0.0 {
        return Err(HullError::DegenerateHull("hull has no volume".into()));
    }
    Ok(hull)
}

/// Facet planes of a convex mesh, for fast inside/outside tests.
#[derive(Clone, Debug)]
pub struct HalfSpaces {
    planes: Vec<(Vec3, f64)>,
}

impl HalfSpaces {
    pub fn new(hull: &SolidMesh) -> HalfSpaces {
        let planes = (0..hull.triangles().len())
            .filter_map(|t| {
                let [a, b, c] = hull.triangle(t);
                let n = (b - a).cross(&(c - a));
                let len = n.norm();
                (len > 0.0).then(|| {
                    let n = n / len;
                    (n, n.dot(&a))
                })
            })
            .collect();
        HalfSpaces { planes }
    }

    /// Largest signed facet distance: negative inside, positive outside.
    pub fn signed_depth(&self, p: &Vec3) -> f64 {
        self.planes
            .iter()
            .map(|(n, d)| n.dot(p) - d)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.planes.iter().all(|(n, d)| n.dot(p) - d <= tol)
    }
}
