//! Bounding-volume hierarchy over mesh triangles: nearest-distance queries
//! and ray-parity containment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{point_triangle_distance_squared, Aabb, Vec3, RAY_EPS};
use crate::mesh::SolidMesh;

const LEAF_SIZE: usize = 4;
const MAX_RAY_ATTEMPTS: usize = 8;

#[derive(Clone, Debug)]
struct Node {
    bbox: Aabb,
    // Leaf: triangles [start, start + count). Interior: children at `start` and `start + 1`.
    start: u32,
    count: u32,
}

/// Spatial index over the triangles of one mesh.
#[derive(Clone, Debug)]
pub struct MeshQuery {
    tris: Vec<[Vec3; 3]>,
    nodes: Vec<Node>,
}

impl MeshQuery {
    pub fn new(mesh: &SolidMesh) -> Self {
        Self::from_triangles((0..mesh.triangles().len()).map(|t| mesh.triangle(t)).collect())
    }

    pub fn from_triangles(tris: Vec<[Vec3; 3]>) -> Self {
        let mut q = MeshQuery {
            tris,
            nodes: Vec::new(),
        };
        if q.tris.is_empty() {
            return q;
        }
        let mut order: Vec<usize> = (0..q.tris.len()).collect();
        let centroids: Vec<Vec3> = q.tris.iter().map(|t| (t[0] + t[1] + t[2]) / 3.0).collect();
        q.nodes.push(Node {
            bbox: Aabb::empty(),
            start: 0,
            count: 0,
        });
        q.build(0, &mut order, 0, &centroids);
        q.tris = order.iter().map(|&i| q.tris[i]).collect();
        q
    }

    fn build(&mut self, node: usize, order: &mut [usize], offset: usize, centroids: &[Vec3]) {
        let mut bbox = Aabb::empty();
        let mut cbox = Aabb::empty();
        for &i in order.iter() {
            for p in &self.tris[i] {
                bbox.grow(p);
            }
            cbox.grow(&centroids[i]);
        }
        self.nodes[node].bbox = bbox;
        if order.len() <= LEAF_SIZE {
            self.nodes[node].start = offset as u32;
            self.nodes[node].count = order.len() as u32;
            return;
        }
        let axis = cbox.extent().imax();
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |a, b| centroids[*a][axis].total_cmp(&centroids[*b][axis]));
        let left = self.nodes.len();
        for _ in 0..2 {
            self.nodes.push(Node {
                bbox: Aabb::empty(),
                start: 0,
                count: 0,
            });
        }
        self.nodes[node].start = left as u32;
        self.nodes[node].count = 0;
        let (lo, hi) = order.split_at_mut(mid);
        self.build(left, lo, offset, centroids);
        self.build(left + 1, hi, offset + mid, centroids);
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    /// Exact squared distance to the nearest triangle.
    pub fn distance_squared(&self, p: &Vec3) -> f64 {
        self.distance_squared_until(p, f64::NEG_INFINITY)
    }

    pub fn distance(&self, p: &Vec3) -> f64 {
        self.distance_squared(p).sqrt()
    }

    /// Nearest squared distance, but the search may stop as soon as any
    /// triangle closer than `stop_at` (squared) is found. When the true
    /// minimum exceeds `stop_at` the returned value is exact.
    pub fn distance_squared_until(&self, p: &Vec3, stop_at: f64) -> f64 {
        let mut best = f64::INFINITY;
        if self.nodes.is_empty() {
            return best;
        }
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, self.nodes[0].bbox.distance_squared(p)));
        while let Some((n, d)) = stack.pop() {
            // Slack keeps pruning conservative against rounding in the box bound.
            if d > best * (1.0 + 1e-9) {
                continue;
            }
            let node = &self.nodes[n];
            if node.count > 0 {
                let s = node.start as usize;
                for t in &self.tris[s..s + node.count as usize] {
                    let dt = point_triangle_distance_squared(p, &t[0], &t[1], &t[2]);
                    if dt < best {
                        best = dt;
                    }
                }
                if best <= stop_at {
                    return best;
                }
            } else {
                let l = node.start as usize;
                let dl = self.nodes[l].bbox.distance_squared(p);
                let dr = self.nodes[l + 1].bbox.distance_squared(p);
                if dl < dr {
                    stack.push((l + 1, dr));
                    stack.push((l, dl));
                } else {
                    stack.push((l, dl));
                    stack.push((l + 1, dr));
                }
            }
        }
        best
    }

    /// Whether any triangle lies within `eps` of `p`.
    pub fn any_within(&self, p: &Vec3, eps: f64) -> bool {
        self.distance_squared_until(p, eps * eps) <= eps * eps
    }

    /// Ray-parity containment test. Rays that graze an edge or vertex are
    /// retried along a new pseudo-random direction; persistent grazing falls
    /// back to the generalized winding number.
    pub fn contains(&self, p: &Vec3) -> bool {
        if self.nodes.is_empty() || self.nodes[0].bbox.distance_squared(p) > 0.0 {
            return false;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba11);
        for _ in 0..MAX_RAY_ATTEMPTS {
            let dir = random_unit(&mut rng);
            if let Some(hits) = self.ray_crossings(p, &dir) {
                return hits % 2 == 1;
            }
        }
        winding_number(&self.tris, p) > 0.5
    }

    /// Counts crossings of the ray `p + t·dir`, `t > 0`. `None` when the ray
    /// grazes an edge, vertex or triangle plane within tolerance.
    fn ray_crossings(&self, p: &Vec3, dir: &Vec3) -> Option<usize> {
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut hits = 0;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !ray_hits_box(p, &inv, &node.bbox) {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for t in &self.tris[s..s + node.count as usize] {
                    match ray_triangle(p, dir, t) {
                        RayHit::Miss => {}
                        RayHit::Hit => hits += 1,
                        RayHit::Grazing => return None,
                    }
                }
            } else {
                stack.push(node.start as usize);
                stack.push(node.start as usize + 1);
            }
        }
        Some(hits)
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn ray_hits_box(o: &Vec3, inv: &Vec3, b: &Aabb) -> bool {
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for i in 0..3 {
        let t1 = (b.min[i] - o[i]) * inv[i];
        let t2 = (b.max[i] - o[i]) * inv[i];
        tmin = tmin.max(t1.min(t2));
        tmax = tmax.min(t1.max(t2));
    }
    // Small slack so rays through box faces are not lost to rounding.
    tmin <= tmax * (1.0 + 1e-12) + 1e-12
}

enum RayHit {
    Miss,
    Hit,
    Grazing,
}

fn ray_triangle(o: &Vec3, d: &Vec3, t: &[Vec3; 3]) -> RayHit {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let pvec = d.cross(&e2);
    let det = e1.dot(&pvec);
    let scale = e1.norm() * e2.norm();
    let tvec = o - t[0];
    if det.abs() <= 1e-12 * scale {
        // Ray parallel to the triangle plane: only a problem when it lies in it.
        let n = e1.cross(&e2);
        let nn = n.norm();
        if nn > 0.0 && (tvec.dot(&n) / nn).abs() <= RAY_EPS {
            return RayHit::Grazing;
        }
        return RayHit::Miss;
    }
    let inv = 1.0 / det;
    let u = tvec.dot(&pvec) * inv;
    let qvec = tvec.cross(&e1);
    let v = d.dot(&qvec) * inv;
    let tt = e2.dot(&qvec) * inv;
    let tol = 1e-9;
    if u < -tol || v < -tol || u + v > 1.0 + tol {
        return RayHit::Miss;
    }
    if tt < -RAY_EPS {
        return RayHit::Miss;
    }
    if tt <= RAY_EPS || u <= tol || v <= tol || u + v >= 1.0 - tol {
        return RayHit::Grazing;
    }
    RayHit::Hit
}

/// Generalized winding number of a closed triangle set around `p`
/// (≈1 inside, ≈0 outside), via signed solid angles.
pub fn winding_number(tris: &[[Vec3; 3]], p: &Vec3) -> f64 {
    let mut total = 0.0;
    for t in tris {
        let a = t[0] - p;
        let b = t[1] - p;
        let c = t[2] - p;
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * std::f64::consts::PI)
}

/// Whether `p` lies inside `mesh` (ray parity).
pub fn point_in_mesh(mesh: &SolidMesh, p: &Vec3) -> bool {
    MeshQuery::new(mesh).contains(p)
}
