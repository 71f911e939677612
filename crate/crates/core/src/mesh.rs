//! Closed triangle meshes: validation, measures and shell connectivity.

use rustc_hash::FxHashMap as HashMap;

use thiserror::Error;

use crate::geom::{triangle_area, Aabb, Transform, Vec3, AREA_EPS};
use crate::query::MeshQuery;

/// Normalized volume below which a mesh is considered flat.
const ZERO_VOLUME_EPS: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index}, but only {count} vertices exist")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        count: usize,
    },
    #[error("non-manifold edge ({}, {}) shared by {} triangles: {triangles:?}", edge[0], edge[1], triangles.len())]
    NonManifoldEdge { edge: [u32; 2], triangles: Vec<usize> },
    #[error("open boundary: edge ({}, {}) belongs only to triangle {triangle}", edge[0], edge[1])]
    OpenBoundary { edge: [u32; 2], triangle: usize },
    #[error("inconsistent orientation across edge ({}, {}) between triangles {} and {}", edge[0], edge[1], triangles[0], triangles[1])]
    InconsistentOrientation { edge: [u32; 2], triangles: [usize; 2] },
    #[error("degenerate triangle {triangle} (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("mesh encloses no volume")]
    ZeroVolume,
}

/// Indexed triangle mesh bounding a solid (possibly several shells).
///
/// Triangles are counter-clockwise seen from outside, every edge is shared by
/// exactly two oppositely oriented triangles and the enclosed volume is positive.
/// Only [`validate_manifold`] and crate-internal constructors that preserve
/// these invariants produce values of this type.
#[derive(Clone, Debug, PartialEq)]
pub struct SolidMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
}

impl SolidMesh {
    /// Wraps buffers that are closed and consistently oriented by construction.
    pub(crate) fn from_parts_unchecked(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Self {
        Self {
            vertices,
            triangles,
        }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    pub fn signed_volume(&self) -> f64 {
        signed_volume(self)
    }

    pub fn surface_area(&self) -> f64 {
        surface_area(self)
    }

    /// Applies a similarity transform. Reflections reverse the winding so the
    /// result stays outward oriented.
    pub fn transformed(&self, t: &Transform) -> SolidMesh {
        let vertices = self.vertices.iter().map(|p| t.apply(p)).collect();
        let mut triangles = self.triangles.clone();
        if t.rotation.determinant() < 0.0 {
            for tri in &mut triangles {
                tri.swap(1, 2);
            }
        }
        SolidMesh {
            vertices,
            triangles,
        }
    }

    /// Concatenates meshes without welding; touching shells stay separate.
    pub fn concat<'a>(meshes: impl IntoIterator<Item = &'a SolidMesh>) -> SolidMesh {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for m in meshes {
            let base = vertices.len() as u32;
            vertices.extend_from_slice(&m.vertices);
            triangles.extend(m.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
        }
        SolidMesh {
            vertices,
            triangles,
        }
    }

    /// Checks the closed-manifold edge structure only (no area or volume checks).
    pub fn check_closed(&self) -> Result<(), MeshError> {
        check_edges(&self.triangles)
    }

    /// Euler characteristic `V − E + F` over referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let f = self.triangles.len() as i64;
        let e = 3 * f / 2;
        let mut used = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &v in t {
                used[v as usize] = true;
            }
        }
        let v = used.iter().filter(|u| **u).count() as i64;
        v - e + f
    }
}

/// Validates a raw vertex/triangle soup as a closed, consistently oriented
/// 2-manifold solid. Unreferenced vertices are dropped and the winding is
/// flipped globally when the enclosed volume comes out negative.
pub fn validate_manifold(vertices: &[Vec3], triangles: &[[u32; 3]]) -> Result<SolidMesh, MeshError> {
    if triangles.is_empty() {
        return Err(MeshError::Empty);
    }
    for (i, t) in triangles.iter().enumerate() {
        for &v in t {
            if v as usize >= vertices.len() {
                return Err(MeshError::IndexOutOfRange {
                    triangle: i,
                    index: v,
                    count: vertices.len(),
                });
            }
        }
    }

    // Drop unreferenced vertices, preserving first-use order.
    let mut remap = vec![u32::MAX; vertices.len()];
    let mut verts = Vec::new();
    let mut tris = Vec::with_capacity(triangles.len());
    for t in triangles {
        let mut out = [0u32; 3];
        for (k, &v) in t.iter().enumerate() {
            if remap[v as usize] == u32::MAX {
                remap[v as usize] = verts.len() as u32;
                verts.push(vertices[v as usize]);
            }
            out[k] = remap[v as usize];
        }
        tris.push(out);
    }

    let bbox = Aabb::from_points(verts.iter());
    let max_extent = bbox.extent().max();
    if !(max_extent > 0.0) || !max_extent.is_finite() {
        return Err(MeshError::ZeroVolume);
    }
    let scale = 2.0 / max_extent;
    for (i, t) in tris.iter().enumerate() {
        let area = if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            0.0
        } else {
            triangle_area(&verts[t[0] as usize], &verts[t[1] as usize], &verts[t[2] as usize])
        };
        if area * scale * scale <= AREA_EPS {
            return Err(MeshError::DegenerateTriangle { triangle: i, area });
        }
    }

    check_edges(&tris)?;

    let mut mesh = SolidMesh {
        vertices: verts,
        triangles: tris,
    };
    let vol = mesh.signed_volume();
    if vol.abs() * scale.powi(3) < ZERO_VOLUME_EPS {
        return Err(MeshError::ZeroVolume);
    }
    if vol < 0.0 {
        for t in &mut mesh.triangles {
            t.swap(1, 2);
        }
    }
    Ok(mesh)
}

fn check_edges(triangles: &[[u32; 3]]) -> Result<(), MeshError> {
    // (undirected edge, triangle, stored low-to-high), grouped by sorting.
    let mut uses: Vec<((u32, u32), usize, bool)> = Vec::with_capacity(triangles.len() * 3);
    for (i, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            uses.push(((a.min(b), a.max(b)), i, a < b));
        }
    }
    uses.sort_unstable();
    let mut open = None;
    let mut flipped = None;
    for group in uses.chunk_by(|x, y| x.0 == y.0) {
        let key = group[0].0;
        match group.len() {
            2 => {
                if group[0].2 == group[1].2 && flipped.is_none() {
                    flipped = Some(MeshError::InconsistentOrientation {
                        edge: [key.0, key.1],
                        triangles: [group[0].1, group[1].1],
                    });
                }
            }
            1 => {
                if open.is_none() {
                    open = Some(MeshError::OpenBoundary {
                        edge: [key.0, key.1],
                        triangle: group[0].1,
                    });
                }
            }
            _ => {
                return Err(MeshError::NonManifoldEdge {
                    edge: [key.0, key.1],
                    triangles: group.iter().map(|u| u.1).collect(),
                })
            }
        }
    }
    match (open, flipped) {
        (Some(e), _) | (None, Some(e)) => Err(e),
        (None, None) => Ok(()),
    }
}

/// Divergence-theorem volume: `Σ v0 · (v1 × v2) / 6`.
pub fn signed_volume(mesh: &SolidMesh) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices[i as usize]);
            a.dot(&b.cross(&c))
        })
        .sum::<f64>()
        / 6.0
}

pub fn surface_area(mesh: &SolidMesh) -> f64 {
    (0..mesh.triangles.len())
        .map(|t| {
            let [a, b, c] = mesh.triangle(t);
            triangle_area(&a, &b, &c)
        })
        .sum()
}

/// Splits a mesh into its vertex-connected shells, in order of first triangle.
pub fn shells(mesh: &SolidMesh) -> Vec<SolidMesh> {
    let n = mesh.vertices.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for t in &mesh.triangles {
        let r0 = find(&mut parent, t[0]);
        for &v in &t[1..] {
            let r = find(&mut parent, v);
            if r != r0 {
                parent[r as usize] = r0;
            }
        }
    }
    let mut group_of_root: HashMap<u32, usize> = HashMap::default();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, t) in mesh.triangles.iter().enumerate() {
        let r = find(&mut parent, t[0]);
        let g = *group_of_root.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    if groups.len() == 1 {
        return vec![mesh.clone()];
    }
    groups
        .into_iter()
        .map(|tris| extract(mesh, &tris))
        .collect()
}

fn extract(mesh: &SolidMesh, tris: &[usize]) -> SolidMesh {
    let mut remap: HashMap<u32, u32> = HashMap::default();
    let mut vertices = Vec::new();
    let triangles = tris
        .iter()
        .map(|&i| {
            mesh.triangles[i].map(|v| {
                *remap.entry(v).or_insert_with(|| {
                    vertices.push(mesh.vertices[v as usize]);
                    (vertices.len() - 1) as u32
                })
            })
        })
        .collect();
    SolidMesh {
        vertices,
        triangles,
    }
}

/// Partitions a solid into independent pieces. Shells are found by vertex
/// connectivity; an inward-facing shell (a void) is attached to the smallest
/// outward shell that contains it, so every returned mesh has positive volume.
pub fn connected_components(mesh: &SolidMesh) -> Vec<SolidMesh> {
    let parts = shells(mesh);
    if parts.len() == 1 {
        return parts;
    }
    let volumes: Vec<f64> = parts.iter().map(signed_volume).collect();
    let outer: Vec<usize> = (0..parts.len()).filter(|&i| volumes[i] > 0.0).collect();
    let queries: Vec<MeshQuery> = outer.iter().map(|&i| MeshQuery::new(&parts[i])).collect();
    let mut members: Vec<Vec<usize>> = outer.iter().map(|&i| vec![i]).collect();
    let mut orphans = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if volumes[i] > 0.0 {
            continue;
        }
        let probe = part.vertices[0];
        let host = outer
            .iter()
            .enumerate()
            .filter(|(k, _)| queries[*k].contains(&probe))
            .min_by(|a, b| volumes[*a.1].total_cmp(&volumes[*b.1]))
            .map(|(k, _)| k);
        match host {
            Some(k) => members[k].push(i),
            None => orphans.push(i),
        }
    }
    let mut out: Vec<SolidMesh> = members
        .iter()
        .map(|m| SolidMesh::concat(m.iter().map(|&i| &parts[i])))
        .collect();
    // A void with no host is inconsistent input; keep it as its own flipped solid.
    for i in orphans {
        let mut p = parts[i].clone();
        for t in &mut p.triangles {
            t.swap(1, 2);
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives;

    #[test]
    fn unit_cube_is_valid_with_unit_volume() {
        let (v, t) = primitives::cube_soup();
        let m = validate_manifold(&v, &t).unwrap();
        assert!((m.signed_volume() - 1.0).abs() < 1e-12);
        assert!((m.surface_area() - 6.0).abs() < 1e-12);
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn scale_laws() {
        let m = primitives::unit_cube();
        let s = m.transformed(&Transform {
            scale: 2.0,
            ..Transform::identity()
        });
        assert!((s.signed_volume() - 8.0).abs() < 1e-12);
        assert!((s.surface_area() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn inverted_cube_is_flipped() {
        let (v, mut t) = primitives::cube_soup();
        for tri in &mut t {
            tri.swap(0, 1);
        }
        let m = validate_manifold(&v, &t).unwrap();
        assert!((m.signed_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_triangle_is_open_boundary() {
        let (v, mut t) = primitives::cube_soup();
        t.pop();
        assert!(matches!(validate_manifold(&v, &t), Err(MeshError::OpenBoundary { .. })));
    }

    #[test]
    fn tetrahedra_sharing_one_edge_are_non_manifold() {
        let (mut v, mut t) = primitives::tetra_soup();
        // Second tetrahedron reusing vertices 0 and 1 as a shared edge.
        let base = v.len() as u32;
        v.push(Vec3::new(0.5, -1.0, -1.0));
        v.push(Vec3::new(0.5, -1.0, 1.0));
        let (a, b, c, d) = (0u32, 1u32, base, base + 1);
        t.extend([[a, c, b], [a, b, d], [a, d, c], [b, c, d]]);
        match validate_manifold(&v, &t) {
            Err(MeshError::NonManifoldEdge { edge, triangles }) => {
                assert_eq!(edge, [0, 1]);
                assert_eq!(triangles.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_flipped_triangle_is_inconsistent() {
        let (v, mut t) = primitives::cube_soup();
        t[3].swap(0, 1);
        assert!(matches!(
            validate_manifold(&v, &t),
            Err(MeshError::InconsistentOrientation { .. })
        ));
    }

    #[test]
    fn degenerate_and_out_of_range() {
        let (mut v, mut t) = primitives::cube_soup();
        t.push([0, 0, 1]);
        assert!(matches!(validate_manifold(&v, &t), Err(MeshError::DegenerateTriangle { .. })));
        t.pop();
        t[0][0] = 99;
        assert!(matches!(validate_manifold(&v, &t), Err(MeshError::IndexOutOfRange { index: 99, .. })));
        v.clear();
        assert!(validate_manifold(&v, &[]).is_err());
    }

    #[test]
    fn unreferenced_vertices_are_dropped() {
        let (mut v, t) = primitives::cube_soup();
        v.push(Vec3::new(5.0, 5.0, 5.0));
        let m = validate_manifold(&v, &t).unwrap();
        assert_eq!(m.vertices().len(), 8);
    }

    #[test]
    fn icosphere_volume_against_tetra_fan() {
        let m = primitives::icosphere(1.0, 3);
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        // Independent summation: tetrahedra fanned from the centroid of the vertices.
        let c = m.vertices().iter().sum::<Vec3>() / m.vertices().len() as f64;
        let fan: f64 = (0..m.triangles().len())
            .map(|i| {
                let [a, b, d] = m.triangle(i);
                (a - c).dot(&(b - c).cross(&(d - c))) / 6.0
            })
            .sum();
        let v = m.signed_volume();
        assert!((v - fan).abs() < 1e-12);
        assert!(v > exact * 0.98 && v < exact);
        let area = m.surface_area();
        assert!(area < 4.0 * std::f64::consts::PI && area > 4.0 * std::f64::consts::PI * 0.98);
    }

    #[test]
    fn components_of_disjoint_cubes() {
        let a = primitives::unit_cube();
        let b = a.transformed(&Transform {
            translation: Vec3::new(3.0, 0.0, 0.0),
            ..Transform::identity()
        });
        let both = SolidMesh::concat([&a, &b]);
        let parts = connected_components(&both);
        assert_eq!(parts.len(), 2);
        let total: f64 = parts.iter().map(|p| p.signed_volume()).sum();
        assert!((total - 2.0).abs() < 1e-12);
        for p in &parts {
            validate_manifold(p.vertices(), p.triangles()).unwrap();
        }
        assert_eq!(connected_components(&a).len(), 1);
    }

    #[test]
    fn void_shell_is_paired_with_its_container() {
        let m = primitives::cube_with_void();
        assert_eq!(shells(&m).len(), 2);
        let parts = connected_components(&m);
        assert_eq!(parts.len(), 1);
        let expected = 27.0 - 1.0;
        assert!((parts[0].signed_volume() - expected).abs() < 1e-9);
        // Containment oracle: the void's vertices are inside the outer shell only.
        let sh = shells(&m);
        let outer = MeshQuery::new(&sh[0]);
        assert!(sh[1].vertices().iter().all(|p| outer.contains(p)));
    }
}
