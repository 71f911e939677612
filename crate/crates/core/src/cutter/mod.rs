//! Plane cutting of closed meshes into two closed halves with flat caps.
//!
//! The cut classifies triangles against the plane, splits the crossing ones,
//! then closes each half with a constrained Delaunay triangulation of its
//! boundary loops on the plane. Holes in the cross-section are removed by
//! even–odd fill.

mod cap;
mod section;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use thiserror::Error;

pub use cap::triangulate_cap;
pub use section::{build_cross_section, CrossSection};

use crate::geom::{Plane, Vec3, CUT_EPS_REL, VOL_EPS};
use crate::mesh::SolidMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error("plane leaves one side empty (volumes {negative:e} / {positive:e})")]
    EmptySide { negative: f64, positive: f64 },
    #[error("cross-section does not close: {0}")]
    OpenChain(String),
    #[error("cap triangulation failed: {0}")]
    TriangulationFailure(String),
}

/// Both halves of a cut. `negative` is the `normal · x < offset` side.
#[derive(Clone, Debug)]
pub struct CutResult {
    pub negative: SolidMesh,
    pub positive: SolidMesh,
    pub cap_triangle_count: usize,
}

/// Triangle indices grouped by side of a plane.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub negative: Vec<usize>,
    pub positive: Vec<usize>,
    pub crossing: Vec<usize>,
}

/// Snapping tolerance used when cutting `mesh`.
pub fn cut_eps(mesh: &SolidMesh) -> f64 {
    CUT_EPS_REL * mesh.bbox().diagonal()
}

fn vertex_signs(mesh: &SolidMesh, plane: &Plane, eps: f64) -> (Vec<f64>, Vec<i8>) {
    let n = plane.n();
    let dist: Vec<f64> = mesh.vertices().iter().map(|v| n.dot(v) - plane.offset).collect();
    let signs = dist
        .iter()
        .map(|&d| {
            if d.abs() <= eps {
                0
            } else if d < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    (dist, signs)
}

fn side_of(signs: [i8; 3], tri: &[Vec3; 3], normal: &Vec3) -> i8 {
    let has_neg = signs.contains(&-1);
    let has_pos = signs.contains(&1);
    match (has_neg, has_pos) {
        (true, true) => 0,
        (true, false) => -1,
        (false, true) => 1,
        // Lying in the plane: the face bounds material on the side it faces away from.
        (false, false) => {
            let fnormal = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
            if fnormal.dot(normal) >= 0.0 {
                -1
            } else {
                1
            }
        }
    }
}

/// Sorts triangles into strictly negative, strictly positive and crossing
/// sets. Vertices within the cut tolerance count as on the plane; a triangle
/// lying entirely in the plane goes to the side its normal points away from.
pub fn classify_triangles(mesh: &SolidMesh, plane: &Plane) -> Classification {
    let (_, signs) = vertex_signs(mesh, plane, cut_eps(mesh));
    let normal = plane.n();
    let mut out = Classification::default();
    for (i, t) in mesh.triangles().iter().enumerate() {
        let s = t.map(|v| signs[v as usize]);
        match side_of(s, &mesh.triangle(i), &normal) {
            -1 => out.negative.push(i),
            1 => out.positive.push(i),
            _ => out.crossing.push(i),
        }
    }
    out
}

/// Pieces of one crossing triangle.
#[derive(Clone, Debug)]
pub struct SplitTriangle {
    pub negative: Vec<[Vec3; 3]>,
    pub positive: Vec<[Vec3; 3]>,
    pub segment: [Vec3; 2],
}

/// Splits a triangle that has vertices strictly on both sides of `plane`.
/// Returns `None` when the triangle does not cross.
pub fn split_crossing(tri: &[Vec3; 3], plane: &Plane) -> Option<SplitTriangle> {
    let d: Vec<f64> = tri.iter().map(|p| plane.signed_distance(p)).collect();
    let eps = CUT_EPS_REL
        * tri
            .iter()
            .map(|p| (p - tri[0]).norm())
            .fold(0.0, f64::max);
    let signs: [i8; 3] = std::array::from_fn(|i| {
        if d[i].abs() <= eps {
            0
        } else if d[i] < 0.0 {
            -1
        } else {
            1
        }
    });
    if !(signs.contains(&-1) && signs.contains(&1)) {
        return None;
    }
    let mut verts: Vec<Vec3> = tri.to_vec();
    let mut split = |a: u32, b: u32| -> u32 {
        verts.push(edge_point(&tri[a as usize], &tri[b as usize], d[a as usize], d[b as usize]));
        (verts.len() - 1) as u32
    };
    let (neg, pos, seg) = split_indices([0, 1, 2], signs, &mut split);
    let get = |t: [u32; 3]| t.map(|i| verts[i as usize]);
    Some(SplitTriangle {
        negative: neg.into_iter().map(get).collect(),
        positive: pos.into_iter().map(get).collect(),
        segment: seg.map(|i| verts[i as usize]),
    })
}

fn edge_point(a: &Vec3, b: &Vec3, da: f64, db: f64) -> Vec3 {
    let t = da / (da - db);
    a + (b - a) * t
}

/// Index-level split of a crossing triangle. `edge_vertex(a, b)` returns the
/// intersection vertex on edge `ab`. Orientation of the input is preserved.
fn split_indices(
    t: [u32; 3],
    s: [i8; 3],
    edge_vertex: &mut impl FnMut(u32, u32) -> u32,
) -> (Vec<[u32; 3]>, Vec<[u32; 3]>, [u32; 2]) {
    // Rotate so that the vertex alone on its side (or the on-plane vertex) comes first.
    let lone = (0..3)
        .find(|&i| s[i] == 0)
        .or_else(|| (0..3).find(|&i| s[i] != s[(i + 1) % 3] && s[i] != s[(i + 2) % 3]))
        .expect("crossing triangle has a distinguished vertex");
    let (a, b, c) = (t[lone], t[(lone + 1) % 3], t[(lone + 2) % 3]);
    let (sa, sb, sc) = (s[lone], s[(lone + 1) % 3], s[(lone + 2) % 3]);
    let mut neg = Vec::with_capacity(2);
    let mut pos = Vec::with_capacity(2);
    let mut put = |side: i8, tri: [u32; 3]| {
        if side < 0 {
            neg.push(tri)
        } else {
            pos.push(tri)
        }
    };
    if sa == 0 {
        // b and c on opposite sides: one triangle each.
        let p = edge_vertex(b, c);
        put(sb, [a, b, p]);
        put(sc, [a, p, c]);
        (neg, pos, [a, p])
    } else {
        let p = edge_vertex(a, b);
        let q = edge_vertex(a, c);
        put(sa, [a, p, q]);
        put(sb, [p, b, c]);
        put(sb, [p, c, q]);
        (neg, pos, [p, q])
    }
}

/// Cuts a closed mesh into its two closed halves.
pub fn cut(mesh: &SolidMesh, plane: &Plane) -> Result<CutResult, CutError> {
    let eps = cut_eps(mesh);
    let (dist, signs) = vertex_signs(mesh, plane, eps);
    if !signs.contains(&-1) || !signs.contains(&1) {
        let vol = mesh.signed_volume();
        let (negative, positive) = if signs.contains(&1) { (0.0, vol) } else { (vol, 0.0) };
        return Err(CutError::EmptySide { negative, positive });
    }
    let normal = plane.n();
    let nv = mesh.vertices().len();
    let mut verts: Vec<Vec3> = mesh
        .vertices()
        .iter()
        .zip(&dist)
        .zip(&signs)
        .map(|((v, d), s)| if *s == 0 { v - normal * *d } else { *v })
        .collect();

    let mut edge_points: HashMap<(u32, u32), u32> = HashMap::default();
    let mut neg_tris: Vec<[u32; 3]> = Vec::with_capacity(mesh.triangles().len());
    let mut pos_tris: Vec<[u32; 3]> = Vec::with_capacity(mesh.triangles().len());
    for (i, t) in mesh.triangles().iter().enumerate() {
        let s = t.map(|v| signs[v as usize]);
        match side_of(s, &mesh.triangle(i), &normal) {
            -1 => neg_tris.push(*t),
            1 => pos_tris.push(*t),
            _ => {
                let mut ev = |a: u32, b: u32| -> u32 {
                    let key = (a.min(b), a.max(b));
                    *edge_points.entry(key).or_insert_with(|| {
                        let (i, j) = (key.0 as usize, key.1 as usize);
                        let p = edge_point(&mesh.vertices()[i], &mesh.vertices()[j], dist[i], dist[j]);
                        verts.push(p);
                        (verts.len() - 1) as u32
                    })
                };
                let (n, p, _) = split_indices(*t, s, &mut ev);
                neg_tris.extend(n);
                pos_tris.extend(p);
            }
        }
    }
    let on_plane = |v: u32| (v as usize) >= nv || signs[v as usize] == 0;

    let neg_caps = close_side(&verts, &neg_tris, plane, true, &on_plane)?;
    let pos_caps = close_side(&verts, &pos_tris, plane, false, &on_plane)?;
    let cap_triangle_count = neg_caps.len() + pos_caps.len();
    neg_tris.extend(neg_caps);
    pos_tris.extend(pos_caps);

    let negative = compact(&verts, &neg_tris);
    let positive = compact(&verts, &pos_tris);
    let (vn, vp) = (negative.signed_volume(), positive.signed_volume());
    if vn < VOL_EPS || vp < VOL_EPS {
        return Err(CutError::EmptySide {
            negative: vn,
            positive: vp,
        });
    }
    for side in [&negative, &positive] {
        side.check_closed()
            .map_err(|e| CutError::TriangulationFailure(format!("cap does not close the half: {e}")))?;
    }
    Ok(CutResult {
        negative,
        positive,
        cap_triangle_count,
    })
}

/// Cap triangles closing one half. The half's open boundary consists of
/// on-plane edges without a twin; the cap must contain each reversed.
fn close_side(
    verts: &[Vec3],
    tris: &[[u32; 3]],
    plane: &Plane,
    negative_side: bool,
    on_plane: &impl Fn(u32) -> bool,
) -> Result<Vec<[u32; 3]>, CutError> {
    let mut planar: HashSet<(u32, u32)> = HashSet::default();
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if on_plane(a) && on_plane(b) {
                planar.insert((a, b));
            }
        }
    }
    let mut boundary: Vec<(u32, u32)> = planar
        .iter()
        .filter(|(a, b)| !planar.contains(&(*b, *a)))
        .map(|&(a, b)| (b, a))
        .collect();
    if boundary.is_empty() {
        return Ok(Vec::new());
    }
    boundary.sort_unstable();
    let mut local: HashMap<u32, usize> = HashMap::default();
    let mut ids: Vec<u32> = Vec::new();
    let mut points: Vec<[f64; 2]> = Vec::new();
    let (u, v) = plane.basis();
    let mut idx = |g: u32| -> usize {
        *local.entry(g).or_insert_with(|| {
            ids.push(g);
            let p = verts[g as usize];
            points.push([p.dot(&u), p.dot(&v)]);
            ids.len() - 1
        })
    };
    let edges: Vec<[usize; 2]> = boundary.iter().map(|&(a, b)| [idx(a), idx(b)]).collect();
    let tris2d = cap::triangulate_constrained(&points, &edges)?;
    Ok(tris2d
        .into_iter()
        .map(|t| {
            let g = t.map(|i| ids[i]);
            // Counter-clockwise in (u, v) means normal +n: outward for the negative half.
            if negative_side {
                g
            } else {
                [g[0], g[2], g[1]]
            }
        })
        .collect())
}

fn compact(verts: &[Vec3], tris: &[[u32; 3]]) -> SolidMesh {
    let mut remap = vec![u32::MAX; verts.len()];
    let mut out_v = Vec::new();
    let out_t = tris
        .iter()
        .map(|t| {
            t.map(|v| {
                if remap[v as usize] == u32::MAX {
                    remap[v as usize] = out_v.len() as u32;
                    out_v.push(verts[v as usize]);
                }
                remap[v as usize]
            })
        })
        .collect();
    SolidMesh::from_parts_unchecked(out_v, out_t)
}

/// The cross-section loops of `mesh` on `plane`: split segments of crossing
/// triangles plus in-plane edges separating the two sides.
pub fn cross_section(mesh: &SolidMesh, plane: &Plane) -> Result<CrossSection, CutError> {
    let eps = cut_eps(mesh);
    let (_, signs) = vertex_signs(mesh, plane, eps);
    let normal = plane.n();
    let mut segments: Vec<[Vec3; 2]> = Vec::new();
    let mut edge_sides: HashMap<(u32, u32), Vec<i8>> = HashMap::default();
    for (i, t) in mesh.triangles().iter().enumerate() {
        let tri = mesh.triangle(i);
        let s = t.map(|v| signs[v as usize]);
        let side = side_of(s, &tri, &normal);
        if side == 0 {
            if let Some(split) = split_crossing(&tri, plane) {
                segments.push(split.segment);
            }
            continue;
        }
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if signs[a as usize] == 0 && signs[b as usize] == 0 {
                edge_sides.entry((a.min(b), a.max(b))).or_default().push(side);
            }
        }
    }
    let mut separating: Vec<_> = edge_sides
        .into_iter()
        .filter(|(_, sides)| sides.contains(&-1) && sides.contains(&1))
        .map(|(e, _)| e)
        .collect();
    separating.sort_unstable();
    for (a, b) in separating {
        let snap = |v: u32| {
            let p = mesh.vertices()[v as usize];
            p - normal * plane.signed_distance(&p)
        };
        segments.push([snap(a), snap(b)]);
    }
    build_cross_section(&segments, plane, eps.max(1e-12))
}
