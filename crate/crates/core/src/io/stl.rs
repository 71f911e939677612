use std::collections::HashMap;

use super::Soup;
use crate::geom::{Aabb, Vec3};

/// Relative distance below which STL corners are welded into one vertex.
pub const WELD_EPS_REL: f64 = 1e-6;

/// Parses binary or ASCII STL. Binary is recognized by its exact size
/// (`84 + 50·n` bytes for `n` declared triangles).
pub fn parse_stl(bytes: &[u8]) -> Result<Soup, (String, String)> {
    if bytes.len() >= 84 {
        let n = u32::from_le_bytes(bytes[80..84].try_into().expect("4 bytes")) as usize;
        if 84 + 50 * n == bytes.len() {
            return Ok(weld(&parse_binary(bytes, n)));
        }
    }
    let text = std::str::from_utf8(bytes).map_err(|e| (format!("byte {}", e.valid_up_to()), "not a binary STL and not UTF-8 text".into()))?;
    if !text.trim_start().starts_with("solid") {
        return Err(("byte 0".into(), "missing `solid` header and size does not match binary STL".into()));
    }
    Ok(weld(&parse_ascii(text)?))
}

fn parse_binary(bytes: &[u8], n: usize) -> Vec<[Vec3; 3]> {
    let f = |at: usize| f32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as f64;
    (0..n)
        .map(|i| {
            let base = 84 + 50 * i + 12;
            [0, 1, 2].map(|k| {
                let o = base + 12 * k;
                Vec3::new(f(o), f(o + 4), f(o + 8))
            })
        })
        .collect()
}

fn parse_ascii(text: &str) -> Result<Vec<[Vec3; 3]>, (String, String)> {
    let mut tris = Vec::new();
    let mut corners: Vec<Vec3> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |m: String| (format!("line {}", i + 1), m);
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("vertex") => {
                let mut c = [0.0f64; 3];
                for slot in &mut c {
                    let t = tok.next().ok_or_else(|| err("vertex needs three coordinates".into()))?;
                    *slot = t.parse().map_err(|_| err(format!("bad coordinate {t:?}")))?;
                }
                corners.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("endfacet") => {
                if corners.len() != 3 {
                    return Err(err(format!("facet has {} vertices, expected 3", corners.len())));
                }
                tris.push([corners[0], corners[1], corners[2]]);
                corners.clear();
            }
            _ => {}
        }
    }
    Ok(tris)
}

/// Merges corners closer than `WELD_EPS_REL` times the bounding-box diagonal.
/// Corners are bucketed on a grid of that size and matched against the
/// neighbouring cells; the first vertex of a cluster is kept.
fn weld(tris: &[[Vec3; 3]]) -> Soup {
    let bbox = Aabb::from_points(tris.iter().flatten());
    let eps = WELD_EPS_REL * bbox.diagonal();
    let cell_of = |p: &Vec3| -> [i64; 3] {
        if eps > 0.0 {
            [0, 1, 2].map(|k| ((p[k] - bbox.min[k]) / eps).floor() as i64)
        } else {
            [0; 3]
        }
    };
    let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    let mut soup = Soup::default();
    for tri in tris {
        let mut t = [0u32; 3];
        for (k, p) in tri.iter().enumerate() {
            let c = cell_of(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                            if let Some(&v) = list.iter().find(|&&v| (soup.vertices[v as usize] - p).norm() <= eps) {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            t[k] = found.unwrap_or_else(|| {
                let v = soup.vertices.len() as u32;
                soup.vertices.push(*p);
                grid.entry(c).or_default().push(v);
                v
            });
        }
        soup.triangles.push(t);
    }
    soup
}

/// Binary STL bytes for a mesh (single precision, zero normals recomputed).
pub fn stl_binary(tris: &[[Vec3; 3]]) -> Vec<u8> {
    let mut out = vec![0u8; 80];
    out.extend_from_slice(&(tris.len() as u32).to_le_bytes());
    for t in tris {
        let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
        let n = if n.norm() > 0.0 { n.normalize() } else { n };
        for v in std::iter::once(&n).chain(t.iter()) {
            for k in 0..3 {
                out.extend_from_slice(&(v[k] as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&[0, 0]);
    }
    out
}

/// ASCII STL text for a mesh.
pub fn stl_ascii(tris: &[[Vec3; 3]]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("solid mesh\n");
    for t in tris {
        let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
        let n = if n.norm() > 0.0 { n.normalize() } else { n };
        let _ = writeln!(out, "facet normal {} {} {}\n outer loop", n.x, n.y, n.z);
        for v in t {
            let _ = writeln!(out, "  vertex {} {} {}", v.x, v.y, v.z);
        }
        let _ = writeln!(out, " endloop\nendfacet");
    }
    out.push_str("endsolid mesh\n");
    out
}
