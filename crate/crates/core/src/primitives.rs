//! Procedural closed meshes: boxes, spheres, solids of revolution, extruded
//! polygons and voxel unions. Used by the test suites and handy for demos.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutter::{triangulate_cap, CrossSection};
use crate::geom::{Transform, Vec3};
use crate::mesh::{validate_manifold, MeshError, SolidMesh};

/// Unit cube `[0,1]³` as a raw soup, outward counter-clockwise.
pub fn cube_soup() -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let v = (0..8)
        .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    let t = vec![
        [0, 2, 1],
        [1, 2, 3],
        [4, 5, 6],
        [5, 7, 6],
        [0, 1, 4],
        [1, 5, 4],
        [2, 6, 3],
        [3, 6, 7],
        [0, 4, 2],
        [2, 4, 6],
        [1, 3, 5],
        [3, 7, 5],
    ];
    (v, t)
}

pub fn unit_cube() -> SolidMesh {
    let (v, t) = cube_soup();
    validate_manifold(&v, &t).expect("cube is valid")
}

pub fn box_mesh(min: Vec3, max: Vec3) -> SolidMesh {
    let e = max - min;
    unit_cube().transformed(&Transform {
        scale: 1.0,
        rotation: nalgebra::Matrix3::from_diagonal(&e),
        translation: min,
    })
}

pub fn tetra_soup() -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let v = vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ];
    let t = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    (v, t)
}

pub fn regular_tetrahedron() -> SolidMesh {
    let (v, t) = tetra_soup();
    validate_manifold(&v, &t).expect("tetrahedron is valid")
}

/// Subdivided icosahedron projected to a sphere.
pub fn icosphere(radius: f64, subdivisions: u32) -> SolidMesh {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<Vec3> = [
        (-1.0, g, 0.0),
        (1.0, g, 0.0),
        (-1.0, -g, 0.0),
        (1.0, -g, 0.0),
        (0.0, -1.0, g),
        (0.0, 1.0, g),
        (0.0, -1.0, -g),
        (0.0, 1.0, -g),
        (g, 0.0, -1.0),
        (g, 0.0, 1.0),
        (-g, 0.0, -1.0),
        (-g, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut t: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(t.len() * 4);
        for tri in &t {
            let mut m = |a: u32, b: u32| -> u32 {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    v.push(((v[a as usize] + v[b as usize]) * 0.5).normalize());
                    (v.len() - 1) as u32
                })
            };
            let (a, b, c) = (tri[0], tri[1], tri[2]);
            let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        t = next;
    }
    let v: Vec<Vec3> = v.into_iter().map(|p| p * radius).collect();
    validate_manifold(&v, &t).expect("icosphere is valid")
}

/// Revolves a profile of `(radius, z)` points about the z axis.
///
/// An open profile must start and end on the axis (`radius == 0`); those
/// endpoints become poles. A closed profile (all radii positive) produces a
/// torus-like solid.
pub fn revolve(profile: &[(f64, f64)], segments: usize, closed: bool) -> Result<SolidMesh, MeshError> {
    let n = profile.len();
    let mut v = Vec::new();
    let mut t = Vec::new();
    let ring_of: Vec<Option<u32>> = profile
        .iter()
        .map(|&(r, z)| {
            if r <= 0.0 {
                v.push(Vec3::new(0.0, 0.0, z));
                None
            } else {
                let base = v.len() as u32;
                for j in 0..segments {
                    let a = TAU * j as f64 / segments as f64;
                    v.push(Vec3::new(r * a.cos(), r * a.sin(), z));
                }
                Some(base)
            }
        })
        .collect();
    // Pole index for profile points on the axis.
    let mut pole_of = vec![0u32; n];
    {
        let mut cursor = 0u32;
        for (i, r) in ring_of.iter().enumerate() {
            match r {
                None => {
                    pole_of[i] = cursor;
                    cursor += 1;
                }
                Some(_) => cursor += segments as u32,
            }
        }
    }
    let idx = |i: usize, j: usize| -> u32 {
        match ring_of[i] {
            Some(b) => b + (j % segments) as u32,
            None => pole_of[i],
        }
    };
    let spans = if closed { n } else { n - 1 };
    for i in 0..spans {
        let k = (i + 1) % n;
        for j in 0..segments {
            let (a, b, c, d) = (idx(i, j), idx(k, j), idx(k, j + 1), idx(i, j + 1));
            if ring_of[i].is_none() {
                t.push([a, b, c]);
            } else if ring_of[k].is_none() {
                t.push([a, b, d]);
            } else {
                t.push([a, b, c]);
                t.push([a, c, d]);
            }
        }
    }
    validate_manifold(&v, &t)
}

pub fn torus(major: f64, minor: f64, major_segments: usize, minor_segments: usize) -> SolidMesh {
    let profile: Vec<(f64, f64)> = (0..minor_segments)
        .map(|i| {
            let a = TAU * i as f64 / minor_segments as f64;
            (major + minor * a.cos(), minor * a.sin())
        })
        .collect();
    revolve(&profile, major_segments, true).expect("torus is valid")
}

/// Extrudes a polygon with holes (outer counter-clockwise, holes clockwise)
/// between `z0` and `z1`.
pub fn extrude(loops: &[Vec<[f64; 2]>], z0: f64, z1: f64) -> Result<SolidMesh, MeshError> {
    let section = CrossSection { loops: loops.to_vec() };
    let cap = triangulate_cap(&section).map_err(|_| MeshError::ZeroVolume)?;
    let flat: Vec<[f64; 2]> = loops.concat();
    let n = flat.len() as u32;
    let mut v: Vec<Vec3> = flat.iter().map(|p| Vec3::new(p[0], p[1], z0)).collect();
    v.extend(flat.iter().map(|p| Vec3::new(p[0], p[1], z1)));
    let mut t = Vec::new();
    for c in &cap {
        let c = c.map(|i| i as u32);
        t.push([c[0] + n, c[1] + n, c[2] + n]);
        t.push([c[0], c[2], c[1]]);
    }
    let mut base = 0u32;
    for lp in loops {
        let m = lp.len() as u32;
        for i in 0..m {
            let (p, q) = (base + i, base + (i + 1) % m);
            t.push([p, q, q + n]);
            t.push([p, q + n, p + n]);
        }
        base += m;
    }
    validate_manifold(&v, &t)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64, ccw: bool) -> Vec<[f64; 2]> {
    let mut r = vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
    if !ccw {
        r.reverse();
    }
    r
}

/// Unit cube minus the quadrant `[0.5,1]×[0.5,1]×[0,1]`.
pub fn l_prism() -> SolidMesh {
    let l = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]];
    extrude(&[l], 0.0, 1.0).expect("L-prism is valid")
}

/// Hollow square frame: outer 2×2, inner 1×1, thickness 0.5, centered on the origin.
pub fn frame() -> SolidMesh {
    extrude(
        &[rect(-1.0, -1.0, 1.0, 1.0, true), rect(-0.5, -0.5, 0.5, 0.5, false)],
        -0.25,
        0.25,
    )
    .expect("frame is valid")
}

/// 2×1×1 box with a 0.5-wide, 0.5-deep slot across the top of one end.
pub fn notched_box() -> SolidMesh {
    let profile = vec![
        [0.0, 0.0],
        [2.0, 0.0],
        [2.0, 1.0],
        [1.5, 1.0],
        [1.5, 0.5],
        [1.0, 0.5],
        [1.0, 1.0],
        [0.0, 1.0],
    ];
    // Profile in xz, extruded along y.
    let m = extrude(&[profile], 0.0, 1.0).expect("notched box is valid");
    let swap = nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0);
    m.transformed(&Transform {
        scale: 1.0,
        rotation: swap,
        translation: Vec3::zeros(),
    })
}

/// Two spheres joined by a thin neck, as a solid of revolution along z.
pub fn dumbbell() -> SolidMesh {
    let (r, c, neck): (f64, f64, f64) = (0.5, 0.9, 0.15);
    let top = (neck / r).acos();
    let steps = 12;
    let mut p = vec![(0.0, -c - r)];
    for i in 1..=steps {
        let a = -PI / 2.0 + (top + PI / 2.0) * i as f64 / steps as f64;
        p.push((r * a.cos(), -c + r * a.sin()));
    }
    let mirrored: Vec<(f64, f64)> = p.iter().rev().map(|&(x, z)| (x, -z)).collect();
    p.extend(mirrored);
    revolve(&p, 24, false).expect("dumbbell is valid")
}

/// Cup-shaped cap: a disk with a skirt, open toward −z, as a solid of revolution.
pub fn bottle_cap() -> SolidMesh {
    let profile = [(0.0, 0.5), (1.0, 0.5), (1.0, -0.5), (0.85, -0.5), (0.85, 0.3), (0.0, 0.3)];
    revolve(&profile, 32, false).expect("bottle cap is valid")
}

/// Solid sphere with a blind cylindrical hole drilled along +z.
pub fn drilled_sphere(radius: f64, hole_radius: f64, depth: f64, segments: usize) -> SolidMesh {
    let rings = segments / 2;
    let top = (radius * radius - hole_radius * hole_radius).sqrt();
    let a_max = (top / radius).asin();
    let mut p = vec![(0.0, -radius)];
    for i in 1..=rings {
        let a = -PI / 2.0 + (a_max + PI / 2.0) * i as f64 / rings as f64;
        p.push((radius * a.cos(), radius * a.sin()));
    }
    let bottom = top - depth;
    let wall = 8;
    for i in 1..=wall {
        p.push((hole_radius, top - (top - bottom) * i as f64 / wall as f64));
    }
    p.push((0.0, bottom));
    revolve(&p, segments, false).expect("drilled sphere is valid")
}

/// Spherical shell with a circular opening at the top.
pub fn shell_with_opening(outer: f64, inner: f64, opening: f64, segments: usize) -> SolidMesh {
    let rings = segments / 2;
    let zo = (outer * outer - opening * opening).sqrt();
    let zi = (inner * inner - opening * opening).sqrt();
    let ao = (zo / outer).asin();
    let ai = (zi / inner).asin();
    let mut p = vec![(0.0, -outer)];
    for i in 1..=rings {
        let a = -PI / 2.0 + (ao + PI / 2.0) * i as f64 / rings as f64;
        p.push((outer * a.cos(), outer * a.sin()));
    }
    for i in 0..rings {
        let a = ai - (ai + PI / 2.0) * i as f64 / rings as f64;
        p.push((inner * a.cos(), inner * a.sin()));
    }
    p.push((0.0, -inner));
    revolve(&p, segments, false).expect("shell is valid")
}

/// Bowl: outer hemisphere of radius `outer` minus a concentric inner one, open at z = 0.
pub fn hollow_hemisphere(outer: f64, inner: f64, segments: usize) -> SolidMesh {
    let rings = segments / 4;
    let mut p = vec![(0.0, -outer)];
    for i in 1..=rings {
        let a = -PI / 2.0 + PI / 2.0 * i as f64 / rings as f64;
        p.push((outer * a.cos(), outer * a.sin()));
    }
    for i in 0..rings {
        let a = -PI / 2.0 * i as f64 / rings as f64;
        p.push((inner * a.cos(), inner * a.sin()));
    }
    p.push((0.0, -inner));
    revolve(&p, segments, false).expect("bowl is valid")
}

/// 3×3×3 cube `[0,3]³` with an inner cubic void `[1,2]³`.
pub fn cube_with_void() -> SolidMesh {
    let outer = box_mesh(Vec3::zeros(), Vec3::repeat(3.0));
    let inner = box_mesh(Vec3::repeat(1.0), Vec3::repeat(2.0));
    let tris: Vec<[u32; 3]> = inner.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
    let void = SolidMesh::from_parts_unchecked(inner.vertices().to_vec(), tris);
    SolidMesh::concat([&outer, &void])
}

/// Boundary of a union of unit voxels. Fails when voxels touch only along
/// an edge, which leaves a non-manifold edge.
pub fn voxel_solid(cells: &HashSet<[i32; 3]>, cell_size: f64) -> Result<SolidMesh, MeshError> {
    let mut index: HashMap<[i32; 3], u32> = HashMap::new();
    let mut v = Vec::new();
    let mut t = Vec::new();
    let mut sorted: Vec<&[i32; 3]> = cells.iter().collect();
    sorted.sort();
    let mut vid = |p: [i32; 3], v: &mut Vec<Vec3>| -> u32 {
        *index.entry(p).or_insert_with(|| {
            v.push(Vec3::new(p[0] as f64, p[1] as f64, p[2] as f64) * cell_size);
            (v.len() - 1) as u32
        })
    };
    for c in sorted {
        for axis in 0..3 {
            for dir in [-1i32, 1] {
                let mut nb = *c;
                nb[axis] += dir;
                if cells.contains(&nb) {
                    continue;
                }
                let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
                let mut base = *c;
                if dir > 0 {
                    base[axis] += 1;
                }
                let corner = |du: i32, dw: i32| {
                    let mut p = base;
                    p[u] += du;
                    p[w] += dw;
                    p
                };
                let q = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)].map(|p| vid(p, &mut v));
                if dir > 0 {
                    t.push([q[0], q[1], q[2]]);
                    t.push([q[0], q[2], q[3]]);
                } else {
                    t.push([q[0], q[2], q[1]]);
                    t.push([q[0], q[3], q[2]]);
                }
            }
        }
    }
    validate_manifold(&v, &t)
}

/// Random constructive shape: a box with random box-shaped additions and
/// subtractions on a voxel grid. Retries until the union is a valid manifold.
pub fn random_csg(seed: u64) -> SolidMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 8;
    loop {
        let mut cells: HashSet<[i32; 3]> = HashSet::new();
        let fill = |cells: &mut HashSet<[i32; 3]>, lo: [i32; 3], hi: [i32; 3], add: bool| {
            for x in lo[0]..hi[0] {
                for y in lo[1]..hi[1] {
                    for z in lo[2]..hi[2] {
                        if add {
                            cells.insert([x, y, z]);
                        } else {
                            cells.remove(&[x, y, z]);
                        }
                    }
                }
            }
        };
        let random_box = |rng: &mut ChaCha8Rng, min_size: i32| {
            let lo: [i32; 3] = std::array::from_fn(|_| rng.random_range(0..n - min_size));
            let hi: [i32; 3] = std::array::from_fn(|i| rng.random_range(lo[i] + min_size..=n));
            (lo, hi)
        };
        let (lo, hi) = random_box(&mut rng, 4);
        fill(&mut cells, lo, hi, true);
        for _ in 0..rng.random_range(1..=3) {
            let (lo, hi) = random_box(&mut rng, 2);
            let add = rng.random_bool(0.5);
            fill(&mut cells, lo, hi, add);
        }
        if cells.len() < 8 {
            continue;
        }
        if let Ok(m) = voxel_solid(&cells, 1.0 / n as f64) {
            if crate::mesh::shells(&m).len() == 1 {
                return m;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_are_valid_with_expected_volumes() {
        assert!((l_prism().signed_volume() - 0.75).abs() < 1e-12);
        assert!((frame().signed_volume() - 1.5).abs() < 1e-12);
        assert!((notched_box().signed_volume() - 1.75).abs() < 1e-12);
        assert!((box_mesh(Vec3::zeros(), Vec3::new(4.0, 2.0, 1.0)).signed_volume() - 8.0).abs() < 1e-12);
        assert!((regular_tetrahedron().signed_volume() - 8.0 / 3.0).abs() < 1e-12);
        let t = torus(1.0, 0.3, 48, 24);
        let exact = 2.0 * PI * PI * 0.3 * 0.3;
        assert!((t.signed_volume() - exact).abs() / exact < 0.02);
        for m in [dumbbell(), bottle_cap(), drilled_sphere(1.0, 0.1, 0.8, 32)] {
            assert!(m.signed_volume() > 0.0);
            m.check_closed().unwrap();
        }
        let shell = shell_with_opening(1.0, 0.9, 0.2, 32);
        let exact = 4.0 / 3.0 * PI * (1.0 - 0.729);
        assert!((shell.signed_volume() - exact).abs() / exact < 0.05);
        let bowl = hollow_hemisphere(1.0, 0.9, 32);
        let exact = 2.0 / 3.0 * PI * (1.0 - 0.729);
        assert!((bowl.signed_volume() - exact).abs() / exact < 0.05);
    }

    #[test]
    fn random_csg_shapes_are_valid() {
        for seed in 0..10 {
            let m = random_csg(seed);
            validate_manifold(m.vertices(), m.triangles()).unwrap();
        }
    }

    #[test]
    fn diagonal_voxels_are_rejected() {
        let cells: HashSet<[i32; 3]> = [[0, 0, 0], [1, 1, 0]].into_iter().collect();
        assert!(voxel_solid(&cells, 1.0).is_err());
    }
}
