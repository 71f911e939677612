//! Seeded surface and interior point sampling.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{triangle_area, Vec3, RAY_EPS};
use crate::mesh::SolidMesh;
use crate::query::MeshQuery;

/// Minimum number of surface samples per mesh, however small its area.
pub const MIN_SURFACE_SAMPLES: usize = 1000;

/// Default surface sampling density, in points per unit area.
pub const DEFAULT_DENSITY: f64 = 3000.0;

/// Interior candidates may be drawn up to this many times the requested count.
const INTERIOR_BUDGET: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Surface,
    Interior,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub points: Vec<Vec3>,
    pub provenance: Provenance,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("no interior point accepted out of {candidates} candidates")]
    EmptyInterior { candidates: usize },
}

pub fn surface_sample_count(area: f64, density: f64) -> usize {
    MIN_SURFACE_SAMPLES.max((area * density).round() as usize)
}

/// Area-weighted uniform samples on the surface.
pub fn sample_surface(mesh: &SolidMesh, density: f64, seed: u64) -> PointSet {
    let tris: Vec<[Vec3; 3]> = (0..mesh.triangles().len()).map(|t| mesh.triangle(t)).collect();
    let points = sample_triangles(&tris, density, seed);
    PointSet {
        points,
        provenance: Provenance::Surface,
        seed,
    }
}

pub(crate) fn sample_triangles(tris: &[[Vec3; 3]], density: f64, seed: u64) -> Vec<Vec3> {
    let mut cumulative = Vec::with_capacity(tris.len());
    let mut total = 0.0;
    for t in tris {
        total += triangle_area(&t[0], &t[1], &t[2]);
        cumulative.push(total);
    }
    if tris.is_empty() || !(total > 0.0) {
        return Vec::new();
    }
    let count = surface_sample_count(total, density);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.random::<f64>() * total;
            let t = cumulative.partition_point(|&c| c <= r).min(tris.len() - 1);
            let [a, b, c] = tris[t];
            let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
            if u + v > 1.0 {
                (u, v) = (1.0 - u, 1.0 - v);
            }
            a + (b - a) * u + (c - a) * v
        })
        .collect()
}

/// Statistics of one interior sampling run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorStats {
    /// Grid candidates drawn in the first pass.
    pub first_pass_candidates: usize,
    /// Candidates accepted in the first pass.
    pub first_pass_accepted: usize,
}

/// Points strictly inside the mesh, from a stratified jittered grid over the
/// bounding box. The grid is refined until `count` points are accepted or the
/// candidate budget runs out; a short run returns fewer than `count` points.
pub fn sample_interior(mesh: &SolidMesh, count: usize, seed: u64) -> Result<PointSet, SamplingError> {
    sample_interior_with_stats(mesh, count, seed).map(|(p, _)| p)
}

pub fn sample_interior_with_stats(
    mesh: &SolidMesh,
    count: usize,
    seed: u64,
) -> Result<(PointSet, InteriorStats), SamplingError> {
    let query = MeshQuery::new(mesh);
    let bbox = mesh.bbox();
    let margin = RAY_EPS * bbox.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = count.max(1);
    let mut drawn = 0;
    let mut stats = None;
    let mut best: Vec<Vec3> = Vec::new();
    loop {
        let dims = grid_dims(&bbox.extent(), cells);
        let step = bbox.extent().component_div(&Vec3::new(dims[0] as f64, dims[1] as f64, dims[2] as f64));
        let mut accepted = Vec::new();
        let mut candidates = 0;
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let jitter = Vec3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
                    let p = bbox.min + step.component_mul(&(Vec3::new(i as f64, j as f64, k as f64) + jitter));
                    candidates += 1;
                    if query.contains(&p) && !query.any_within(&p, margin) {
                        accepted.push(p);
                    }
                }
            }
        }
        drawn += candidates;
        stats.get_or_insert(InteriorStats {
            first_pass_candidates: candidates,
            first_pass_accepted: accepted.len(),
        });
        if accepted.len() >= count {
            // Uniform subset, kept in grid order so the stratification survives.
            let mut keep: Vec<usize> = sample_indices(&mut rng, accepted.len(), count).into_vec();
            keep.sort_unstable();
            let points = keep.into_iter().map(|i| accepted[i]).collect();
            return Ok((
                PointSet {
                    points,
                    provenance: Provenance::Interior,
                    seed,
                },
                stats.expect("set above"),
            ));
        }
        if accepted.len() > best.len() {
            best = accepted;
        }
        let rate = best.len() as f64 / candidates as f64;
        let next = if rate > 0.0 {
            ((count as f64 / rate) * 1.2).ceil() as usize
        } else {
            cells * 8
        };
        cells = next.max(cells * 2);
        if drawn + cells > INTERIOR_BUDGET * count.max(1000) {
            break;
        }
    }
    if best.is_empty() {
        return Err(SamplingError::EmptyInterior { candidates: drawn });
    }
    Ok((
        PointSet {
            points: best,
            provenance: Provenance::Interior,
            seed,
        },
        stats.expect("at least one pass"),
    ))
}

/// Grid resolution with roughly `cells` cubical cells over a box; axes
/// thinner than a cell get a single layer.
fn grid_dims(extent: &Vec3, cells: usize) -> [usize; 3] {
    let mut active: Vec<usize> = (0..3).filter(|&a| extent[a] > 0.0).collect();
    let mut dims = [1usize; 3];
    loop {
        if active.is_empty() {
            return dims;
        }
        let measure: f64 = active.iter().map(|&a| extent[a]).product();
        let h = (measure / cells as f64).powf(1.0 / active.len() as f64);
        if let Some(pos) = active.iter().position(|&a| extent[a] < h) {
            active.remove(pos);
            continue;
        }
        for &a in &active {
            dims[a] = ((extent[a] / h).round() as usize).max(1);
        }
        return dims;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{box_mesh, icosphere, unit_cube};

    #[test]
    fn cube_surface_count_and_on_surface() {
        let cube = unit_cube();
        let s = sample_surface(&cube, 3000.0, 1);
        assert_eq!(s.points.len(), 18_000);
        let q = MeshQuery::new(&cube);
        assert!(s.points.iter().all(|p| q.distance(p) < 1e-9));
        assert_eq!(s, sample_surface(&cube, 3000.0, 1));
        assert_ne!(s.points, sample_surface(&cube, 3000.0, 2).points);
    }

    #[test]
    fn cube_face_counts_are_multinomial() {
        let s = sample_surface(&unit_cube(), 3000.0, 9);
        let mut counts = [0usize; 6];
        for p in &s.points {
            let face = (0..3)
                .flat_map(|a| [(a, 0.0), (a, 1.0)])
                .position(|(a, v)| (p[a] - v).abs() < 1e-12)
                .unwrap();
            counts[face] += 1;
        }
        // Binomial(18000, 1/6): sigma = sqrt(18000 * 1/6 * 5/6).
        let sigma = (18000.0f64 / 6.0 * 5.0 / 6.0).sqrt();
        for c in counts {
            assert!((c as f64 - 3000.0).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn small_meshes_get_minimum_samples() {
        let tiny = box_mesh(Vec3::zeros(), Vec3::repeat(0.01));
        assert_eq!(sample_surface(&tiny, 3000.0, 0).points.len(), MIN_SURFACE_SAMPLES);
    }

    #[test]
    fn cube_interior() {
        let s = sample_interior(&unit_cube(), 1000, 3).unwrap();
        assert_eq!(s.points.len(), 1000);
        assert!(s.points.iter().all(|p| (0..3).all(|a| p[a] > 0.0 && p[a] < 1.0)));
        assert_eq!(s, sample_interior(&unit_cube(), 1000, 3).unwrap());
    }

    #[test]
    fn thin_slab_has_empty_interior() {
        let slab = box_mesh(Vec3::zeros(), Vec3::new(1.0, 1.0, 1e-9));
        assert!(matches!(sample_interior(&slab, 1000, 0), Err(SamplingError::EmptyInterior { .. })));
    }

    #[test]
    fn ball_acceptance_rate_matches_volume_ratio() {
        let ball = icosphere(1.0, 3);
        let (_, stats) = sample_interior_with_stats(&ball, 20_000, 5).unwrap();
        let rate = stats.first_pass_accepted as f64 / stats.first_pass_candidates as f64;
        // Bounding box of the mesh is [-1,1]^3; compare with the mesh's own volume ratio.
        let expected = ball.signed_volume() / ball.bbox().extent().product();
        assert!((rate - expected).abs() / expected < 0.05, "{rate} vs {expected}");
        let analytic = (4.0 / 3.0 * std::f64::consts::PI) / 8.0;
        assert!((rate - analytic).abs() / analytic < 0.05);
    }

    #[test]
    fn grid_dims_handle_flat_boxes() {
        assert_eq!(grid_dims(&Vec3::new(1.0, 1.0, 1.0), 1000), [10, 10, 10]);
        let d = grid_dims(&Vec3::new(1.0, 1.0, 1e-9), 1000);
        assert_eq!(d[2], 1);
        assert!((900..1100).contains(&(d[0] * d[1])));
    }
}
