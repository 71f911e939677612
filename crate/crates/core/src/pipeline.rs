//! Recursive decomposition: normalization, the cut queue, merging of
//! adjacent parts and the decomposition score.

use std::collections::VecDeque;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concavity::{
    derive_seed, directed_hausdorff_query, hb, hb_pieces, hi_oracle, rv_from_volumes, ConcavityParams,
    ConcavityReport,
};
use crate::cutter::cut_eps;
use crate::geom::{Aabb, Plane, Transform, Vec3};
use crate::hull::{convex_hull, convex_hull_of_mesh, HalfSpaces, HullError};
use crate::mesh::{connected_components, validate_manifold, MeshError, SolidMesh};
use crate::pca::pca_axes;
use crate::planner::{greedy_plan, mcts_plan_with_concavity, refine_plane, split_pieces, Piece, PlannerParams};
use crate::query::MeshQuery;
use crate::sampling::sample_surface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Mcts,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposeParams {
    /// Concavity threshold in normalized units.
    pub epsilon: f64,
    pub concavity: ConcavityParams,
    pub planner: PlannerParams,
    pub planner_kind: PlannerKind,
    pub merge: bool,
    pub max_components: usize,
    /// Also run the interior oracle on every final part.
    pub exact_concavity: bool,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        DecomposeParams {
            epsilon: 0.05,
            concavity: ConcavityParams::default(),
            planner: PlannerParams::default(),
            planner_kind: PlannerKind::Mcts,
            merge: true,
            max_components: 512,
            exact_concavity: false,
        }
    }
}

impl DecomposeParams {
    /// Defaults with every seed set to `seed`.
    pub fn with_seed(seed: u64) -> Self {
        let mut p = Self::default();
        p.concavity.seed = seed;
        p.planner.seed = seed;
        p
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.epsilon > 0.0) {
            return Err(format!("threshold must be positive, got {}", self.epsilon));
        }
        if self.max_components < 1 {
            return Err("max_components must be at least 1".into());
        }
        self.concavity.validate()?;
        self.planner.validate()
    }
}

/// One final component, its hull and concavity. Merged parts consist of
/// several closed pieces that touch along former cut faces; `component`
/// concatenates them without welding.
#[derive(Clone, Debug)]
pub struct Part {
    pub component: SolidMesh,
    pub hull: SolidMesh,
    pub report: ConcavityReport,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub components: usize,
    pub cuts: usize,
    pub merges: usize,
    /// Components accepted above the threshold because no plane cut them.
    pub uncuttable: usize,
    /// The component cap stopped the recursion early.
    pub capped: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Parts in the input's coordinate frame, ordered by creation.
    pub parts: Vec<Part>,
    /// Normalization applied before decomposing (input frame to normalized).
    pub transform: Transform,
    pub stats: Stats,
}

impl Decomposition {
    pub fn hulls(&self) -> Vec<SolidMesh> {
        self.parts.iter().map(|p| p.hull.clone()).collect()
    }

    /// [`score_decomposition`] evaluated in the normalized frame, where the
    /// threshold is expressed.
    pub fn score(&self, original: &SolidMesh, params: &ConcavityParams) -> f64 {
        let hulls: Vec<SolidMesh> = self.parts.iter().map(|p| p.hull.transformed(&self.transform)).collect();
        score_decomposition(&original.transformed(&self.transform), &hulls, params)
    }
}

#[derive(Debug, Error, Clone)]
pub enum DecomposeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(#[from] MeshError),
    #[error("component cap of {cap} reached; returning a partial decomposition")]
    CapExceeded { cap: usize, partial: Box<Decomposition> },
}

/// Validates a raw triangle soup, then decomposes it.
pub fn decompose_soup(
    vertices: &[Vec3],
    triangles: &[[u32; 3]],
    params: &DecomposeParams,
) -> Result<Decomposition, DecomposeError> {
    let mesh = validate_manifold(vertices, triangles)?;
    decompose(&mesh, params)
}

/// Uniform scale to a largest extent of 2 around the origin, optionally
/// preceded by a rotation onto the principal axes.
pub fn normalization(mesh: &SolidMesh, use_pca: bool, seed: u64) -> Transform {
    let center = Transform {
        translation: -mesh.bbox().center(),
        ..Transform::identity()
    };
    let mut t = center;
    if use_pca {
        let axes = pca_axes(&mesh.transformed(&center), crate::sampling::DEFAULT_DENSITY, seed);
        let to_axes = Transform {
            rotation: axes.rotation.transpose(),
            ..Transform::identity()
        };
        t = to_axes.compose(&t);
        let b = mesh.transformed(&t).bbox();
        t = Transform {
            translation: -b.center(),
            ..Transform::identity()
        }
        .compose(&t);
    }
    let extent = mesh.transformed(&t).bbox().extent().max();
    Transform {
        scale: 2.0 / extent,
        ..Transform::identity()
    }
    .compose(&t)
}

/// Concavity parameters for the component created `index`-th.
fn component_params(params: &ConcavityParams, index: usize) -> ConcavityParams {
    ConcavityParams {
        seed: derive_seed(params.seed, 0x1000 + index as u64),
        ..*params
    }
}

/// Hull and fast concavity; a flat component has a zero report and a hull
/// that is the component itself.
fn evaluate(component: &SolidMesh, params: &ConcavityParams) -> (SolidMesh, ConcavityReport) {
    match convex_hull_of_mesh(component) {
        Ok(h) => {
            let rv = rv_from_volumes(h.signed_volume(), component.signed_volume());
            let report = ConcavityReport::new(hb(component, &h, params), rv, params.k);
            (h, report)
        }
        Err(HullError::DegenerateHull(_)) => (component.clone(), ConcavityReport::default()),
    }
}

struct Pending {
    id: usize,
    mesh: SolidMesh,
}

struct Working {
    id: usize,
    pieces: Vec<SolidMesh>,
    hull: SolidMesh,
    report: ConcavityReport,
}

/// Cuts until every component's fast concavity is below `params.epsilon`,
/// then merges adjacent parts whose union still meets the threshold.
pub fn decompose(mesh: &SolidMesh, params: &DecomposeParams) -> Result<Decomposition, DecomposeError> {
    params.validate().map_err(DecomposeError::InvalidInput)?;
    let start = Instant::now();
    let transform = normalization(mesh, params.planner.use_pca, params.concavity.seed);
    let normalized = mesh.transformed(&transform);
    let contact_tol = 2.0 * cut_eps(&normalized);

    let mut next_id = 0;
    let mut queue: VecDeque<Pending> = VecDeque::new();
    let initial = if params.planner.separate_shells {
        connected_components(&normalized)
    } else {
        vec![normalized.clone()]
    };
    for m in initial {
        queue.push_back(Pending { id: next_id, mesh: m });
        next_id += 1;
    }

    let mut stats = Stats::default();
    let mut done: Vec<Working> = Vec::new();
    while let Some(Pending { id, mesh: c }) = queue.pop_front() {
        let cp = component_params(&params.concavity, id);
        let (hull, report) = evaluate(&c, &cp);
        let accept = |done: &mut Vec<Working>, c: SolidMesh, hull, report| {
            done.push(Working {
                id,
                pieces: vec![c],
                hull,
                report,
            })
        };
        if report.fast < params.epsilon {
            accept(&mut done, c, hull, report);
            continue;
        }
        let planner = PlannerParams {
            seed: derive_seed(params.planner.seed, 0x2000 + id as u64),
            ..params.planner
        };
        let Some(children) = cut_component(&c, &planner, params.planner_kind, report.fast) else {
            stats.uncuttable += 1;
            accept(&mut done, c, hull, report);
            continue;
        };
        if done.len() + queue.len() + children.len() > params.max_components {
            stats.capped = true;
            accept(&mut done, c, hull, report);
            continue;
        }
        stats.cuts += 1;
        for child in children {
            queue.push_back(Pending {
                id: next_id,
                mesh: child,
            });
            next_id += 1;
        }
    }
    done.sort_by_key(|w| w.id);

    if params.merge {
        stats.merges = merge_working(&mut done, params.epsilon, &params.concavity, contact_tol);
    }

    let back = transform.inverse();
    let parts = done
        .into_iter()
        .map(|w| {
            let mut report = w.report;
            if params.exact_concavity {
                let component = SolidMesh::concat(&w.pieces);
                let cp = component_params(&params.concavity, w.id);
                if let Ok(hi) = hi_oracle(&component, &w.hull, &cp) {
                    report = report.with_oracle(hi);
                }
            }
            Part {
                component: SolidMesh::concat(&w.pieces).transformed(&back),
                hull: w.hull.transformed(&back),
                report,
            }
        })
        .collect::<Vec<_>>();
    stats.components = parts.len();
    stats.wall_time_s = start.elapsed().as_secs_f64();
    let result = Decomposition {
        parts,
        transform,
        stats,
    };
    if result.stats.capped {
        return Err(DecomposeError::CapExceeded {
            cap: params.max_components,
            partial: Box::new(result),
        });
    }
    Ok(result)
}

/// Plans a plane for `c` and cuts it. A refined plane that fails to cut is
/// retried slightly shifted, then replaced by the unrefined one.
fn cut_component(c: &SolidMesh, planner: &PlannerParams, kind: PlannerKind, concavity: f64) -> Option<Vec<SolidMesh>> {
    let (plane, refined) = match kind {
        PlannerKind::Mcts => {
            let (plane, path) = mcts_plan_with_concavity(c, planner, concavity).ok()?;
            (plane, refine_plane(c, &path, planner))
        }
        PlannerKind::Greedy => {
            let plane = greedy_plan(c, planner).ok()?;
            (plane, plane)
        }
    };
    let shift = 3.0 * cut_eps(c);
    let attempts: [Plane; 4] = [
        refined,
        refined.with_offset(refined.offset + shift),
        refined.with_offset(refined.offset - shift),
        plane,
    ];
    attempts.iter().find_map(|p| {
        split_pieces(c, p, planner.separate_shells)
            .ok()
            .map(|pieces| pieces.into_iter().map(|p: Piece| (*p.mesh).clone()).collect())
    })
}

/// Whether two convex hulls have overlapping interiors, tested on the facet
/// normals of both. Edge-edge axes are not tried, so a pair separated only
/// along such an axis is reported as overlapping.
pub fn hulls_overlap(a: &SolidMesh, b: &SolidMesh, tol: f64) -> bool {
    let (ba, bb) = (a.bbox(), b.bbox());
    if !ba.overlaps(&bb, -tol) {
        return false;
    }
    let separated_by = |n: &Vec3| {
        let (amin, amax) = extent_along(a.vertices(), n);
        let (bmin, bmax) = extent_along(b.vertices(), n);
        amax <= bmin + tol || bmax <= amin + tol
    };
    for m in [a, b] {
        for t in 0..m.triangles().len() {
            let [p, q, r] = m.triangle(t);
            let n = (q - p).cross(&(r - p));
            let len = n.norm();
            if len > 0.0 && separated_by(&(n / len)) {
                return false;
            }
        }
    }
    true
}

fn extent_along(points: &[Vec3], n: &Vec3) -> (f64, f64) {
    points
        .iter()
        .map(|p| n.dot(p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn touching(a: &[SolidMesh], a_box: &Aabb, b: &[SolidMesh], b_box: &Aabb, tol: f64) -> bool {
    if !a_box.overlaps(b_box, tol) {
        return false;
    }
    let queries: Vec<MeshQuery> = b.iter().map(MeshQuery::new).collect();
    a.iter()
        .flat_map(|m| m.vertices())
        .filter(|v| b_box.distance_squared(v) <= tol * tol)
        .any(|v| queries.iter().any(|q| q.any_within(v, tol)))
}

fn pieces_bbox(pieces: &[SolidMesh]) -> Aabb {
    pieces.iter().fold(Aabb::empty(), |acc, m| acc.merge(&m.bbox()))
}

/// Hull and fast concavity of the union of touching closed pieces.
fn evaluate_union(pieces: &[SolidMesh], params: &ConcavityParams, contact_tol: f64) -> Option<(SolidMesh, ConcavityReport)> {
    let points: Vec<Vec3> = pieces.iter().flat_map(|m| m.vertices().iter().copied()).collect();
    let hull = convex_hull(&points).ok()?;
    let volume: f64 = pieces.iter().map(|m| m.signed_volume()).sum();
    let rv = rv_from_volumes(hull.signed_volume(), volume);
    let report = ConcavityReport::new(hb_pieces(pieces, &hull, params, contact_tol), rv, params.k);
    Some((hull, report))
}

fn merge_working(parts: &mut Vec<Working>, epsilon: f64, params: &ConcavityParams, contact_tol: f64) -> usize {
    struct Candidate {
        a: usize,
        b: usize,
        hull: SolidMesh,
        report: ConcavityReport,
    }
    let mut merges = 0;
    // Evaluations of adjacent pairs, keyed by part ids; recomputed only for
    // pairs involving a freshly merged part.
    let mut cache: Vec<(usize, usize, Option<(SolidMesh, ConcavityReport)>)> = Vec::new();
    loop {
        let boxes: Vec<Aabb> = parts.iter().map(|w| pieces_bbox(&w.pieces)).collect();
        let mut best: Option<Candidate> = None;
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let (ia, ib) = (parts[i].id, parts[j].id);
                let cached = cache.iter().position(|(x, y, _)| *x == ia && *y == ib);
                let k = match cached {
                    Some(k) => k,
                    None => {
                        let eval = if touching(&parts[i].pieces, &boxes[i], &parts[j].pieces, &boxes[j], contact_tol) {
                            let mut pieces = parts[i].pieces.clone();
                            pieces.extend(parts[j].pieces.iter().cloned());
                            let cp = pair_params(params, ia, ib);
                            evaluate_union(&pieces, &cp, contact_tol)
                        } else {
                            None
                        };
                        cache.push((ia, ib, eval));
                        cache.len() - 1
                    }
                };
                let Some((hull, report)) = &cache[k].2 else { continue };
                if report.fast > epsilon || best.as_ref().is_some_and(|c| c.report.fast <= report.fast) {
                    continue;
                }
                let overlaps = parts
                    .iter()
                    .enumerate()
                    .any(|(o, w)| o != i && o != j && hulls_overlap(hull, &w.hull, contact_tol));
                if !overlaps {
                    best = Some(Candidate {
                        a: i,
                        b: j,
                        hull: hull.clone(),
                        report: *report,
                    });
                }
            }
        }
        let Some(c) = best else { break };
        let removed = parts.remove(c.b);
        let keep = &mut parts[c.a];
        let (old_a, old_b) = (keep.id, removed.id);
        keep.pieces.extend(removed.pieces);
        keep.hull = c.hull;
        keep.report = c.report;
        cache.retain(|(x, y, _)| ![old_a, old_b].contains(x) && ![old_a, old_b].contains(y));
        merges += 1;
    }
    merges
}

fn pair_params(params: &ConcavityParams, a: usize, b: usize) -> ConcavityParams {
    ConcavityParams {
        seed: derive_seed(derive_seed(params.seed, 0x3000 + a as u64), b as u64),
        ..*params
    }
}

/// Merges adjacent parts, most convex union first, while the union's fast
/// concavity stays within `epsilon` and its hull stays clear of the other
/// hulls. Returns the parts in their original order, merged parts taking the
/// earlier position.
pub fn merge_components(parts: Vec<Part>, epsilon: f64, params: &ConcavityParams) -> Vec<Part> {
    if parts.len() < 2 {
        return parts;
    }
    let all = SolidMesh::concat(parts.iter().map(|p| &p.component));
    let contact_tol = 2.0 * cut_eps(&all);
    let mut working: Vec<Working> = parts
        .into_iter()
        .enumerate()
        .map(|(id, p)| Working {
            id,
            pieces: crate::mesh::shells(&p.component),
            hull: p.hull,
            report: p.report,
        })
        .collect();
    merge_working(&mut working, epsilon, params, contact_tol);
    working
        .into_iter()
        .map(|w| Part {
            component: SolidMesh::concat(&w.pieces),
            hull: w.hull,
            report: w.report,
        })
        .collect()
}

/// Approximate worst concavity of the solid restricted to each hull.
///
/// For every hull the intersection with the solid is represented by samples:
/// the solid's surface samples inside the hull plus the hull's surface samples
/// inside the solid form its boundary, and a stratified grid over the hull
/// estimates its volume. The boundary measure and the volume-gap radius are
/// then computed against the hull of that boundary, and combined as in the
/// fast concavity.
pub fn score_decomposition(original: &SolidMesh, hulls: &[SolidMesh], params: &ConcavityParams) -> f64 {
    let query = MeshQuery::new(original);
    let tol = 2.0 * cut_eps(original);
    let surface = sample_surface(original, params.surface_density, derive_seed(params.seed, 0x4000)).points;
    hulls
        .iter()
        .enumerate()
        .map(|(i, h)| score_hull(original, &query, &surface, h, params, tol, i))
        .fold(0.0, f64::max)
}

fn score_hull(
    original: &SolidMesh,
    query: &MeshQuery,
    surface: &[Vec3],
    hull: &SolidMesh,
    params: &ConcavityParams,
    tol: f64,
    index: usize,
) -> f64 {
    let half = HalfSpaces::new(hull);
    let hull_query = MeshQuery::new(hull);
    let seed = derive_seed(params.seed, 0x5000 + index as u64);

    let mut boundary: Vec<Vec3> = surface.iter().copied().filter(|p| half.contains(p, tol)).collect();
    let hull_samples = sample_surface(hull, params.surface_density, seed).points;
    boundary.extend(hull_samples.iter().copied().filter(|p| query.contains(p) || query.any_within(p, tol)));
    let mut support = boundary.clone();
    support.extend(original.vertices().iter().copied().filter(|p| half.contains(p, tol)));
    support.extend(hull.vertices().iter().copied().filter(|p| query.contains(p) || query.any_within(p, tol)));
    if support.len() < 4 {
        return 0.0;
    }
    let Ok(proxy) = convex_hull(&support) else {
        return 0.0;
    };

    let volume = intersection_volume(query, hull, &half, params.interior_count, seed);
    let rv = rv_from_volumes(proxy.signed_volume(), volume);

    // Boundary points to the proxy hull's surface, exactly.
    let forward = directed_hausdorff_query(&boundary, &MeshQuery::new(&proxy));
    // Proxy hull samples back to the boundary: points on the original
    // surface inside the hull, or on the hull surface inside the original,
    // are on the boundary; others are matched to the nearest boundary sample.
    let proxy_samples = sample_surface(&proxy, params.surface_density, derive_seed(seed, 1)).points;
    let off_boundary: Vec<Vec3> = proxy_samples
        .into_iter()
        .filter(|p| {
            let on_original = query.any_within(p, tol) && half.contains(p, tol);
            let on_hull = hull_query.any_within(p, tol) && query.contains(p);
            !(on_original || on_hull)
        })
        .collect();
    let backward = crate::concavity::directed_point_distance(&off_boundary, &boundary);
    forward.max(backward).max(params.k * rv)
}

/// Stratified jittered estimate of the volume of the solid inside a hull.
fn intersection_volume(query: &MeshQuery, hull: &SolidMesh, half: &HalfSpaces, count: usize, seed: u64) -> f64 {
    let bbox = hull.bbox();
    let extent = bbox.extent();
    let cell = (extent.x * extent.y * extent.z / count.max(1) as f64).cbrt();
    if !(cell > 0.0) {
        return 0.0;
    }
    let dims = extent.map(|e| ((e / cell).ceil() as usize).max(1));
    let step = extent.component_div(&dims.map(|d| d as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut in_hull, mut in_both) = (0usize, 0usize);
    for i in 0..dims.x {
        for j in 0..dims.y {
            for k in 0..dims.z {
                let jitter = Vec3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
                let p = bbox.min + step.component_mul(&(Vec3::new(i as f64, j as f64, k as f64) + jitter));
                if half.contains(&p, 0.0) {
                    in_hull += 1;
                    if query.contains(&p) {
                        in_both += 1;
                    }
                }
            }
        }
    }
    if in_hull == 0 {
        return 0.0;
    }
    hull.signed_volume() * in_both as f64 / in_hull as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concavity::concavity_fast;
    use crate::cutter::cut;
    use crate::primitives::*;

    fn part_of(mesh: SolidMesh) -> Part {
        let (hull, report) = evaluate(&mesh, &ConcavityParams::default());
        Part {
            component: mesh,
            hull,
            report,
        }
    }

    #[test]
    fn normalization_centers_and_scales() {
        let b = box_mesh(Vec3::new(1.0, 2.0, 3.0), Vec3::new(5.0, 4.0, 4.0));
        let t = normalization(&b, false, 0);
        let bb = b.transformed(&t).bbox();
        assert!((bb.extent().max() - 2.0).abs() < 1e-12);
        assert!(bb.center().norm() < 1e-12);
        let back = b.transformed(&t).transformed(&t.inverse());
        for (p, q) in back.vertices().iter().zip(b.vertices()) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn cube_is_one_part() {
        let d = decompose(&unit_cube(), &DecomposeParams::default()).unwrap();
        assert_eq!(d.parts.len(), 1);
        assert_eq!(d.stats.cuts, 0);
        assert!(d.parts[0].report.fast < 1e-3);
    }

    #[test]
    fn halves_of_a_cube_merge_back() {
        let r = cut(&unit_cube(), &Plane::new(Vec3::x(), 0.5).unwrap()).unwrap();
        let merged = merge_components(vec![part_of(r.negative), part_of(r.positive)], 0.05, &ConcavityParams::default());
        assert_eq!(merged.len(), 1);
        assert!(merged[0].report.fast < 1e-6);
        assert!((merged[0].hull.signed_volume() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn l_shaped_union_is_not_merged() {
        let l = l_prism();
        let r = cut(&l, &Plane::new(Vec3::x(), 0.5).unwrap()).unwrap();
        let params = ConcavityParams::default();
        let union = concavity_fast(&l, &params).unwrap().fast;
        assert!(union > 0.05);
        let merged = merge_components(vec![part_of(r.negative), part_of(r.positive)], 0.05, &params);
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn empty_and_singleton_are_unchanged() {
        let params = ConcavityParams::default();
        assert!(merge_components(Vec::new(), 0.05, &params).is_empty());
        let one = merge_components(vec![part_of(unit_cube())], 0.05, &params);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].component, unit_cube());
    }

    #[test]
    fn overlap_test_on_boxes() {
        let a = box_mesh(Vec3::zeros(), Vec3::new(1.0, 1.0, 1.0));
        let touching = box_mesh(Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 1.0));
        let inter = box_mesh(Vec3::new(0.5, 0.5, 0.5), Vec3::new(2.0, 2.0, 2.0));
        assert!(!hulls_overlap(&a, &touching, 1e-9));
        assert!(hulls_overlap(&a, &inter, 1e-9));
    }

    #[test]
    fn score_of_a_convex_solid_is_near_zero() {
        let c = unit_cube();
        let s = score_decomposition(&c, std::slice::from_ref(&c), &ConcavityParams::default());
        assert!(s < 0.01, "{s}");
    }

    #[test]
    fn single_hull_score_matches_the_concavity() {
        let t = torus(1.0, 0.3, 32, 16);
        let params = ConcavityParams::default();
        let hull = convex_hull_of_mesh(&t).unwrap();
        let s = score_decomposition(&t, &[hull], &params);
        let fast = concavity_fast(&t, &params).unwrap().fast;
        assert!((s - fast).abs() <= 0.1 * fast, "score {s} vs concavity {fast}");
    }

    #[test]
    fn splitting_a_hull_does_not_raise_the_score() {
        let l = l_prism();
        let params = ConcavityParams::default();
        let whole = score_decomposition(&l, &[convex_hull_of_mesh(&l).unwrap()], &params);
        let r = cut(&l, &Plane::new(Vec3::x(), 0.5).unwrap()).unwrap();
        let halves = [convex_hull_of_mesh(&r.negative).unwrap(), convex_hull_of_mesh(&r.positive).unwrap()];
        let split = score_decomposition(&l, &halves, &params);
        assert!(split <= whole, "{split} > {whole}");
        assert!(split < 0.01);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = DecomposeParams {
            epsilon: 0.0,
            ..Default::default()
        };
        assert!(matches!(decompose(&unit_cube(), &p), Err(DecomposeError::InvalidInput(_))));
    }

    #[test]
    fn soup_validation_errors_surface() {
        let c = unit_cube();
        let tris = &c.triangles()[1..];
        assert!(matches!(
            decompose_soup(c.vertices(), tris, &DecomposeParams::default()),
            Err(DecomposeError::InvalidMesh(MeshError::OpenBoundary { .. }))
        ));
    }
}
