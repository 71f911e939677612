//! Cutting-plane selection: candidate planes, the one-step greedy baseline,
//! tree search over plane sequences and offset refinement.

mod mcts;
mod refine;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mcts::{mcts_plan, mcts_plan_with_concavity, search, IterationTrace, SearchNode, SearchTree};
pub use refine::refine_plane;

use crate::concavity::rv_from_volumes;
use crate::cutter::{cut, CutError};
use crate::geom::{Plane, Transform, Vec3};
use crate::hull::convex_hull_of_mesh;
use crate::mesh::{connected_components, SolidMesh};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exploration {
    /// Constant exploration weight.
    Fixed(f64),
    /// Root concavity divided by the search depth.
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Candidate planes per axis.
    pub m: usize,
    /// Search iterations.
    pub t: usize,
    /// Search depth (planes per sequence).
    pub d: usize,
    pub exploration: Exploration,
    pub seed: u64,
    pub use_pca: bool,
    pub refine_iterations: usize,
    /// Treat each connected shell of a cut half as its own component.
    pub separate_shells: bool,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            m: 20,
            t: 500,
            d: 4,
            exploration: Exploration::Adaptive,
            seed: 0,
            use_pca: false,
            refine_iterations: 15,
            separate_shells: true,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.m < 1 || self.t < 1 || self.d < 1 {
            return Err(format!("m, t and d must be at least 1 (got {}, {}, {})", self.m, self.t, self.d));
        }
        if let Exploration::Fixed(c) = self.exploration {
            if !(c >= 0.0) {
                return Err(format!("exploration constant must be non-negative, got {c}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("no candidate plane produces a valid cut")]
    NoValidCandidates,
}

/// A sequence of planes with the worst concavity after each step.
///
/// `per_step_worst` always has one entry per search step. `planes` can be
/// shorter when the sequence ran out of cuttable components: the remaining
/// steps then repeat the last worst value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanePath {
    pub planes: Vec<Plane>,
    pub per_step_worst: Vec<f64>,
}

impl PlanePath {
    pub fn quality(&self) -> f64 {
        quality(&self.per_step_worst)
    }
}

/// A component inside the search with its cached volume-gap concavity.
#[derive(Clone, Debug)]
pub struct Piece {
    pub mesh: Arc<SolidMesh>,
    pub rv: f64,
}

impl Piece {
    pub fn new(mesh: SolidMesh) -> Piece {
        let rv = rv_concavity(&mesh);
        Piece {
            mesh: Arc::new(mesh),
            rv,
        }
    }
}

/// Volume-gap radius of a mesh against its own hull; flat meshes count as convex.
pub fn rv_concavity(mesh: &SolidMesh) -> f64 {
    match convex_hull_of_mesh(mesh) {
        Ok(h) => rv_from_volumes(h.signed_volume(), mesh.signed_volume()),
        Err(_) => 0.0,
    }
}

/// Cuts `mesh` and returns the resulting components, negative side first.
pub fn split_pieces(mesh: &SolidMesh, plane: &Plane, separate_shells: bool) -> Result<Vec<Piece>, CutError> {
    let r = cut(mesh, plane)?;
    let mut out = Vec::new();
    for half in [r.negative, r.positive] {
        if separate_shells {
            out.extend(connected_components(&half).into_iter().map(Piece::new));
        } else {
            out.push(Piece::new(half));
        }
    }
    Ok(out)
}

/// Index of the most concave piece; the earliest wins ties.
pub(crate) fn worst_index(pieces: &[Piece]) -> usize {
    let mut best = 0;
    for (i, p) in pieces.iter().enumerate() {
        if p.rv > pieces[best].rv {
            best = i;
        }
    }
    best
}

pub(crate) fn worst_value(pieces: &[Piece]) -> f64 {
    pieces.iter().map(|p| p.rv).fold(0.0, f64::max)
}

pub(crate) fn max_rv(pieces: &[Piece]) -> f64 {
    worst_value(pieces)
}

/// Replaces piece `i` with `replacement`, appended in creation order.
pub(crate) fn replace_piece(pieces: &[Piece], i: usize, replacement: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = pieces.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
    out.extend(replacement);
    out
}

/// Equally spaced planes strictly inside the bounding box along each of the
/// three axes of `axes` (its rotation columns): offsets `min + i/(m+1)·extent`
/// for `i = 1..=m`, axis by axis.
pub fn candidate_planes(component: &SolidMesh, m: usize, axes: &Transform) -> Vec<Plane> {
    let mut out = Vec::with_capacity(3 * m);
    for axis in 0..3 {
        let n: Vec3 = axes.rotation.column(axis).into();
        let Some(unit) = Plane::new(n, 0.0) else { continue };
        let n = unit.n();
        let (lo, hi) = component
            .vertices()
            .iter()
            .map(|v| n.dot(v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        let extent = hi - lo;
        if !(extent > 0.0) {
            continue;
        }
        for i in 1..=m {
            out.push(unit.with_offset(lo + i as f64 / (m + 1) as f64 * extent));
        }
    }
    out
}

/// Distance between neighbouring candidate offsets along `normal`.
pub fn candidate_spacing(component: &SolidMesh, m: usize, normal: &Vec3) -> f64 {
    let (lo, hi) = component
        .vertices()
        .iter()
        .map(|v| normal.dot(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    (hi - lo) / (m + 1) as f64
}

/// Worst volume-gap concavity among the components produced by one cut.
pub fn one_step_cost(component: &SolidMesh, plane: &Plane, separate_shells: bool) -> Result<f64, CutError> {
    split_pieces(component, plane, separate_shells).map(|p| max_rv(&p))
}

/// Candidate minimizing [`one_step_cost`]; ties go to the earlier axis, then
/// the lower offset.
pub fn greedy_plan(component: &SolidMesh, params: &PlannerParams) -> Result<Plane, PlanError> {
    let mut best: Option<(f64, Plane)> = None;
    for plane in candidate_planes(component, params.m, &Transform::identity()) {
        if let Ok(cost) = one_step_cost(component, &plane, params.separate_shells) {
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, plane));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(PlanError::NoValidCandidates)
}

/// Mid-plane of the piece's bounding box along one axis.
fn mid_plane(mesh: &SolidMesh, axis: usize) -> Plane {
    let c = mesh.bbox().center();
    Plane::new(Vec3::ith(axis, 1.0), c[axis]).expect("axis normal")
}

/// One rollout step: cut the most concave piece at the bounding-box midpoint
/// along whichever axis leaves the lowest worst concavity.
pub(crate) fn rollout_step(pieces: &[Piece], separate_shells: bool) -> Option<(Plane, Vec<Piece>)> {
    let w = worst_index(pieces);
    let mesh = &pieces[w].mesh;
    let mut best: Option<(f64, Plane, Vec<Piece>)> = None;
    for axis in 0..3 {
        let plane = mid_plane(mesh, axis);
        if let Ok(parts) = split_pieces(mesh, &plane, separate_shells) {
            let cost = max_rv(&parts);
            if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                best = Some((cost, plane, parts));
            }
        }
    }
    best.map(|(_, plane, parts)| (plane, replace_piece(pieces, w, parts)))
}

/// Greedy completion of a plane sequence for `steps` more cuts. Works on
/// copies; the caller's pieces are untouched.
pub fn default_policy(pieces: &[Piece], steps: usize, separate_shells: bool) -> (Vec<Plane>, Vec<f64>) {
    let mut current = pieces.to_vec();
    let mut planes = Vec::new();
    let mut worst = Vec::with_capacity(steps);
    let mut stuck = false;
    for _ in 0..steps {
        if !stuck {
            match rollout_step(&current, separate_shells) {
                Some((plane, next)) => {
                    planes.push(plane);
                    current = next;
                }
                // The same piece stays worst, so every later step fails too.
                None => stuck = true,
            }
        }
        worst.push(worst_value(&current));
    }
    (planes, worst)
}

/// Mean of the negated per-step worst concavities.
pub fn quality(per_step_worst: &[f64]) -> f64 {
    if per_step_worst.is_empty() {
        return 0.0;
    }
    -per_step_worst.iter().sum::<f64>() / per_step_worst.len() as f64
}

/// Upper confidence bound of a child.
pub fn ucb(q: f64, visits: u32, parent_visits: u32, c: f64) -> f64 {
    q + c * (2.0 * (parent_visits as f64).ln() / visits as f64).sqrt()
}

/// Applies `planes` in order, each to the currently most concave piece, and
/// returns the worst concavity after each of `d` steps. A plane that does not
/// cut its piece leaves the step unchanged.
pub fn replay(component: &SolidMesh, planes: &[Plane], d: usize, separate_shells: bool) -> Vec<f64> {
    let mut pieces = vec![Piece::new(component.clone())];
    let mut worst = Vec::with_capacity(d);
    for i in 0..d {
        if let Some(plane) = planes.get(i) {
            let w = worst_index(&pieces);
            if let Ok(parts) = split_pieces(&pieces[w].mesh, plane, separate_shells) {
                pieces = replace_piece(&pieces, w, parts);
            }
        }
        worst.push(worst_value(&pieces));
    }
    worst
}
