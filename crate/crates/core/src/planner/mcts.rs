use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    candidate_planes, default_policy, quality, replace_piece, split_pieces, ucb, worst_index, worst_value, Exploration,
    Piece, PlanError, PlanePath, PlannerParams,
};
use crate::concavity::{concavity_fast, ConcavityParams};
use crate::geom::{Plane, Transform};
use crate::mesh::SolidMesh;

/// One node of the search tree: the component set reached by the planes on
/// the path from the root.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub pieces: Vec<Piece>,
    pub plane: Option<Plane>,
    pub parent: Option<usize>,
    pub depth: usize,
    pub visits: u32,
    pub q: f64,
    pub children: Vec<usize>,
    /// Candidates of the node's worst piece not yet expanded; `None` until
    /// the node is first asked to expand.
    pub untried: Option<Vec<Plane>>,
    /// Worst concavity among `pieces`.
    pub worst: f64,
    /// Plane sequence of the best iteration through this node.
    pub best_path: Option<PlanePath>,
}

impl SearchNode {
    fn new(pieces: Vec<Piece>, plane: Option<Plane>, parent: Option<usize>, depth: usize) -> Self {
        let worst = worst_value(&pieces);
        SearchNode {
            pieces,
            plane,
            parent,
            depth,
            visits: 0,
            q: f64::NEG_INFINITY,
            children: Vec::new(),
            untried: None,
            worst,
            best_path: None,
        }
    }
}

/// Nodes visited and quality obtained by one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub path: Vec<usize>,
    pub quality: f64,
}

#[derive(Clone, Debug)]
pub struct SearchTree {
    /// Arena of nodes; index 0 is the root.
    pub nodes: Vec<SearchNode>,
    pub trace: Vec<IterationTrace>,
    pub exploration: f64,
}

impl SearchTree {
    /// Root child with the highest value; the first expanded wins ties.
    pub fn best_child(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &c in &self.nodes[0].children {
            if best.is_none_or(|b| self.nodes[c].q > self.nodes[b].q) {
                best = Some(c);
            }
        }
        best
    }
}

/// Runs the search and returns the first plane of the best sequence.
pub fn mcts_plan(component: &SolidMesh, params: &PlannerParams) -> Result<(Plane, PlanePath), PlanError> {
    let c = match params.exploration {
        Exploration::Fixed(c) => c,
        Exploration::Adaptive => {
            let cp = ConcavityParams {
                seed: params.seed,
                ..Default::default()
            };
            concavity_fast(component, &cp).map(|r| r.fast).unwrap_or(0.0) / params.d as f64
        }
    };
    plan_from_tree(search(component, params, c))
}

/// As [`mcts_plan`] with the root's concavity supplied by the caller, which
/// sets the adaptive exploration weight.
pub fn mcts_plan_with_concavity(
    component: &SolidMesh,
    params: &PlannerParams,
    root_concavity: f64,
) -> Result<(Plane, PlanePath), PlanError> {
    let c = match params.exploration {
        Exploration::Fixed(c) => c,
        Exploration::Adaptive => root_concavity / params.d as f64,
    };
    plan_from_tree(search(component, params, c))
}

fn plan_from_tree(tree: SearchTree) -> Result<(Plane, PlanePath), PlanError> {
    let best = tree.best_child().ok_or(PlanError::NoValidCandidates)?;
    let node = &tree.nodes[best];
    Ok((
        node.plane.expect("children have planes"),
        node.best_path.clone().expect("visited children have a path"),
    ))
}

/// Builds the search tree with exploration weight `c`.
pub fn search(component: &SolidMesh, params: &PlannerParams, c: f64) -> SearchTree {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tree = SearchTree {
        nodes: vec![SearchNode::new(vec![Piece::new(component.clone())], None, None, 0)],
        trace: Vec::with_capacity(params.t),
        exploration: c,
    };
    for _ in 0..params.t {
        let leaf = tree_policy(&mut tree, params, c, &mut rng);
        let path = path_to(&tree, leaf);

        let mut planes: Vec<Plane> = path.iter().filter_map(|&n| tree.nodes[n].plane).collect();
        let mut worst: Vec<f64> = path.iter().skip(1).map(|&n| tree.nodes[n].worst).collect();
        let remaining = params.d - tree.nodes[leaf].depth;
        let (more_planes, more_worst) = default_policy(&tree.nodes[leaf].pieces, remaining, params.separate_shells);
        planes.extend(more_planes);
        worst.extend(more_worst);
        let q = quality(&worst);

        for &n in &path {
            let node = &mut tree.nodes[n];
            node.visits += 1;
            if q > node.q {
                node.q = q;
                node.best_path = Some(PlanePath {
                    planes: planes.clone(),
                    per_step_worst: worst.clone(),
                });
            }
        }
        tree.trace.push(IterationTrace { path, quality: q });
    }
    tree
}

fn path_to(tree: &SearchTree, mut node: usize) -> Vec<usize> {
    let mut path = vec![node];
    while let Some(p) = tree.nodes[node].parent {
        path.push(p);
        node = p;
    }
    path.reverse();
    path
}

/// Descends from the root: expands an untried plane where one remains,
/// otherwise follows the child with the highest upper confidence bound.
fn tree_policy(tree: &mut SearchTree, params: &PlannerParams, c: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut node = 0;
    loop {
        if tree.nodes[node].depth >= params.d {
            return node;
        }
        if let Some(child) = expand(tree, node, params, rng) {
            return child;
        }
        let parent_visits = tree.nodes[node].visits;
        let mut best: Option<(f64, usize)> = None;
        for &ch in &tree.nodes[node].children {
            let n = &tree.nodes[ch];
            let score = ucb(n.q, n.visits.max(1), parent_visits.max(1), c);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, ch));
            }
        }
        match best {
            Some((_, ch)) => node = ch,
            // Nothing left to cut below this node.
            None => return node,
        }
    }
}

/// Adds one child from a random untried plane. Planes that fail to cut are
/// discarded for good.
fn expand(tree: &mut SearchTree, node: usize, params: &PlannerParams, rng: &mut ChaCha8Rng) -> Option<usize> {
    let w = worst_index(&tree.nodes[node].pieces);
    if tree.nodes[node].untried.is_none() {
        let mesh = &tree.nodes[node].pieces[w].mesh;
        tree.nodes[node].untried = Some(candidate_planes(mesh, params.m, &Transform::identity()));
    }
    loop {
        let untried = tree.nodes[node].untried.as_mut().expect("initialized above");
        if untried.is_empty() {
            return None;
        }
        let plane = untried.swap_remove(rng.random_range(0..untried.len()));
        let pieces = &tree.nodes[node].pieces;
        if let Ok(parts) = split_pieces(&pieces[w].mesh, &plane, params.separate_shells) {
            let next = replace_piece(pieces, w, parts);
            let depth = tree.nodes[node].depth + 1;
            let child = tree.nodes.len();
            tree.nodes.push(SearchNode::new(next, Some(plane), Some(node), depth));
            tree.nodes[node].children.push(child);
            return Some(child);
        }
    }
}
