use super::{candidate_spacing, quality, replay, split_pieces, PlanePath, PlannerParams};
use crate::geom::Plane;
use crate::mesh::SolidMesh;

/// Narrows the first plane's offset within half a candidate spacing either
/// side, scoring each probe by replaying the rest of the path unchanged.
///
/// Each iteration compares two probes straddling the interval midpoint and
/// keeps the better half, so the interval roughly halves per iteration. The
/// volume-gap measure is often flat on one side of the optimum (moving a
/// plane within a solid slab changes nothing until it reaches a corner), so
/// ties move toward the best offset seen so far, starting from the interval
/// ends. The best probe is returned only if it strictly beats the original.
pub fn refine_plane(component: &SolidMesh, path: &PlanePath, params: &PlannerParams) -> Plane {
    let Some(&first) = path.planes.first() else {
        panic!("refine_plane needs a non-empty path");
    };
    if params.refine_iterations == 0 {
        return first;
    }
    let d = path.per_step_worst.len().max(1);
    let rest = &path.planes[1..];
    let evaluate = |offset: f64| -> Option<f64> {
        let mut planes = Vec::with_capacity(path.planes.len());
        planes.push(first.with_offset(offset));
        planes.extend_from_slice(rest);
        replay_from_cut(component, &planes, d, params.separate_shells).map(|w| quality(&w))
    };
    let Some(base) = evaluate(first.offset) else {
        return first;
    };
    let half = candidate_spacing(component, params.m, &first.n()) / 2.0;
    let (mut lo, mut hi) = (first.offset - half, first.offset + half);
    let mut best = (base, first.offset);
    let consider = |offset: f64, best: &mut (f64, f64)| -> f64 {
        match evaluate(offset) {
            Some(q) => {
                if q > best.0 {
                    *best = (q, offset);
                }
                q
            }
            None => f64::NEG_INFINITY,
        }
    };
    consider(lo, &mut best);
    consider(hi, &mut best);
    for _ in 0..params.refine_iterations {
        let mid = 0.5 * (lo + hi);
        let delta = 1e-3 * (hi - lo);
        let (a, b) = (mid - delta, mid + delta);
        let qa = consider(a, &mut best);
        let qb = consider(b, &mut best);
        // Volumes carry rounding noise, so plateau values differ in the last bits.
        let tie = (qa - qb).abs() <= 1e-9 * qa.abs().max(qb.abs());
        if (!tie && qa > qb) || (tie && best.1 < mid) {
            hi = b;
        } else {
            lo = a;
        }
    }
    consider(0.5 * (lo + hi), &mut best);
    if best.0 > base {
        first.with_offset(best.1)
    } else {
        first
    }
}

/// [`replay`] that requires the first plane to cut the component.
fn replay_from_cut(component: &SolidMesh, planes: &[Plane], d: usize, separate_shells: bool) -> Option<Vec<f64>> {
    split_pieces(component, &planes[0], separate_shells).ok()?;
    Some(replay(component, planes, d, separate_shells))
}
