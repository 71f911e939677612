use std::collections::VecDeque;

use spade::handles::FixedVertexHandle;
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::section::CrossSection;
use super::CutError;
use crate::geom::AREA_EPS;

/// Triangulates the region bounded by a cross-section under even–odd fill.
///
/// Returned triangles index the section's points in loop order (loop 0 first)
/// and are counter-clockwise in the section's 2D frame. Loops with area below
/// the degeneracy threshold are ignored; an all-degenerate section yields no
/// triangles.
pub fn triangulate_cap(section: &CrossSection) -> Result<Vec<[usize; 3]>, CutError> {
    let mut points = Vec::new();
    let mut original = Vec::new();
    let mut edges = Vec::new();
    let mut all = 0;
    for lp in &section.loops {
        if lp.len() >= 3 && polygon_area(lp).abs() >= AREA_EPS {
            let base = points.len();
            points.extend_from_slice(lp);
            original.extend(all..all + lp.len());
            for i in 0..lp.len() {
                edges.push([base + i, base + (i + 1) % lp.len()]);
            }
        }
        all += lp.len();
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let tris = triangulate_constrained(&points, &edges)?;
    Ok(tris.into_iter().map(|t| t.map(|i| original[i])).collect())
}

pub(crate) fn polygon_area(lp: &[[f64; 2]]) -> f64 {
    let mut a = 0.0;
    for i in 0..lp.len() {
        let p = lp[i];
        let q = lp[(i + 1) % lp.len()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Constrained Delaunay triangulation of `points` with `edges` as constraints,
/// keeping faces with odd constraint-crossing parity from the outside.
/// Triangles are counter-clockwise and index into `points`.
pub(crate) fn triangulate_constrained(
    points: &[[f64; 2]],
    edges: &[[usize; 2]],
) -> Result<Vec<[usize; 3]>, CutError> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles: Vec<FixedVertexHandle> = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| CutError::TriangulationFailure(format!("vertex insertion: {e:?}")))?;
        if h.index() != i {
            return Err(CutError::TriangulationFailure(format!(
                "cap vertices {} and {i} coincide",
                h.index()
            )));
        }
        handles.push(h);
    }
    for &[a, b] in edges {
        if a == b {
            continue;
        }
        let (ha, hb) = (handles[a], handles[b]);
        if cdt.exists_constraint(ha, hb) {
            continue;
        }
        if !cdt.can_add_constraint(ha, hb) {
            return Err(CutError::TriangulationFailure(format!(
                "constraint {a}-{b} crosses another constraint"
            )));
        }
        cdt.add_constraint(ha, hb);
    }

    // Even–odd fill by flooding across the triangulation: crossing a
    // constraint edge toggles inside/outside.
    let nfaces = cdt.num_all_faces();
    let mut parity: Vec<Option<bool>> = vec![None; nfaces];
    let mut queue = VecDeque::new();
    for face in cdt.inner_faces() {
        for e in face.adjacent_edges() {
            if e.rev().face().is_outer() {
                let inside = cdt.is_constraint_edge(e.as_undirected().fix());
                let idx = face.fix().index();
                if parity[idx].is_none() {
                    parity[idx] = Some(inside);
                    queue.push_back(face.fix());
                }
            }
        }
    }
    while let Some(f) = queue.pop_front() {
        let here = parity[f.index()].expect("queued faces are labelled");
        for e in cdt.face(f).adjacent_edges() {
            if let Some(n) = e.rev().face().as_inner() {
                if parity[n.fix().index()].is_none() {
                    let crossing = cdt.is_constraint_edge(e.as_undirected().fix());
                    parity[n.fix().index()] = Some(here ^ crossing);
                    queue.push_back(n.fix());
                }
            }
        }
    }

    let mut out = Vec::new();
    for face in cdt.inner_faces() {
        if parity[face.fix().index()] == Some(true) {
            let v = face.vertices();
            out.push([v[0].fix().index(), v[1].fix().index(), v[2].fix().index()]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area_of(points: &[[f64; 2]], tris: &[[usize; 3]]) -> f64 {
        tris.iter()
            .map(|t| polygon_area(&[points[t[0]], points[t[1]], points[t[2]]]))
            .sum()
    }

    fn circle(r: f64, n: usize, ccw: bool) -> Vec<[f64; 2]> {
        let mut v: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        if !ccw {
            v.reverse();
        }
        v
    }

    #[test]
    fn unit_square() {
        let s = CrossSection {
            loops: vec![vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]],
        };
        let t = triangulate_cap(&s).unwrap();
        assert_eq!(t.len(), 2);
        assert!((area_of(&s.loops[0], &t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_area_and_hole_is_empty() {
        let n = 256;
        let s = CrossSection {
            loops: vec![circle(1.0, n, true), circle(0.5, n, false)],
        };
        let pts: Vec<[f64; 2]> = s.loops.concat();
        let t = triangulate_cap(&s).unwrap();
        // Compare against the exact area of the two inscribed polygons.
        let poly = |r: f64| 0.5 * n as f64 * r * r * (std::f64::consts::TAU / n as f64).sin();
        let expected = poly(1.0) - poly(0.5);
        assert!((area_of(&pts, &t) - expected).abs() < 1e-9);
        let analytic = std::f64::consts::PI * (1.0 - 0.25);
        assert!((area_of(&pts, &t) - analytic).abs() / analytic < 1e-3);
        for tri in &t {
            let c = [
                (pts[tri[0]][0] + pts[tri[1]][0] + pts[tri[2]][0]) / 3.0,
                (pts[tri[0]][1] + pts[tri[1]][1] + pts[tri[2]][1]) / 3.0,
            ];
            assert!(c[0].hypot(c[1]) > 0.5 * (std::f64::consts::PI / n as f64).cos() - 1e-12);
        }
    }

    #[test]
    fn degenerate_sliver_is_omitted() {
        let s = CrossSection {
            loops: vec![vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1e-14]]],
        };
        assert!(triangulate_cap(&s).unwrap().is_empty());
    }

    #[test]
    fn triangles_are_counter_clockwise() {
        let s = CrossSection {
            loops: vec![vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]],
        };
        let t = triangulate_cap(&s).unwrap();
        for tri in t {
            let a = polygon_area(&[s.loops[0][tri[0]], s.loops[0][tri[1]], s.loops[0][tri[2]]]);
            assert!(a > 0.0);
        }
    }

    #[test]
    fn crossing_constraints_fail() {
        let pts = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        let err = triangulate_constrained(&pts, &[[0, 1], [2, 3]]).unwrap_err();
        assert!(matches!(err, CutError::TriangulationFailure(_)));
    }
}
