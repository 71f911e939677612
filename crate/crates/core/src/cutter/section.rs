use super::cap::polygon_area;
use super::CutError;
use crate::geom::{Plane, Vec3};

/// Closed polylines of a planar cross-section in the plane's 2D frame
/// (see [`Plane::basis`]). Outer loops are counter-clockwise, holes clockwise.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossSection {
    pub loops: Vec<Vec<[f64; 2]>>,
}

impl CrossSection {
    pub fn area(&self) -> f64 {
        self.loops.iter().map(|l| polygon_area(l)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.loops
            .iter()
            .map(|l| {
                (0..l.len())
                    .map(|i| {
                        let (p, q) = (l[i], l[(i + 1) % l.len()]);
                        (q[0] - p[0]).hypot(q[1] - p[1])
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

pub(crate) fn project(plane: &Plane, p: &Vec3) -> [f64; 2] {
    let (u, v) = plane.basis();
    [p.dot(&u), p.dot(&v)]
}

/// Chains plane segments end-to-end (endpoints welded within `tol`) into
/// closed loops, then orients them by nesting depth.
pub fn build_cross_section(segments: &[[Vec3; 2]], plane: &Plane, tol: f64) -> Result<CrossSection, CutError> {
    let mut points: Vec<[f64; 2]> = Vec::new();
    let mut weld = |p: [f64; 2]| -> usize {
        if let Some(i) = points
            .iter()
            .position(|q| (q[0] - p[0]).hypot(q[1] - p[1]) <= tol)
        {
            return i;
        }
        points.push(p);
        points.len() - 1
    };
    let mut segs: Vec<[usize; 2]> = Vec::with_capacity(segments.len());
    for s in segments {
        let a = weld(project(plane, &s[0]));
        let b = weld(project(plane, &s[1]));
        if a != b {
            segs.push([a, b]);
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (i, s) in segs.iter().enumerate() {
        incident[s[0]].push(i);
        incident[s[1]].push(i);
    }
    let mut used = vec![false; segs.len()];
    let mut loops = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let first = segs[start][0];
        let mut chain = vec![first];
        let mut at = segs[start][1];
        while at != first {
            chain.push(at);
            let next = incident[at].iter().copied().find(|&s| !used[s]).ok_or_else(|| {
                CutError::OpenChain(format!("segment chain stops at ({:.3e}, {:.3e})", points[at][0], points[at][1]))
            })?;
            used[next] = true;
            at = if segs[next][0] == at { segs[next][1] } else { segs[next][0] };
        }
        loops.push(chain.into_iter().map(|i| points[i]).collect::<Vec<_>>());
    }
    orient_loops(&mut loops);
    Ok(CrossSection { loops })
}

/// Outer loops (even nesting depth) counter-clockwise, holes clockwise.
pub(crate) fn orient_loops(loops: &mut [Vec<[f64; 2]>]) {
    let depth: Vec<usize> = (0..loops.len())
        .map(|i| {
            let probe = loops[i][0];
            (0..loops.len())
                .filter(|&j| j != i && point_in_polygon(&probe, &loops[j]))
                .count()
        })
        .collect();
    for (lp, d) in loops.iter_mut().zip(depth) {
        let ccw = polygon_area(lp) > 0.0;
        if ccw != (d % 2 == 0) {
            lp.reverse();
        }
    }
}

pub(crate) fn point_in_polygon(p: &[f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_from_shuffled_segments() {
        let z = Plane::new(Vec3::z(), 0.5).unwrap();
        let p = |x: f64, y: f64| Vec3::new(x, y, 0.5);
        let segs = [
            [p(1.0, 1.0), p(0.0, 1.0)],
            [p(0.0, 0.0), p(1.0, 0.0)],
            [p(0.0, 0.0), p(0.0, 1.0)],
            [p(1.0, 0.0), p(1.0, 1.0)],
        ];
        let s = build_cross_section(&segs, &z, 1e-9).unwrap();
        assert_eq!(s.loops.len(), 1);
        assert!((s.perimeter() - 4.0).abs() < 1e-12);
        assert!((s.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn open_chain_is_reported() {
        let z = Plane::new(Vec3::z(), 0.0).unwrap();
        let segs = [[Vec3::zeros(), Vec3::x()], [Vec3::x(), Vec3::y()]];
        assert!(matches!(build_cross_section(&segs, &z, 1e-9), Err(CutError::OpenChain(_))));
    }

    #[test]
    fn nested_loops_are_oriented() {
        let z = Plane::new(Vec3::z(), 0.0).unwrap();
        let sq = |r: f64| {
            let c = [
                Vec3::new(-r, -r, 0.0),
                Vec3::new(r, -r, 0.0),
                Vec3::new(r, r, 0.0),
                Vec3::new(-r, r, 0.0),
            ];
            (0..4).map(move |i| [c[i], c[(i + 1) % 4]]).collect::<Vec<_>>()
        };
        let mut segs = sq(1.0);
        segs.extend(sq(0.5));
        let s = build_cross_section(&segs, &z, 1e-9).unwrap();
        assert_eq!(s.loops.len(), 2);
        assert!((s.area() - 3.0).abs() < 1e-12);
    }
}
