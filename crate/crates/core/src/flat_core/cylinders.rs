use std::f64::consts::PI;

use serde::Serialize;

use super::template::{cross, Piece, SurfaceTemplate, V2};
use super::trace::TraceEnd;
use crate::error::{Error, Result};
use crate::tolerance::{EPS_GEOM, EPS_PARALLEL};

#[derive(Clone, Debug, Serialize)]
pub struct Cylinder {
    /// Unit vector of the direction, with angle in `[0, pi)`.
    pub direction: [f64; 2],
    pub height: f64,
    pub width: f64,
    pub core_class: Vec<i64>,
}

impl Cylinder {
    pub fn modulus(&self) -> f64 {
        self.height / self.width
    }
}

/// Unit vector of a projective direction, with angle in `[0, pi)`.
pub fn canonical_direction(d: &V2) -> V2 {
    let u = d.normalize();
    if u.y < 0.0 || (u.y == 0.0 && u.x < 0.0) {
        -u
    } else {
        u
    }
}

struct Separatrix {
    out_pos: f64,
    in_pos: f64,
    length: f64,
    class: Vec<i64>,
    pieces: Vec<Piece>,
}

const STEP_CAP: usize = 1_000_000;

/// Maximal cylinders in a periodic direction `d`.
///
/// Every separatrix in direction `d` is followed until it returns to the
/// cone point. A cylinder's lower boundary is a cycle of separatrices: the
/// next one leaves the cone point a half-turn clockwise from where the
/// previous one arrived. The height is measured along the perpendicular
/// ray from the start of the boundary.
pub fn cylinder_decomposition(s: &SurfaceTemplate, d: &V2) -> Result<Vec<Cylinder>> {
    let u = canonical_direction(d);
    let angle = u.y.atan2(u.x);
    let bound = 1e3 * s.diameter().max(1.0);
    let cone = s.cone_angle();

    let mut seps = Vec::new();
    for c in s.corners_containing(&u) {
        let tr = s.trace_from_corner(c, &u, bound, STEP_CAP)?;
        let TraceEnd::Vertex(end) = tr.end else {
            return Err(Error::NotPeriodic { angle, bound });
        };
        let mut pieces = tr.pieces.clone();
        if tr.crossings.is_empty() && tr.pieces.len() == 1 && s.owner(c).vertex != end.vertex {
            // A separatrix along an edge also bounds the glued polygon.
            let e = s.edge_vec(c);
            if (e.normalize() - u).norm() < 1e-9 {
                let pid = s.partner(c);
                let q = s.owner(pid);
                let a = s.vertex(q.poly, q.vertex + 1);
                pieces.push(Piece { poly: q.poly, a, b: a + e, t0: 0.0, t1: tr.length });
            }
        }
        seps.push(Separatrix {
            out_pos: s.ray_position(c, &u),
            in_pos: s.ray_position(s.edge_id(end.poly, end.vertex), &(-u)),
            length: tr.length,
            class: s.path_class(s.owner(c), &tr.crossings, end),
            pieces,
        });
    }

    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(cone);
        d.min(cone - d)
    };
    let next: Vec<usize> = seps
        .iter()
        .map(|sp| {
            let target = sp.in_pos - PI;
            (0..seps.len()).min_by(|&i, &j| circ(seps[i].out_pos, target).total_cmp(&circ(seps[j].out_pos, target))).expect("separatrices")
        })
        .collect();

    let mut used = vec![false; seps.len()];
    let mut cylinders = Vec::new();
    let area = s.area();
    for start in 0..seps.len() {
        if used[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !used[i] {
            used[i] = true;
            cycle.push(i);
            i = next[i];
        }
        let width: f64 = cycle.iter().map(|&i| seps[i].length).sum();
        let mut core = vec![0i64; s.basis_len];
        for &i in &cycle {
            for (x, y) in core.iter_mut().zip(&seps[i].class) {
                *x += y;
            }
        }
        let height = crossing_height(s, &seps, seps[start].out_pos + PI / 2.0, area / width * 1.001 + 1e-6)?;
        cylinders.push(Cylinder { direction: [u.x, u.y], height, width, core_class: core });
    }
    Ok(cylinders)
}

fn crossing_height(s: &SurfaceTemplate, seps: &[Separatrix], pos: f64, max_len: f64) -> Result<f64> {
    let (corner, dir) = s.locate_ray(pos);
    let tr = s.trace_from_corner(corner, &dir, max_len, STEP_CAP)?;
    let tol = EPS_GEOM * s.diameter().max(1.0);
    let mut best = match tr.end {
        TraceEnd::Vertex(_) => tr.length,
        TraceEnd::Open { .. } => f64::INFINITY,
    };
    for p in &tr.pieces {
        let pd = p.b - p.a;
        for sp in seps {
            for q in sp.pieces.iter().filter(|q| q.poly == p.poly) {
                let qd = q.b - q.a;
                let denom = cross(&pd, &qd);
                if denom.abs() < EPS_PARALLEL * pd.norm() * qd.norm() {
                    continue;
                }
                let t = cross(&(q.a - p.a), &qd) / denom;
                let r = cross(&(q.a - p.a), &pd) / denom;
                if !(-1e-9..=1.0 + 1e-9).contains(&t) || !(-1e-9..=1.0 + 1e-9).contains(&r) {
                    continue;
                }
                let at = p.t0 + t * (p.t1 - p.t0);
                if at > tol && at < best {
                    best = at;
                }
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NotPeriodic { angle: dir.y.atan2(dir.x), bound: max_len })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_core::{build_double_ngon, build_one_cylinder_fixture, build_staircase, staircase_lengths};

    fn area_sum(cyls: &[Cylinder]) -> f64 {
        cyls.iter().map(|c| c.height * c.width).sum()
    }

    #[test]
    fn staircase_horizontal_moduli() {
        for n in [5, 7, 9, 11, 13] {
            let s = build_staircase(n).unwrap();
            let cyls = cylinder_decomposition(&s, &V2::new(1.0, 0.0)).unwrap();
            let m = (n - 1) / 2;
            assert_eq!(cyls.len(), m);
            let expected = 1.0 / (2.0 * (PI / n as f64).cos());
            for c in &cyls {
                assert!((c.modulus() - expected).abs() < 1e-12, "n = {n}: {}", c.modulus());
            }
            assert!((area_sum(&cyls) - s.area()).abs() < 1e-9);
        }
    }

    #[test]
    fn heptagon_staircase_widths_and_heights() {
        let s = build_staircase(7).unwrap();
        let l = staircase_lengths(7).unwrap();
        let mut cyls = cylinder_decomposition(&s, &V2::new(1.0, 0.0)).unwrap();
        cyls.sort_by(|a, b| a.width.total_cmp(&b.width));
        // Row k has width a_{k-1} + a_k and height b_{m-k+1}.
        let mut expected = [(l[0], l[2]), (l[0] + l[1], l[1]), (l[1] + l[2], l[0])];
        expected.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (c, (w, h)) in cyls.iter().zip(expected) {
            assert!((c.width - w).abs() < 1e-12 && (c.height - h).abs() < 1e-12);
        }
    }

    #[test]
    fn staircase_core_classes() {
        let s = build_staircase(7).unwrap();
        let cyls = cylinder_decomposition(&s, &V2::new(1.0, 0.0)).unwrap();
        let mut cores: Vec<Vec<i64>> = cyls.iter().map(|c| c.core_class.clone()).collect();
        cores.sort();
        let mut expected = vec![vec![1, 0, 0, 0, 0, 0], vec![1, 1, 0, 0, 0, 0], vec![0, 1, 1, 0, 0, 0]];
        expected.sort();
        assert_eq!(cores, expected);
    }

    #[test]
    fn staircase_vertical_matches_horizontal() {
        let s = build_staircase(5).unwrap();
        let cyls = cylinder_decomposition(&s, &V2::new(0.0, 1.0)).unwrap();
        assert_eq!(cyls.len(), 2);
        for c in &cyls {
            assert!((c.modulus() - 0.6180339887498949).abs() < 1e-12);
        }
    }

    #[test]
    fn double_ngon_side_direction() {
        let s = build_double_ngon(5).unwrap();
        let cyls = cylinder_decomposition(&s, &V2::new(1.0, 0.0)).unwrap();
        assert!((area_sum(&cyls) - s.area()).abs() < 1e-9);
        let m0 = cyls[0].modulus();
        assert!(cyls.iter().all(|c| (c.modulus() - m0).abs() < 1e-9));
    }

    #[test]
    fn fixture_is_one_cylinder() {
        let s = build_one_cylinder_fixture().unwrap();
        let cyls = cylinder_decomposition(&s, &V2::new(1.0, 0.0)).unwrap();
        assert_eq!(cyls.len(), 1);
        assert!((cyls[0].width - 3.0).abs() < 1e-12 && (cyls[0].height - 1.0).abs() < 1e-12);
    }
}
