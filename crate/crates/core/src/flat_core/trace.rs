use super::template::{ccw_angle, cross, Corner, Piece, SurfaceTemplate, V2};
use crate::error::{Error, Result};
use crate::tolerance::{EPS_GEOM, EPS_PARALLEL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceEnd {
    /// The ray reached the cone point at this polygon vertex.
    Vertex(Corner),
    /// The length budget ran out inside a polygon.
    Open { poly: usize, point: V2 },
}

/// A straight ray followed across the gluings. Piece parameters are
/// lengths along the ray.
#[derive(Clone, Debug)]
pub struct Trace {
    pub crossings: Vec<usize>,
    pub pieces: Vec<Piece>,
    pub end: TraceEnd,
    pub length: f64,
}

impl SurfaceTemplate {
    /// Follow the unit direction `dir` from the cone point at `corner`.
    pub fn trace_from_corner(&self, corner: usize, dir: &V2, max_len: f64, step_cap: usize) -> Result<Trace> {
        let c = self.owner(corner);
        let start = self.vertex(c.poly, c.vertex);
        let e = self.edge_vec(corner);
        let along = ccw_angle(&e, dir);
        if !(1e-12..=2.0 * std::f64::consts::PI - 1e-12).contains(&along) {
            let len = e.norm();
            if len > max_len {
                return Ok(Trace {
                    crossings: vec![],
                    pieces: vec![Piece { poly: c.poly, a: start, b: start + dir * max_len, t0: 0.0, t1: max_len }],
                    end: TraceEnd::Open { poly: c.poly, point: start + dir * max_len },
                    length: max_len,
                });
            }
            let end = Corner { poly: c.poly, vertex: (c.vertex + 1) % self.polygons[c.poly].len() };
            return Ok(Trace {
                crossings: vec![],
                pieces: vec![Piece { poly: c.poly, a: start, b: start + e, t0: 0.0, t1: len }],
                end: TraceEnd::Vertex(end),
                length: len,
            });
        }
        let excluded = [corner, self.prev_edge(corner)];
        self.walk(c.poly, start, dir, &excluded, max_len, step_cap)
    }

    /// Follow `dir` from a point of polygon `poly`; `entry` is the edge the
    /// point lies on, if any.
    pub fn trace_from_point(&self, poly: usize, point: V2, dir: &V2, entry: Option<usize>, max_len: f64, step_cap: usize) -> Result<Trace> {
        let excluded: Vec<usize> = entry.into_iter().collect();
        self.walk(poly, point, dir, &excluded, max_len, step_cap)
    }

    fn walk(&self, poly: usize, point: V2, dir: &V2, excluded: &[usize], max_len: f64, step_cap: usize) -> Result<Trace> {
        let tol = EPS_GEOM * self.diameter().max(1.0);
        let mut trace = Trace { crossings: vec![], pieces: vec![], end: TraceEnd::Open { poly, point }, length: 0.0 };
        let mut poly = poly;
        let mut x = point;
        let mut excluded: Vec<usize> = excluded.to_vec();
        let mut travelled = 0.0;
        for _ in 0..step_cap {
            let k_len = self.polygons[poly].len();
            let mut best: Option<(f64, usize, f64)> = None;
            for k in 0..k_len {
                let id = self.edge_id(poly, k);
                if excluded.contains(&id) {
                    continue;
                }
                let a = self.vertex(poly, k);
                let e = self.edge_vec(id);
                let denom = cross(dir, &e);
                if denom.abs() < EPS_PARALLEL * e.norm() {
                    continue;
                }
                let t = cross(&(a - x), &e) / denom;
                let s = cross(&(a - x), dir) / denom;
                if t <= tol * 1e-3 || s < -tol / e.norm() || s > 1.0 + tol / e.norm() {
                    continue;
                }
                if best.is_none_or(|(bt, _, _)| t < bt) {
                    best = Some((t, id, s));
                }
            }
            let Some((t, id, s)) = best else {
                return Err(Error::TraceBudget { angle: dir.y.atan2(dir.x), cap: step_cap });
            };
            if travelled + t > max_len {
                let rest = max_len - travelled;
                let b = x + dir * rest;
                trace.pieces.push(Piece { poly, a: x, b, t0: travelled, t1: max_len });
                trace.end = TraceEnd::Open { poly, point: b };
                trace.length = max_len;
                return Ok(trace);
            }
            let b = x + dir * t;
            trace.pieces.push(Piece { poly, a: x, b, t0: travelled, t1: travelled + t });
            travelled += t;
            let c = self.owner(id);
            let e_len = self.edge_vec(id).norm();
            if s * e_len < tol {
                trace.end = TraceEnd::Vertex(c);
                trace.length = travelled;
                return Ok(trace);
            }
            if (1.0 - s) * e_len < tol {
                let v = (c.vertex + 1) % k_len;
                trace.end = TraceEnd::Vertex(Corner { poly, vertex: v });
                trace.length = travelled;
                return Ok(trace);
            }
            trace.crossings.push(id);
            let pid = self.partner(id);
            let q = self.owner(pid);
            // Point on edge `id` at fraction s maps to the partner edge at 1 - s.
            x = self.vertex(q.poly, q.vertex) + self.edge_vec(pid) * (1.0 - s);
            poly = q.poly;
            excluded.clear();
            excluded.push(pid);
        }
        Err(Error::TraceBudget { angle: dir.y.atan2(dir.x), cap: step_cap })
    }
}
