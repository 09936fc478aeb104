use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flat_core::{cross, Corner, Piece, SurfaceTemplate, V2};
use crate::tolerance::{EPS_DEDUP, EPS_DIR};

/// Default cap on the number of developed polygon copies per enumeration.
pub const DEFAULT_CAP: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Crossing {
    /// Global id of the edge the segment leaves through.
    pub edge: usize,
    /// +1 when the segment crosses the edge's named cycle from its left
    /// to its right, -1 otherwise.
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct SaddleConnection {
    pub holonomy: V2,
    pub length: f64,
    pub start: Corner,
    pub end: Corner,
    pub crossings: Vec<Crossing>,
    /// Position of the outgoing ray around the cone point, in `[0, cone angle)`.
    pub start_ray: f64,
    /// Position of the ray pointing back along the connection at its end.
    pub end_ray: f64,
    pub homology: Vec<i64>,
}

impl SaddleConnection {
    /// Projective direction as an angle in `[0, pi)`.
    pub fn angle(&self) -> f64 {
        projective_angle(&self.holonomy)
    }

    pub fn edges(&self) -> Vec<usize> {
        self.crossings.iter().map(|c| c.edge).collect()
    }

    pub fn pieces(&self, s: &SurfaceTemplate) -> Vec<Piece> {
        s.develop(self.start, &self.holonomy, &self.edges())
    }

    /// Whether the connection runs along a polygon edge.
    pub fn is_edge(&self, s: &SurfaceTemplate) -> bool {
        self.crossings.is_empty() && (s.edge_vec(s.edge_id(self.start.poly, self.start.vertex)) - self.holonomy).norm() < 1e-9
    }

    /// Crossed labels as `label:+1` items joined by `;`.
    pub fn crossing_string(&self, s: &SurfaceTemplate) -> String {
        self.crossings.iter().map(|c| format!("{}:{}", s.label(c.edge), if c.sign > 0 { "+1" } else { "-1" })).collect::<Vec<_>>().join(";")
    }

    pub fn reversed_of(&self, other: &SaddleConnection) -> bool {
        (self.holonomy + other.holonomy).norm() < 1e-9 && self.homology.iter().zip(&other.homology).all(|(a, b)| *a == -b)
    }
}

pub fn projective_angle(v: &V2) -> f64 {
    let a = v.y.atan2(v.x).rem_euclid(PI);
    if PI - a < EPS_DIR {
        0.0
    } else {
        a
    }
}

struct Raw {
    start: usize,
    end: Corner,
    hol: V2,
    crossings: Vec<usize>,
}

struct Frame {
    poly: usize,
    off: V2,
    lo: V2,
    hi: V2,
    crossings: Vec<usize>,
}

/// All saddle connections of length at most `lmax`, each orientation
/// listed once, sorted by length and then holonomy.
pub fn enumerate_saddle_connections(s: &SurfaceTemplate, lmax: f64) -> Result<Vec<SaddleConnection>> {
    enumerate_with_cap(s, lmax, DEFAULT_CAP)
}

/// As [`enumerate_saddle_connections`], failing once more than `cap`
/// polygon copies have been developed.
pub fn enumerate_with_cap(s: &SurfaceTemplate, lmax: f64, cap: usize) -> Result<Vec<SaddleConnection>> {
    let count = AtomicUsize::new(0);
    let per_corner: Vec<Vec<Raw>> =
        (0..s.edge_count()).into_par_iter().map(|c| from_corner(s, c, lmax, cap, &count)).collect::<Result<_>>()?;

    // Parallel diagonals of the two polygons share holonomy and an empty
    // crossing sequence, so the start corner is part of the key.
    let mut unique: BTreeMap<(usize, i64, i64, Vec<usize>), Raw> = BTreeMap::new();
    for raw in per_corner.into_iter().flatten() {
        let key = (raw.start, (raw.hol.x / EPS_DEDUP).round() as i64, (raw.hol.y / EPS_DEDUP).round() as i64, raw.crossings.clone());
        unique.entry(key).or_insert(raw);
    }
    let mut out: Vec<SaddleConnection> = unique.into_values().map(|r| finish(s, r)).collect();
    out.sort_by_key(sort_key);
    Ok(out)
}

fn sort_key(sc: &SaddleConnection) -> (i64, i64, i64, Vec<Crossing>, Corner) {
    let r = |x: f64| (x / EPS_DEDUP).round() as i64;
    (r(sc.length), r(sc.holonomy.x), r(sc.holonomy.y), sc.crossings.clone(), sc.start)
}

fn finish(s: &SurfaceTemplate, r: Raw) -> SaddleConnection {
    let start = s.owner(r.start);
    let crossings = r.crossings.iter().map(|&e| Crossing { edge: e, sign: -s.edge_labels[e].orient }).collect();
    SaddleConnection {
        holonomy: r.hol,
        length: r.hol.norm(),
        start,
        end: r.end,
        crossings,
        start_ray: s.ray_position(r.start, &r.hol),
        end_ray: s.ray_position(s.edge_id(r.end.poly, r.end.vertex), &(-r.hol)),
        homology: s.path_class(start, &r.crossings, r.end),
    }
}

fn strictly_inside(lo: &V2, hi: &V2, u: &V2) -> bool {
    let n = u.norm();
    cross(lo, u) > EPS_DIR * n && cross(u, hi) > EPS_DIR * n
}

fn ray_hits_line(dir: &V2, a: &V2, e: &V2) -> V2 {
    dir * (cross(a, e) / cross(dir, e))
}

fn segment_distance(p: &V2, q: &V2) -> f64 {
    let d = q - p;
    let t = (-p.dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p + d * t).norm()
}

fn from_corner(s: &SurfaceTemplate, corner: usize, lmax: f64, cap: usize, count: &AtomicUsize) -> Result<Vec<Raw>> {
    let c = s.owner(corner);
    let k0 = s.polygons[c.poly].len();
    let s0 = s.vertex(c.poly, c.vertex);
    let slack = 1e-12 * lmax.max(1.0);
    let mut out = Vec::new();

    let e = s.edge_vec(corner);
    if e.norm() <= lmax + slack {
        out.push(Raw { start: corner, end: Corner { poly: c.poly, vertex: (c.vertex + 1) % k0 }, hol: e, crossings: vec![] });
    }

    let lo0 = e.normalize();
    let hi0 = (s.vertex(c.poly, c.vertex + k0 - 1) - s0).normalize();
    let skip = [corner, s.prev_edge(corner)];
    let mut stack = vec![Frame { poly: c.poly, off: V2::zeros(), lo: lo0, hi: hi0, crossings: vec![] }];
    while let Some(f) = stack.pop() {
        if count.fetch_add(1, Ordering::Relaxed) >= cap {
            return Err(Error::Budget { cap });
        }
        let k_len = s.polygons[f.poly].len();
        let rel = |i: usize| s.vertex(f.poly, i) + f.off - s0;
        for k in 0..k_len {
            let u = rel(k);
            if u.norm() <= lmax + slack && strictly_inside(&f.lo, &f.hi, &u) {
                let mut crossings = f.crossings.clone();
                crossings.shrink_to_fit();
                out.push(Raw { start: corner, end: Corner { poly: f.poly, vertex: k }, hol: u, crossings });
            }
        }
        for k in 0..k_len {
            let id = s.edge_id(f.poly, k);
            if f.crossings.is_empty() && skip.contains(&id) {
                continue;
            }
            let a = rel(k);
            let b = rel(k + 1);
            if cross(&a, &b) <= 0.0 {
                continue;
            }
            let lo = if cross(&f.lo, &a) > 0.0 { a.normalize() } else { f.lo };
            let hi = if cross(&b, &f.hi) > 0.0 { b.normalize() } else { f.hi };
            if cross(&lo, &hi) <= EPS_DIR {
                continue;
            }
            let ev = b - a;
            let near = segment_distance(&ray_hits_line(&lo, &a, &ev), &ray_hits_line(&hi, &a, &ev));
            if near > lmax + slack {
                continue;
            }
            let pid = s.partner(id);
            let q = s.owner(pid);
            let off = s.vertex(f.poly, k + 1) + f.off - s.vertex(q.poly, q.vertex);
            let mut crossings = f.crossings.clone();
            crossings.push(id);
            stack.push(Frame { poly: q.poly, off, lo, hi, crossings });
        }
    }
    Ok(out)
}

/// Distinct directions, as angles in `[0, pi)`, of the saddle connections
/// of length at most `lmax`.
pub fn periodic_directions(s: &SurfaceTemplate, lmax: f64) -> Result<Vec<f64>> {
    let scs = enumerate_saddle_connections(s, lmax)?;
    Ok(distinct_angles(scs.iter().map(|sc| sc.angle())))
}

pub fn distinct_angles(angles: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = angles.collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for a in v {
        if out.last().is_none_or(|&b| a - b > EPS_DIR) {
            out.push(a);
        }
    }
    if out.len() > 1 && PI - out[out.len() - 1] + out[0] <= EPS_DIR {
        out.pop();
    }
    out
}
