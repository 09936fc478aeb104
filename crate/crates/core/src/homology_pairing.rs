//! Algebraic intersection numbers on the one-vertex cell complex of a
//! template, computed from homology classes and, independently, from the
//! geometry of the saddle connections.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flat_core::{cross, Piece, SurfaceTemplate, V2};
use crate::saddle_scan::SaddleConnection;
use crate::tolerance::{EPS_GEOM, EPS_PARALLEL, PERTURB_DELTA};

pub type HomologyClass = Vec<i64>;

/// Local intersection at the cone point of two curves passing through it,
/// given the positions of their rays around the cone point.
///
/// Curve `a` leaves along `a_out` and arrives along `a_in`. Turning
/// counterclockwise from `a_out`, the sign is +1 when `b_out` comes before
/// `a_in` and `b_in` after it, -1 for the opposite order, and 0 when the
/// two pairs do not interleave.
pub fn cone_term(a_out: f64, a_in: f64, b_out: f64, b_in: f64, cone: f64) -> i64 {
    let r = |x: f64| (x - a_out).rem_euclid(cone);
    let (ai, bo, bi) = (r(a_in), r(b_out), r(b_in));
    let eps = 1e-9;
    let close = |x: f64, y: f64| (x - y).abs() < eps || (cone - (x - y).abs()) < eps;
    if bo < eps || close(bo, ai) || close(bi, ai) || bi < eps || cone - bo < eps || cone - bi < eps {
        return 0;
    }
    if bo < ai && ai < bi {
        1
    } else if bi < ai && ai < bo {
        -1
    } else {
        0
    }
}

/// Intersection matrix of the labelled cycles. Labelled edges meet only at
/// the cone point, so each entry is the interleaving sign of their rays.
pub fn edge_intersection_matrix(s: &SurfaceTemplate) -> Result<Vec<Vec<i64>>> {
    if s.singularities.len() != 1 {
        return Err(Error::VertexClasses(s.singularities.len()));
    }
    let rays: Vec<(f64, f64)> = (0..s.basis_len)
        .map(|k| {
            let e = (0..s.edge_count())
                .find(|&e| s.edge_labels[e].name == k && s.edge_labels[e].orient == 1)
                .expect("every label has a positively oriented edge");
            let v = s.edge_vec(e);
            let c = s.owner(e);
            let end = s.edge_id(c.poly, c.vertex + 1);
            (s.ray_position(e, &v), s.ray_position(end, &(-v)))
        })
        .collect();
    let cone = s.cone_angle();
    Ok((0..s.basis_len).map(|i| (0..s.basis_len).map(|j| cone_term(rays[i].0, rays[i].1, rays[j].0, rays[j].1, cone)).collect()).collect())
}

pub fn homology_class(sc: &SaddleConnection, s: &SurfaceTemplate) -> HomologyClass {
    s.path_class(sc.start, &sc.edges(), sc.end)
}

/// `a^T B b` in exact integer arithmetic.
pub fn algebraic_intersection(a: &[i64], b: &[i64], m: &[Vec<i64>]) -> Result<i64> {
    if a.len() != m.len() {
        return Err(Error::Dimension(a.len(), m.len()));
    }
    if b.len() != m.len() {
        return Err(Error::Dimension(b.len(), m.len()));
    }
    Ok(a.iter().zip(m).map(|(x, row)| x * row.iter().zip(b).map(|(r, y)| r * y).sum::<i64>()).sum())
}

/// `B b`, so that repeated pairings against `b` are dot products.
pub fn pairing_vector(b: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(b).map(|(r, y)| r * y).sum()).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn pieces_with_twins(sc: &SaddleConnection, s: &SurfaceTemplate) -> Vec<Piece> {
    let mut pieces = sc.pieces(s);
    if sc.is_edge(s) {
        let e = s.edge_id(sc.start.poly, sc.start.vertex);
        let q = s.owner(s.partner(e));
        let a = s.vertex(q.poly, q.vertex + 1);
        pieces.push(Piece { poly: q.poly, a, b: a + sc.holonomy, t0: 0.0, t1: 1.0 });
    }
    pieces
}

fn distance_to_boundary(s: &SurfaceTemplate, poly: usize, p: &V2) -> (f64, f64) {
    let k = s.polygons[poly].len();
    let mut to_vertex = f64::INFINITY;
    let mut to_edge = f64::INFINITY;
    for i in 0..k {
        let a = s.vertex(poly, i);
        let b = s.vertex(poly, i + 1);
        to_vertex = to_vertex.min((p - a).norm());
        let d = b - a;
        let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        to_edge = to_edge.min((a + d * t - p).norm());
    }
    (to_vertex, to_edge)
}

struct InteriorCount {
    count: i64,
    near_edge: bool,
}

/// Signed transverse crossings away from the cone point. `shift` moves the
/// second connection sideways; `cone_radius` is the exclusion radius
/// around polygon vertices.
fn interior_crossings(a: &SaddleConnection, b: &SaddleConnection, s: &SurfaceTemplate, shift: f64, cone_radius: f64) -> InteriorCount {
    let sin = cross(&a.holonomy, &b.holonomy) / (a.length * b.length);
    if sin.abs() < EPS_PARALLEL {
        return InteriorCount { count: 0, near_edge: false };
    }
    let sign = if sin > 0.0 { 1 } else { -1 };
    let normal = V2::new(-b.holonomy.y, b.holonomy.x) / b.length * shift;
    let pa = pieces_with_twins(a, s);
    let pb: Vec<Piece> = pieces_with_twins(b, s).into_iter().map(|p| Piece { a: p.a + normal, b: p.b + normal, ..p }).collect();
    let tol = EPS_GEOM * s.diameter().max(1.0);
    let mut hits: Vec<(f64, f64, bool)> = Vec::new();
    for p in &pa {
        let dp = p.b - p.a;
        for q in pb.iter().filter(|q| q.poly == p.poly) {
            let dq = q.b - q.a;
            let denom = cross(&dp, &dq);
            let t = cross(&(q.a - p.a), &dq) / denom;
            let u = cross(&(q.a - p.a), &dp) / denom;
            let (ta, tb) = (tol / dp.norm(), tol / dq.norm());
            if t < -ta || t > 1.0 + ta || u < -tb || u > 1.0 + tb {
                continue;
            }
            let x = p.a + dp * t;
            let (to_vertex, to_edge) = distance_to_boundary(s, p.poly, &x);
            if to_vertex < cone_radius {
                continue;
            }
            hits.push((p.t0 + t * (p.t1 - p.t0), q.t0 + u * (q.t1 - q.t0), to_edge < tol));
        }
    }
    // A crossing on an edge shows up once from each side of the edge; one
    // sighting only means the edge test was ambiguous.
    hits.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut clusters: Vec<(f64, f64, bool, usize)> = Vec::new();
    for h in hits {
        match clusters.iter_mut().find(|c| (c.0 - h.0).abs() < 1e-7 && (c.1 - h.1).abs() < 1e-7) {
            Some(c) => {
                c.2 |= h.2;
                c.3 += 1;
            }
            None => clusters.push((h.0, h.1, h.2, 1)),
        }
    }
    let near_edge = clusters.iter().any(|c| c.2 && c.3 == 1);
    InteriorCount { count: sign * clusters.len() as i64, near_edge }
}

/// Geometric count of `Int(a, b)`: signed transverse crossings in the
/// interior plus the interleaving term at the cone point.
///
/// When an interior crossing sits on a polygon edge the count is redone
/// with `b` pushed sideways by a small offset; a second degenerate result
/// is an error.
pub fn geometric_signed_crossings(a: &SaddleConnection, b: &SaddleConnection, s: &SurfaceTemplate) -> Result<i64> {
    let tol = EPS_GEOM * s.diameter().max(1.0);
    let first = interior_crossings(a, b, s, 0.0, tol);
    let interior = if first.near_edge {
        let retry = interior_crossings(a, b, s, PERTURB_DELTA, 1e3 * PERTURB_DELTA);
        if retry.near_edge {
            return Err(Error::DegenerateCrossing);
        }
        retry.count
    } else {
        first.count
    };
    Ok(interior + cone_term(a.start_ray, a.end_ray, b.start_ray, b.end_ray, s.cone_angle()))
}

/// Angle between the outgoing and the returning ray of a connection,
/// counterclockwise from the outgoing one, in units of `pi`. For a
/// connection in a periodic direction this is odd.
pub fn singularity_angle_index(sc: &SaddleConnection, s: &SurfaceTemplate) -> u64 {
    let c = s.cone_angle();
    let d = (sc.end_ray - sc.start_ray).rem_euclid(c);
    (d / PI).round() as u64
}
