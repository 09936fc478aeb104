use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance::EPS_GEOM;

pub type V2 = Vector2<f64>;

pub fn cross(a: &V2, b: &V2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counterclockwise angle from `a` to `b`, in `[0, 2pi)`.
pub fn ccw_angle(a: &V2, b: &V2) -> f64 {
    let t = cross(a, b).atan2(a.dot(b));
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

pub fn rotate(v: &V2, theta: f64) -> V2 {
    let (s, c) = theta.sin_cos();
    V2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Double,
    Staircase,
    Fixture,
}

/// Name and orientation of one polygon edge. `orient` is +1 when the
/// counterclockwise traversal of the edge agrees with the named cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeTag {
    pub name: usize,
    pub orient: i8,
}

#[derive(Clone, Debug)]
pub struct Singularity {
    /// Corner ids in counterclockwise order around the cone point.
    pub corners: Vec<usize>,
    pub cone_angle: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub poly: usize,
    pub vertex: usize,
}

/// Part of a straight segment inside one polygon, in that polygon's
/// coordinates. `t0..t1` is the matching parameter range of the segment.
#[derive(Clone, Copy, Debug)]
pub struct Piece {
    pub poly: usize,
    pub a: V2,
    pub b: V2,
    pub t0: f64,
    pub t1: f64,
}

/// Convex polygons with edges glued in pairs by translation.
///
/// Edges and corners share one global numbering: id `offsets[p] + i` is
/// both edge `i` of polygon `p` (from vertex `i` to `i + 1`) and the corner
/// at vertex `i`. Names below `basis_len` are the labelled cycles the
/// homology coordinates refer to; the rest are cut edges internal to a
/// model, whose classes are solved from the cell relations.
#[derive(Clone, Debug)]
pub struct SurfaceTemplate {
    /// Odd parameter of the model; 0 for test fixtures.
    pub n: usize,
    pub model: Model,
    pub polygons: Vec<Vec<V2>>,
    pub gluings: Vec<(usize, usize)>,
    pub edge_labels: Vec<EdgeTag>,
    pub names: Vec<String>,
    pub basis_len: usize,
    pub singularities: Vec<Singularity>,
    offsets: Vec<usize>,
    owner: Vec<Corner>,
    partner: Vec<usize>,
    edge_class: Vec<Vec<i64>>,
    corner_angle: Vec<f64>,
    corner_start: Vec<f64>,
}

impl SurfaceTemplate {
    pub fn from_parts(
        n: usize,
        model: Model,
        polygons: Vec<Vec<V2>>,
        gluings: Vec<(usize, usize)>,
        edge_labels: Vec<EdgeTag>,
        names: Vec<String>,
        basis_len: usize,
    ) -> Result<Self> {
        let mut offsets = Vec::with_capacity(polygons.len());
        let mut owner = Vec::new();
        for (p, poly) in polygons.iter().enumerate() {
            offsets.push(owner.len());
            for v in 0..poly.len() {
                owner.push(Corner { poly: p, vertex: v });
            }
        }
        let edges = owner.len();
        if edge_labels.len() != edges {
            return Err(Error::Dimension(edge_labels.len(), edges));
        }
        let mut partner = vec![usize::MAX; edges];
        for &(a, b) in &gluings {
            if a >= edges || b >= edges || a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::GluingMismatch(a, b));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if let Some(e) = partner.iter().position(|&p| p == usize::MAX) {
            return Err(Error::GluingMismatch(e, e));
        }

        let mut s = SurfaceTemplate {
            n,
            model,
            polygons,
            gluings,
            edge_labels,
            names,
            basis_len,
            singularities: Vec::new(),
            offsets,
            owner,
            partner,
            edge_class: Vec::new(),
            corner_angle: Vec::new(),
            corner_start: vec![0.0; edges],
        };

        let scale = s.diameter().max(1.0);
        for &(a, b) in &s.gluings {
            if (s.edge_vec(a) + s.edge_vec(b)).norm() > EPS_GEOM * scale {
                return Err(Error::GluingMismatch(a, b));
            }
        }

        s.corner_angle = (0..edges)
            .map(|c| {
                let e = s.edge_vec(c);
                let prev = s.edge_vec(s.prev_edge(c));
                ccw_angle(&e, &(-prev))
            })
            .collect();

        // Walk counterclockwise around each vertex class: leaving corner c
        // across the edge before it lands on the corner that edge is glued to.
        let mut seen = vec![false; edges];
        for c0 in 0..edges {
            if seen[c0] {
                continue;
            }
            let mut corners = Vec::new();
            let mut pos = 0.0;
            let mut c = c0;
            while !seen[c] {
                seen[c] = true;
                s.corner_start[c] = pos;
                pos += s.corner_angle[c];
                corners.push(c);
                c = s.partner[s.prev_edge(c)];
            }
            s.singularities.push(Singularity { corners, cone_angle: pos });
        }
        if s.singularities.len() != 1 {
            return Err(Error::VertexClasses(s.singularities.len()));
        }
        if matches!(model, Model::Double | Model::Staircase) {
            let expected = 2.0 * PI * (n as f64 - 2.0);
            let got = s.cone_angle();
            if (got - expected).abs() > 1e-7 {
                return Err(Error::ConeAngle { expected, got });
            }
        }
        let area = s.area();
        if area <= 0.0 {
            return Err(Error::Area(area));
        }
        s.edge_class = s.solve_edge_classes()?;
        Ok(s)
    }

    fn solve_edge_classes(&self) -> Result<Vec<Vec<i64>>> {
        let edges = self.edge_count();
        let mut class: Vec<Option<Vec<i64>>> = (0..edges)
            .map(|e| {
                let tag = self.edge_labels[e];
                (tag.name < self.basis_len).then(|| {
                    let mut v = vec![0i64; self.basis_len];
                    v[tag.name] = tag.orient as i64;
                    v
                })
            })
            .collect();
        loop {
            let mut progress = false;
            let mut pending = false;
            for p in 0..self.polygons.len() {
                let ids: Vec<usize> = (0..self.polygons[p].len()).map(|i| self.edge_id(p, i)).collect();
                let unknown: Vec<usize> = ids.iter().copied().filter(|&e| class[e].is_none()).collect();
                if unknown.is_empty() {
                    continue;
                }
                pending = true;
                if unknown.len() == 1 {
                    let mut v = vec![0i64; self.basis_len];
                    for &e in &ids {
                        if let Some(c) = &class[e] {
                            for (x, y) in v.iter_mut().zip(c) {
                                *x -= y;
                            }
                        }
                    }
                    let u = unknown[0];
                    class[self.partner[u]] = Some(v.iter().map(|x| -x).collect());
                    class[u] = Some(v);
                    progress = true;
                }
            }
            if !pending {
                break;
            }
            if !progress {
                return Err(Error::CutClasses);
            }
        }
        Ok(class.into_iter().map(|c| c.expect("solved")).collect())
    }

    pub fn edge_count(&self) -> usize {
        self.owner.len()
    }

    pub fn edge_id(&self, poly: usize, idx: usize) -> usize {
        self.offsets[poly] + idx % self.polygons[poly].len()
    }

    pub fn owner(&self, id: usize) -> Corner {
        self.owner[id]
    }

    pub fn partner(&self, id: usize) -> usize {
        self.partner[id]
    }

    pub fn prev_edge(&self, id: usize) -> usize {
        let c = self.owner[id];
        let len = self.polygons[c.poly].len();
        self.edge_id(c.poly, c.vertex + len - 1)
    }

    pub fn vertex(&self, poly: usize, idx: usize) -> V2 {
        let p = &self.polygons[poly];
        p[idx % p.len()]
    }

    pub fn edge_vec(&self, id: usize) -> V2 {
        let c = self.owner[id];
        self.vertex(c.poly, c.vertex + 1) - self.vertex(c.poly, c.vertex)
    }

    pub fn edge_class(&self, id: usize) -> &[i64] {
        &self.edge_class[id]
    }

    pub fn label(&self, id: usize) -> &str {
        &self.names[self.edge_labels[id].name]
    }

    /// Whether the edge carries one of the labelled basis cycles.
    pub fn is_labelled(&self, id: usize) -> bool {
        self.edge_labels[id].name < self.basis_len
    }

    pub fn corner_angle(&self, id: usize) -> f64 {
        self.corner_angle[id]
    }

    pub fn cone_angle(&self) -> f64 {
        self.singularities[0].cone_angle
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(|p| polygon_area(p)).sum()
    }

    pub fn diameter(&self) -> f64 {
        self.polygons.iter().flat_map(|p| p.iter().flat_map(move |a| p.iter().map(move |b| (a - b).norm()))).fold(0.0, f64::max)
    }

    /// Position, in `[0, cone angle)`, of the ray leaving corner `corner`
    /// in direction `dir`. The direction must lie in the closed corner.
    pub fn ray_position(&self, corner: usize, dir: &V2) -> f64 {
        let mut a = ccw_angle(&self.edge_vec(corner), dir);
        if a > self.corner_angle[corner] + 1e-6 {
            a -= 2.0 * PI;
        }
        (self.corner_start[corner] + a).rem_euclid(self.cone_angle())
    }

    /// Corner containing the ray at `pos`, and its unit direction.
    pub fn locate_ray(&self, pos: f64) -> (usize, V2) {
        let pos = pos.rem_euclid(self.cone_angle());
        let sing = &self.singularities[0];
        // Corners are stored in increasing order of their start position.
        let c = sing.corners.iter().copied().take_while(|&c| self.corner_start[c] <= pos + 1e-15).last().unwrap_or(sing.corners[0]);
        let e = self.edge_vec(c).normalize();
        (c, rotate(&e, pos - self.corner_start[c]))
    }

    /// Corners whose half-open wedge `[first edge, next edge)` holds `dir`.
    pub fn corners_containing(&self, dir: &V2) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&c| {
                let a = ccw_angle(&self.edge_vec(c), dir);
                a < self.corner_angle[c] - 1e-12 || a > 2.0 * PI - 1e-12
            })
            .collect()
    }

    /// Homology class of the path leaving `start`, crossing the listed
    /// edges (ids of the edges exited), and ending at corner `end`.
    ///
    /// Each crossing point is slid along its edge to the edge's first
    /// vertex, so the path becomes a chain of polygon boundary arcs.
    pub fn path_class(&self, start: Corner, crossings: &[usize], end: Corner) -> Vec<i64> {
        let mut v = vec![0i64; self.basis_len];
        let mut poly = start.poly;
        let mut at = start.vertex;
        for &e in crossings {
            let c = self.owner[e];
            debug_assert_eq!(c.poly, poly);
            self.add_arc(&mut v, poly, at, c.vertex);
            let q = self.owner[self.partner[e]];
            poly = q.poly;
            at = (q.vertex + 1) % self.polygons[poly].len();
        }
        self.add_arc(&mut v, poly, at, end.vertex);
        v
    }

    fn add_arc(&self, v: &mut [i64], poly: usize, from: usize, to: usize) {
        let len = self.polygons[poly].len();
        let mut i = from % len;
        while i != to % len {
            for (x, y) in v.iter_mut().zip(&self.edge_class[self.edge_id(poly, i)]) {
                *x += y;
            }
            i = (i + 1) % len;
        }
    }

    /// Split the segment leaving `start` with holonomy `hol` and crossing
    /// the listed edges into its pieces, one per polygon visited.
    pub fn develop(&self, start: Corner, hol: &V2, crossings: &[usize]) -> Vec<Piece> {
        let mut pieces = Vec::with_capacity(crossings.len() + 1);
        let s = self.vertex(start.poly, start.vertex);
        let mut poly = start.poly;
        let mut off = V2::zeros();
        let mut t_prev = 0.0;
        for &e in crossings {
            let c = self.owner[e];
            let a = self.vertex(c.poly, c.vertex) + off;
            let ev = self.edge_vec(e);
            let t = cross(&(a - s), &ev) / cross(hol, &ev);
            pieces.push(Piece { poly, a: s + hol * t_prev - off, b: s + hol * t - off, t0: t_prev, t1: t });
            let q = self.owner[self.partner[e]];
            off = self.vertex(c.poly, c.vertex + 1) + off - self.vertex(q.poly, q.vertex);
            poly = q.poly;
            t_prev = t;
        }
        pieces.push(Piece { poly, a: s + hol * t_prev - off, b: s + hol - off, t0: t_prev, t1: 1.0 });
        pieces
    }

    /// Image of the template under a linear map with positive determinant.
    pub fn apply_matrix(&self, m: &Matrix2<f64>) -> Result<SurfaceTemplate> {
        let det = m.determinant();
        if !det.is_finite() || det <= 1e-300 {
            return Err(Error::BadMatrix(det));
        }
        let polygons = self.polygons.iter().map(|p| p.iter().map(|v| m * v).collect()).collect();
        SurfaceTemplate::from_parts(
            self.n,
            self.model,
            polygons,
            self.gluings.clone(),
            self.edge_labels.clone(),
            self.names.clone(),
            self.basis_len,
        )
    }
}

pub fn polygon_area(p: &[V2]) -> f64 {
    let k = p.len();
    (0..k).map(|i| cross(&p[i], &p[(i + 1) % k])).sum::<f64>() / 2.0
}
