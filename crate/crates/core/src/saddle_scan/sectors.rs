use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use super::enumerate::projective_angle;
use crate::error::{Error, Result};
use crate::flat_core::{build_double_ngon, SurfaceTemplate, V2};
use crate::tolerance::EPS_DIR;

/// Sectors have width `pi / n` and are numbered clockwise. Sector 0 runs
/// from the horizontal side `e1` clockwise to the next side direction, so
/// sector `i` is the closed arc of angles `[pi - (i+1) pi/n, pi - i pi/n]`
/// taken modulo `pi`.
fn sector_coordinate(n: usize, d: &V2) -> f64 {
    let phi = projective_angle(d);
    let psi = if phi == 0.0 { 0.0 } else { PI - phi };
    psi / (PI / n as f64)
}

/// Index of the closed sector holding direction `d`; a direction on the
/// boundary of two sectors goes to the lower index.
pub fn sector_of(n: usize, d: &V2) -> usize {
    let x = sector_coordinate(n, d);
    let k = x.round();
    if (x - k).abs() * PI / n as f64 <= EPS_DIR {
        let k = k as usize;
        return if k == 0 || k == n { 0 } else { k - 1 };
    }
    (x.floor() as usize).min(n - 1)
}

/// Whether `d` lies on the boundary between two sectors.
pub fn on_sector_boundary(n: usize, d: &V2) -> bool {
    let x = sector_coordinate(n, d);
    (x - x.round()).abs() * PI / n as f64 <= EPS_DIR
}

/// Unit vector through the middle of sector `i`.
pub fn sector_midpoint(n: usize, i: usize) -> V2 {
    let phi = PI - (i as f64 + 0.5) * PI / n as f64;
    V2::new(phi.cos(), phi.sin())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionDiagram {
    pub n: usize,
    pub sector: usize,
    /// Side labels in diagram order.
    pub order: Vec<usize>,
    /// (sandwiched side, sandwiching side) at the two ends of the diagram.
    pub sandwiched: [(usize, usize); 2],
}

impl TransitionDiagram {
    pub fn row(&self) -> String {
        self.order.iter().map(|k| format!("e{k}")).collect::<Vec<_>>().join(" ")
    }

    pub fn is_sandwiched(&self, label: usize) -> bool {
        self.sandwiched.iter().any(|&(s, _)| s == label)
    }

    pub fn sandwiching(&self, label: usize) -> Option<usize> {
        self.sandwiched.iter().find(|&&(s, _)| s == label).map(|&(_, t)| t)
    }

    /// Whether consecutive labels of the sequence are neighbours in the diagram.
    pub fn admits(&self, labels: &[usize]) -> bool {
        let pos = |l: usize| self.order.iter().position(|&x| x == l);
        labels.windows(2).all(|w| match (pos(w[0]), pos(w[1])) {
            (Some(a), Some(b)) => a.abs_diff(b) == 1,
            _ => false,
        })
    }
}

/// Labels met by a straight segment of length `max_len` in direction `u`,
/// starting at fraction `f` of edge `edge` and heading into its polygon.
pub fn traced_labels(s: &SurfaceTemplate, edge: usize, f: f64, u: &V2, max_len: f64) -> Result<Vec<usize>> {
    let c = s.owner(edge);
    let ev = s.edge_vec(edge);
    // The polygon lies to the left of its counterclockwise edges.
    let dir = if crate::flat_core::cross(&ev, u) > 0.0 { *u } else { -u };
    let start = s.vertex(c.poly, c.vertex) + ev * f;
    let mut labels = vec![s.edge_labels[edge].name];
    let tr = s.trace_from_point(c.poly, start, &dir, Some(edge), max_len, 1_000_000)?;
    labels.extend(tr.crossings.iter().map(|&e| s.edge_labels[e].name));
    Ok(labels)
}

/// Transition diagram of a sector, read off from traced segments.
///
/// Segments through the middle direction of the sector are followed from
/// sample points on every side; the pairs of consecutively crossed sides
/// form a path, oriented to start at the side whose direction bounds the
/// sector on its counterclockwise end.
pub fn transition_diagram(n: usize, sector: usize) -> Result<TransitionDiagram> {
    let s = build_double_ngon(n)?;
    transition_diagram_on(&s, sector)
}

pub fn transition_diagram_on(s: &SurfaceTemplate, sector: usize) -> Result<TransitionDiagram> {
    let n = s.n;
    let u = sector_midpoint(n, sector);
    let mut pairs = BTreeSet::new();
    for e in 0..s.edge_count() {
        for j in 0..8 {
            let f = (j as f64 + 0.5) / 8.0;
            let labels = traced_labels(s, e, f, &u, 2.0 * n as f64)?;
            for w in labels.windows(2) {
                pairs.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    // The side parallel to the counterclockwise boundary of the sector.
    let boundary = PI - sector as f64 * PI / n as f64;
    let first = (0..s.edge_count())
        .filter(|&e| s.edge_labels[e].orient == 1)
        .find(|&e| {
            let a = projective_angle(&s.edge_vec(e));
            let d = (a - boundary).rem_euclid(PI);
            d.min(PI - d) < 1e-9
        })
        .map(|e| s.edge_labels[e].name)
        .ok_or(Error::Diagram(sector))?;
    if pairs.len() != n - 1 || adj.iter().any(|a| a.len() > 2) || adj[first].len() != 1 {
        return Err(Error::Diagram(sector));
    }
    let mut order = vec![first];
    while order.len() < n {
        let last = order[order.len() - 1];
        let prev = if order.len() >= 2 { Some(order[order.len() - 2]) } else { None };
        let next = adj[last].iter().copied().find(|&x| Some(x) != prev).ok_or(Error::Diagram(sector))?;
        order.push(next);
    }
    let sandwiched = [(order[0], order[1]), (order[n - 1], order[n - 2])];
    Ok(TransitionDiagram { n, sector, order, sandwiched })
}

/// All `n` transition diagrams of the double n-gon.
pub fn all_diagrams(n: usize) -> Result<Vec<TransitionDiagram>> {
    all_diagrams_on(&build_double_ngon(n)?)
}

pub fn all_diagrams_on(s: &SurfaceTemplate) -> Result<Vec<TransitionDiagram>> {
    (0..s.n).map(|i| transition_diagram_on(s, i)).collect()
}
