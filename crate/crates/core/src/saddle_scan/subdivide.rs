use serde::Serialize;

use super::enumerate::SaddleConnection;
use super::sectors::{on_sector_boundary, sector_of, TransitionDiagram};
use crate::error::{Error, Result};
use crate::flat_core::{Model, SurfaceTemplate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SegmentKind {
    /// The connection is not cut at all.
    Whole,
    Initial,
    Final,
    /// Runs between two cuts without crossing a side.
    NonSandwiched,
    /// Crosses the sandwiched side `inner` once, between two crossings of
    /// its sandwiching side `outer`.
    Sandwiched {
        outer: usize,
        inner: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Segment {
    pub kind: SegmentKind,
    /// Start and end as fractions of the connection.
    pub t0: f64,
    pub t1: f64,
    pub length: f64,
}

/// Cut a connection on the double n-gon at each crossing of a side that
/// is not sandwiched in the sector of its direction. `diagrams` holds the
/// transition diagram of every sector, indexed by sector.
pub fn subdivide(sc: &SaddleConnection, s: &SurfaceTemplate, diagrams: &[TransitionDiagram]) -> Result<Vec<Segment>> {
    if s.model != Model::Double {
        return Err(Error::NotDoubleNgon);
    }
    let whole = || vec![Segment { kind: SegmentKind::Whole, t0: 0.0, t1: 1.0, length: sc.length }];
    if on_sector_boundary(s.n, &sc.holonomy) {
        if !sc.crossings.is_empty() {
            return Err(Error::BoundaryCrossing);
        }
        return Ok(whole());
    }
    let sector = sector_of(s.n, &sc.holonomy);
    let diagram = diagrams.get(sector).filter(|d| d.sector == sector).ok_or(Error::Diagram(sector))?;
    let pieces = sc.pieces(s);
    // (fraction along the connection, label) of each crossing
    let hits: Vec<(f64, usize)> = sc.crossings.iter().zip(&pieces).map(|(c, p)| (p.t1, s.edge_labels[c.edge].name)).collect();
    let mut cuts = vec![0.0];
    let mut cut_labels = vec![None];
    for &(t, l) in &hits {
        if !diagram.is_sandwiched(l) {
            cuts.push(t);
            cut_labels.push(Some(l));
        }
    }
    cuts.push(1.0);
    cut_labels.push(None);
    let k = cuts.len() - 1;
    if k == 1 {
        return Ok(whole());
    }
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let (t0, t1) = (cuts[i], cuts[i + 1]);
        let inside: Vec<usize> = hits.iter().filter(|&&(t, _)| t > t0 && t < t1).map(|&(_, l)| l).collect();
        let kind = if i == 0 {
            SegmentKind::Initial
        } else if i + 1 == k {
            SegmentKind::Final
        } else {
            match inside.as_slice() {
                [] => SegmentKind::NonSandwiched,
                [e] => {
                    let outer = cut_labels[i].expect("interior cut");
                    if diagram.sandwiching(*e) != Some(outer) || cut_labels[i + 1] != Some(outer) {
                        return Err(Error::Diagram(sector));
                    }
                    SegmentKind::Sandwiched { outer, inner: *e }
                }
                _ => return Err(Error::Diagram(sector)),
            }
        };
        out.push(Segment { kind, t0, t1, length: (t1 - t0) * sc.length });
    }
    Ok(out)
}
