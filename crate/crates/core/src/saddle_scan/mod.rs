//! Saddle connections up to a length bound, direction sectors of the
//! double n-gon, transition diagrams and the sandwich subdivision.

mod enumerate;
mod sectors;
mod subdivide;

pub use enumerate::{
    distinct_angles, enumerate_saddle_connections, enumerate_with_cap, periodic_directions, projective_angle, Crossing, SaddleConnection,
    DEFAULT_CAP,
};
pub use sectors::{
    all_diagrams, all_diagrams_on, on_sector_boundary, sector_midpoint, sector_of, traced_labels, transition_diagram,
    transition_diagram_on, TransitionDiagram,
};
pub use subdivide::{subdivide, Segment, SegmentKind};
