//! Numerical tolerances shared by the geometric predicates.

/// Geometric predicates: point-on-edge, vertex hits, gluing consistency.
pub const EPS_GEOM: f64 = 1e-9;

/// Comparison of projective directions, as angles in `[0, pi)`.
pub const EPS_DIR: f64 = 1e-10;

/// Grid used to round holonomy vectors into dedup keys.
pub const EPS_DEDUP: f64 = 1e-9;

/// Edge offset used when a crossing count has to be recomputed.
pub const PERTURB_DELTA: f64 = 1e-7;

/// Sine threshold below which two segments count as parallel.
pub const EPS_PARALLEL: f64 = 1e-12;
