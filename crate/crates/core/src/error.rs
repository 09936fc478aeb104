use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("n must be odd and at least 5, got {0}")]
    InvalidN(usize),

    #[error("matrix must have positive determinant, got {0}")]
    BadMatrix(f64),

    #[error("glued edges {0} and {1} do not have opposite holonomy")]
    GluingMismatch(usize, usize),

    #[error("template has {0} vertex classes, expected exactly one")]
    VertexClasses(usize),

    #[error("cone angle {got} differs from the expected {expected}")]
    ConeAngle { expected: f64, got: f64 },

    #[error("template has non-positive area {0}")]
    Area(f64),

    #[error("cut edge classes could not be solved from the cell relations")]
    CutClasses,

    #[error("enumeration frontier exceeded the cap of {cap} developed polygons")]
    Budget { cap: usize },

    #[error("separatrix in direction {angle} did not reach the singularity within length {bound}")]
    NotPeriodic { angle: f64, bound: f64 },

    #[error("trace in direction {angle} exceeded the step budget of {cap}")]
    TraceBudget { angle: f64, cap: usize },

    #[error("the two directions coincide")]
    SameDirection,

    #[error("no saddle connections below length {lmax} in the {which} direction")]
    NoCandidates { lmax: f64, which: &'static str },

    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("degenerate crossing between saddle connections survived the perturbation retry")]
    DegenerateCrossing,

    #[error("a saddle connection in a sector-boundary direction crosses a side")]
    BoundaryCrossing,

    #[error("traced crossings for sector {0} do not form a linear order")]
    Diagram(usize),

    #[error("operation needs a double n-gon template")]
    NotDoubleNgon,

    #[error("reduction of {x}+{y}i did not terminate within {cap} steps")]
    ReductionCap { x: f64, y: f64, cap: usize },

    #[error("point is not in the upper half-plane: y = {0}")]
    NotUpperHalfPlane(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
