use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: f64 },
    #[error("vector is not timelike")]
    NotTimelike,
    #[error("points are not on the hyperboloid (pairing {pairing})")]
    NotOnHyperboloid { pairing: f64 },
    #[error("geodesic endpoints coincide")]
    CoincidentEndpoints,
    #[error("point lies on a leaf")]
    OnLeaf,
    #[error("genus must be at least {min}, got {genus}")]
    BadGenus { genus: usize, min: usize },
    #[error("generator index {index} out of range 1..={count}")]
    GeneratorOutOfRange { index: i32, count: usize },
    #[error("cannot parse word {0:?}")]
    BadWord(String),
    #[error("element is not hyperbolic (trace {trace})")]
    NotHyperbolic { trace: f64 },
    #[error("relator residual {residual} exceeds tolerance")]
    RelatorNotSatisfied { residual: f64 },
    #[error("lifted relator is not an integer translation (offset {offset})")]
    EulerNotInteger { offset: f64 },
    #[error("angle tracking degenerate: {0}")]
    DegenerateTracking(String),
    #[error("lift enumeration did not stabilize within radius cap {cap}")]
    CapOverflow { cap: usize },
    #[error("multicurve is not disjoint")]
    NotDisjoint,
    #[error("weights must be positive, got {0}")]
    BadWeight(f64),
    #[error("parameters are dependent (determinant {det})")]
    DependentParameters { det: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {0} is not on the quadric")]
    OffQuadric(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("circle map is not monotone: {0}")]
    NotMonotone(String),
    #[error("no disjoint spacelike plane found within the search cap")]
    PlaneSearchFailed,
    #[error("convex hull is flat")]
    FlatHull,
    #[error("null face encountered where a spacelike one is required")]
    NullFace,
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("input error: {0}")]
    Input(String),
}
