use thiserror::Error;

/// Errors raised by the dynamical, geometric and representation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("odometer carry ran past the {depth} stored digits")]
    DepthExhausted { depth: usize },
    #[error("iteration count {requested} exceeds the budget {budget}")]
    BudgetExceeded { requested: i64, budget: i64 },
    #[error("region is empty")]
    EmptyRegion,
    #[error("point lies outside the domain of chart tuple {tuple:?}")]
    PointOutsideDomain { tuple: Vec<usize> },
    #[error("no chart covers the point")]
    NoChartCoversPoint,
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("Y is not covered by returns within the horizon {horizon}")]
    MaxReturnExceeded { horizon: u32 },
    #[error("boundary comparison fell inside the comparison tolerance: {context}")]
    BoundaryAmbiguous { context: String },
    #[error("itinerary overshoots the tower height: partial sum {sum} > {height}")]
    ItinerarySumMismatch { sum: u32, height: u32 },
    #[error("matrix size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix fields live on different domains")]
    DomainMismatch,
    #[error("word is not homogeneous")]
    InhomogeneousWord,
    #[error("target field does not have the requested structure: {0}")]
    StructureMismatch(String),
    #[error("target field does not vanish on the glue boundary (residual {residual:e})")]
    VanishingPreconditionViolated { residual: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
