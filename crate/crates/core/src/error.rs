use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("euclidean metric requested for a point set containing infinity")]
    EuclideanInfinity,
    #[error("point set is empty")]
    EmptySet,
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("exponent at position {position} is not a nonnegative integer")]
    NonIntegerExponent { position: usize },
    #[error("map degree {degree} is below 2")]
    DegreeTooLow { degree: usize },
    #[error("denominator is identically zero")]
    ZeroDenominator,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("root finding did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    DidNotConverge {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("parabolic cycle suspected: period {period}, multiplier modulus {multiplier:.6}")]
    ParabolicSuspected { period: usize, multiplier: f64 },
    #[error("no critical orbit converged to an attracting cycle within {budget} iterations")]
    NoAttractorFound { budget: usize },
    #[error("map degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("grid must be at least 16x16 cells, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("root quadruple violates the Descartes identity (relative residual {residual:e})")]
    InvalidRoot { residual: f64 },
    #[error("curvatures ({0}, {1}, {2}) do not admit a real tangent circle")]
    ComplexConfiguration(f64, f64, f64),
    #[error("carpet level {0} outside 1..=12")]
    LevelOutOfRange(u32),
    #[error("resolution {resolution} is not a positive multiple of 3^{levels}")]
    ResolutionNotMultiple { resolution: usize, levels: u32 },
    #[error("max curvature {max} does not exceed the root curvatures")]
    BoundTooSmall { max: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("packing has no curves")]
    EmptyPacking,
    #[error("x must be positive, got {0}")]
    NonpositiveX(f64),
    #[error("insufficient scales: {samples} samples with {distinct} distinct counts")]
    InsufficientScales { samples: usize, distinct: usize },
    #[error("epsilon {eps} is below twice the cell width {cell}")]
    EpsilonBelowResolution { eps: f64, cell: f64 },
    #[error("need at least {needed} points for a fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomogeneityError {
    #[error("component has no interior")]
    DegenerateComponent,
    #[error("curves {0} and {1} touch; relative separation is inapplicable (use fatness instead)")]
    TangentCurves(u64, u64),
    #[error("need at least two curves with geometry")]
    TooFewCurves,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("raster: {0}")]
    Raster(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
