use thiserror::Error;

/// Errors produced while building domains, solving the boundary integral
/// equation or assembling bubble solutions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("circles {first} and {second} overlap or are closer than the minimum gap (gap {gap:.3e}, required {min_gap:.3e})")]
    Overlap {
        first: usize,
        second: usize,
        gap: f64,
        min_gap: f64,
    },
    #[error("circle {index} is not strictly inside the unit disk (|z|+r = {reach:.6}, min gap {min_gap:.3e})")]
    Outside {
        index: usize,
        reach: f64,
        min_gap: f64,
    },
    #[error("circle {index} has non-positive radius {radius}")]
    BadRadius { index: usize, radius: f64 },
    #[error("{centers} centers but {radii} radii")]
    CountMismatch { centers: usize, radii: usize },
    #[error("bad node count n = {n}: {reason}")]
    BadN { n: usize, reason: &'static str },
    #[error("base point alpha = {re}{im:+}i is not strictly inside the circular domain")]
    AlphaOutside { re: f64, im: f64 },
    #[error("expected {expected} slit angles, got {got}")]
    ThetaLength { expected: usize, got: usize },
    #[error("slit angle {angle} on component {component} is not 0 or pi/2")]
    UnsupportedAngle { component: usize, angle: f64 },
    #[error("nodes {p} and {q} lie on different boundary components")]
    DifferentComponent { p: usize, q: usize },
    #[error("vector length {got} does not match the {expected} boundary nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("linear system has zero dimension")]
    ZeroDimension,
    #[error("Arnoldi breakdown after {iterations} iterations with relative residual {residual:.3e}")]
    Breakdown { iterations: usize, residual: f64 },
    #[error("point {index} is not strictly inside the circular domain")]
    PointOutside { index: usize },
    #[error("point {index} is within {distance:.3e} of the pole at alpha")]
    PoleProximity { index: usize, distance: f64 },
    #[error("bubble speed U = {0} must exceed 1")]
    BadSpeed(f64),
    #[error("rescaling is not allowed in the channel geometry")]
    ScaleNotAllowed,
    #[error("bubble index {index} out of range ({count} bubbles)")]
    BadIndex { index: usize, count: usize },
    #[error("target area {0} must be positive")]
    BadArea(f64),
    #[error("streamline grid has no interior nodes (resolution {resolution}, margin {margin})")]
    EmptyGrid { resolution: usize, margin: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
