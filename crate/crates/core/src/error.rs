use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate box on axis {axis}: lo={lo}, hi={hi}")]
    DegenerateBox { axis: usize, lo: f64, hi: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(&'static str),
    #[error("element index out of range")]
    ElementOutOfRange,
    #[error("sub-box exceeds its element on axis {axis}")]
    SubBoxOutsideElement { axis: usize },
    #[error("polynomial degree {0} is not supported here")]
    UnsupportedDegree(usize),
    #[error("unsupported basis: {0}")]
    UnsupportedBasis(&'static str),
    #[error("invalid level configuration: {0}")]
    InvalidLevels(&'static str),
    #[error("overlay level {0} is not contained in the domain")]
    OverlayOutsideDomain(usize),
    #[error("level {0} is not a nested dyadic refinement of its parent")]
    NonNested(usize),
    #[error("face (axis {axis}, upper={upper}) is not on the domain boundary")]
    FaceNotOnBoundary { axis: usize, upper: bool },
    #[error("gauss rule with {0} points is out of range 1..=64")]
    GaussPoints(usize),
    #[error("region references mesh {0}, which is not part of the space")]
    UnknownMesh(usize),
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(&'static str),
}
