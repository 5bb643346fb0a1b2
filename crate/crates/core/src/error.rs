use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("letter {letter} outside alphabet of size {n}")]
    BadLetter { letter: usize, n: usize },
    #[error("multinomial count overflows u64")]
    Overflow,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not invariant (residual {residual:.3e})")]
    NotInvariant { residual: f64 },
    #[error("restricted tuple is not isometric on the requested window (residual {residual:.3e})")]
    NotIsometric { residual: f64 },
    #[error("operator does not intertwine the shifts (residual {residual:.3e})")]
    NotModuleMap { residual: f64 },
    #[error("operator does not commute with the tuple (residual {residual:.3e})")]
    NotInCommutant { residual: f64 },
    #[error("ranges differ (distance {distance:.3e})")]
    RangesDiffer { distance: f64 },
    #[error("recovered map is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("ideal generates the whole truncated space")]
    DegenerateIdeal,
    #[error("check not applicable: {0}")]
    Inapplicable(String),
    #[error("point lies outside the open unit ball (norm {norm})")]
    OutsideBall { norm: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
