use thiserror::Error;

use crate::geometry::Far;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("transmitter coincides with the center of {0}")]
    ZeroRadialDistance(Far),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("slot index {slot} out of range for {len} taps")]
    Index { slot: usize, len: usize },

    #[error("hypothesis statistics for slots {0} and {1} cannot be combined")]
    MismatchedSlot(usize, usize),

    #[error("degenerate hypothesis statistics: {0}")]
    DegenerateStats(&'static str),

    #[error("samples contain only one class")]
    SingleClass,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
