//! Channel model and detection analytics for a diffusive molecular link with
//! one point transmitter and two fully-absorbing spherical receivers, plus
//! the Monte-Carlo oracles used to check them.

pub mod channel;
pub mod detection;
pub mod error;
pub mod geometry;
pub mod link;
pub mod particle;
pub mod quadrature;
pub mod rng;
pub mod scenario;
pub mod special;
pub mod validate;

pub use channel::{Channel, SeriesConfig, SplitComparison, TapVector};
pub use error::{Error, Result};
pub use geometry::{derive_geometry, Far, FarGeometry};
pub use scenario::Scenario;
