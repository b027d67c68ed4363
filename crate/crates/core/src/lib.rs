//! Floquet quasienergies and time evolution of a two-level system in a
//! sinusoidal drive, computed from confluent Heun series.

pub mod cli;
pub mod dd;
pub mod error;
pub mod evolution;
pub mod floquet;
pub mod heun;
pub mod limits;
pub mod oracle;
pub mod params;
pub mod registry;
pub mod su2;
pub mod sweep;

pub use error::{Error, Result};
pub use floquet::{solve, FloquetSolution, MonodromyData, Quasienergy};
pub use heun::{Precision, SeriesControl};
pub use params::{DimensionalParams, PhysicalParams};
pub use su2::{EvolutionMatrix, Mat2, SpinorState};
