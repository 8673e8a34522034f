pub mod benchmarks;
pub mod corot;
pub mod correction;
pub mod csfd;
pub mod elements;
pub mod error;
pub mod frames;
pub mod io;
pub mod linalg;
pub mod rotkit;
pub mod sample;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use crate::benchmarks::Benchmark;
pub use crate::corot::Method;
pub use crate::correction::WeightCase;
pub use crate::elements::{DofLabel, ElementKind, Material, Regime, Section};
pub use crate::error::{Error, Result};
pub use crate::frames::FrameStrategy;
pub use crate::solver::{History, Model, SolverConfig};
