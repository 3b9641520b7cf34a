//! Exact-rational computable measure theory on Cantor space.
//!
//! Measures are cylinder valuations `σ ↦ μ(σ)` in exact rationals, maps are
//! monotone word transducers, and every limit quantity is reported as a
//! nested rational enclosure. The [`transport`] module builds the staged
//! mass-transport map that pushes the fair coin onto `μ` while avoiding a
//! chosen point.

#![allow(clippy::result_large_err)]

pub mod extractors;
pub mod interval;
pub mod machine;
pub mod martingale;
pub mod measure;
pub mod point;
pub mod rational;
pub mod syntax;
pub mod transport;
pub mod word;

pub use interval::RatInterval;
pub use machine::{MonotoneMachine, PreimageReport};
pub use martingale::{ConditionalApprox, Martingale};
pub use measure::{ClopenSet, ClosedSetApprox, CylinderMeasure, ProductCylinderMeasure, StepFunction};
pub use point::PointOracle;
pub use rational::{Frac, Rat};
pub use transport::{TracedPoint, TransportPlan, TransportStage, WitnessInstance};
pub use word::BinWord;
pub use extractors::{SelectionStrategy, SequenceSetFamily};
