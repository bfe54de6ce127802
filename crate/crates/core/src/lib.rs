//! Exact computation of limits of twisted maps to torus quotients over a DVR.
//!
//! The generic fiber is a decorated dual graph with line-bundle degrees and
//! gluing matrices over `Q(t)` at the nodes that persist. The engine reads
//! Smith invariants off the gluings, inserts chains of stacky `P^1`s and
//! contracts components on which the bundle became torsion.

pub mod blowup;
pub mod curve;
pub mod dvrlinalg;
pub mod engine;
pub mod field;
pub mod scenarios;

pub use curve::{MultiDegree, TwistedCurve, ValidationReport};
pub use dvrlinalg::{smith_normal_form, Mat, SnfResult};
pub use engine::{degenerate, DegenerationInput, DegenerationOutput, EngineError, EngineFailure};
pub use field::{Rat, RatFunc, Valuation};

#[cfg(feature = "testkit")]
pub mod testkit;
