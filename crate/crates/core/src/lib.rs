//! Exact, window-certified computations with metrics on doubles of discrete metric spaces.
//!
//! A metric on the double `X ⊔ X′` is determined by its cross-copy kernel
//! `(x, y) ↦ d(x, y′)`. Projections (selfadjoint idempotents) are represented by
//! level functions of expanding sequences; asymptotic claims about them are answered
//! by [`Verdict`]s that carry witnesses checked on finite windows.

pub mod error;
pub mod rational;
pub mod par;
pub mod space;
pub mod expr;
pub mod double;
pub mod projection;
pub mod verdict;
pub mod asymptotics;
pub mod revalidate;
pub mod boolean;
pub mod measure;
pub mod ideals;
pub mod catalog;

pub use double::{check_axioms, DeltaFn, DoubleMetric, Scope};
pub use error::{Error, Result};
pub use projection::{LevelFunction, LevelTable};
pub use space::{Certified, MetricSpace, PointId, PointSet, Window};
pub use verdict::{Status, Verdict, Witness};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact rationals used for every distance.
pub type Q = num_rational::Ratio<i64>;
