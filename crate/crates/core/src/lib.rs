//! Uncertainty curves for signals on graphs: the least graph spread a unit
//! signal can have at each spectral spread, bounded from above and below by
//! a refinement over the pencil `P² − αL`.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f64` and `f32`).
//! The `f64` instantiations are re-exported at the crate root; `f32` ones
//! live in [`single`].
//!
//! ```
//! use spectral_uncertainty::{generators, Budget, PencilProblem};
//!
//! let g = generators::star(10).unwrap();
//! let bounds = PencilProblem::for_graph(&g, 0).unwrap().sandwich(&Budget::rounds(6)).unwrap();
//! assert!(bounds.lower_at(1.0).unwrap() <= 1e-12);
//! ```

pub mod closed_form;
pub mod diffusion;
pub mod er_approx;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod scalar;
pub mod spectral;
pub mod spreads;
pub mod uncertainty;

pub use error::{Error, Result};
pub use generators::GraphSpec;
pub use graph::{Geodesic, Graph, Metric};
pub use scalar::Real;
pub use uncertainty::Domain;

pub type PencilProblem = uncertainty::PencilProblem<f64>;
pub type CurveBounds = uncertainty::CurveBounds<f64>;
pub type CurveKnot = uncertainty::CurveKnot<f64>;
pub type Budget = uncertainty::Budget<f64>;
pub type PointQuery = uncertainty::PointQuery<f64>;
pub type SpreadPoint = spreads::SpreadPoint<f64>;
pub type DistanceVector = graph::DistanceVector<f64>;
pub type SymOp = spectral::SymOp<f64>;
pub type Spectrum = spectral::Spectrum<f64>;
pub type HeatKernel = diffusion::HeatKernel<f64>;
pub type DiffusionTrace = diffusion::DiffusionTrace<f64>;
pub type ReducedModel = er_approx::ReducedModel<f64>;
pub type DistanceDistribution = er_approx::DistanceDistribution<f64>;

/// Single-precision instantiations.
pub mod single {
    pub type PencilProblem = crate::uncertainty::PencilProblem<f32>;
    pub type CurveBounds = crate::uncertainty::CurveBounds<f32>;
    pub type Budget = crate::uncertainty::Budget<f32>;
    pub type SpreadPoint = crate::spreads::SpreadPoint<f32>;
    pub type DistanceVector = crate::graph::DistanceVector<f32>;
    pub type SymOp = crate::spectral::SymOp<f32>;
    pub type HeatKernel = crate::diffusion::HeatKernel<f32>;
}
