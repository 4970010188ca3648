//! Weighted graphs with intrinsic metrics: isoperimetric constants, Dirichlet
//! ground states, curvature, volume growth and potentials, each paired with a
//! checkable certificate.

pub mod certificate;
pub mod curvature;
pub mod error;
pub mod family;
pub mod graph;
pub mod growth;
pub mod isoperimetry;
pub mod metric;
pub mod potentials;
pub mod spectral;
pub mod suite;

pub use certificate::CertificateRecord;
pub use curvature::{CurvatureField, Orientation, OrientationDocument};
pub use error::{Error, Result};
pub use family::{
    FamilyKind, GraphFamily, MeasureConvention, RandomMeasure, RandomSpec, SphereLaw,
};
pub use graph::{
    GraphBuilder, GraphDocument, ValidationReport, VertexId, Violation, WeightedGraph,
};
pub use growth::{GrowthEstimate, GrowthPoint};
pub use isoperimetry::{BallKind, CheegerMode, CheegerResult, CutReport};
pub use metric::{MetricAssignment, MetricDocument, MetricRecipe, UnitComparison};
pub use potentials::{DoubledGraph, PotentialBoundary};
pub use spectral::{FormMatrix, SolverMethod, SpectralResult};
pub use suite::{SuiteName, SuiteReport};
