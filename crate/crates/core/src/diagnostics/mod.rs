//! Densities, the stress-energy tensor and the quantities built on them.

mod densities;
mod interface;
mod projection;
mod stationarity;
mod stress;

pub use densities::{densities, total_energy, DensityFields};
pub use interface::{
    estimate_velocities, hausdorff_points, hausdorff_to_circle, hausdorff_to_polylines,
    interface_extract, InterfaceKind, InterfaceSet,
};
pub use projection::{
    density_ratio_probe, equipartition_ratio, equipartition_ratio_in_ball, projection_report,
    projection_report_window, ProjectionReport, ZERO_EIGEN_TOL,
};
pub use stationarity::{
    default_test_family, stationarity_residual, varifold_samples, varifold_stationarity,
    AccumulatorParts, StationarityAccumulator, TestField, VarifoldSample,
};
pub use stress::{divergence_residual, stress_energy, DivergenceResidual, SymTensorField};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("test field support leaves the domain or the time window")]
    SupportOutside,
    #[error("no cells in the concentration tube")]
    EmptyTube,
    #[error("tube mass {0} too small for a projection estimate")]
    InsufficientConcentration(f64),
    #[error("tube radius {radius} below 3h = {min}")]
    TubeTooThin { radius: f64, min: f64 },
    #[error("need at least {need} snapshots, got {got}")]
    Window { need: usize, got: usize },
    #[error("snapshots disagree on grid, k or epsilon")]
    Mismatch,
    #[error("{0}")]
    Unsupported(String),
}
