//! Planar geometry: smooth maps with enclosures, Whitney and band
//! decompositions, neighborhoods of level sets, Blaschke curvature of
//! 3-webs and extraction of large product sets.

mod bands;
mod curvature;
mod extract;
mod smooth;
mod whitney;
mod zeroset;

pub use bands::{band_partition, BandPartition, BandSummary};
pub use curvature::{blaschke_curvature, blaschke_curvature_numeric, chart_curvature, MIN_WEDGE};
pub use extract::{extract_product, ExtractionReport, ProductExtraction};
pub use smooth::{pinned_distance_map, LinearProjection, PinnedDistance, PolyMap, Rect, SmoothMap2};
pub use whitney::{
    whitney_decompose, Band, Cube, CubeDecomposition, DyadicSquare, EmptyRegion, OpenUnitSquare,
    PuncturedSquare, Region, SquareStatus,
};
pub use zeroset::{select_level, smooth_image, zero_nbhd_covering, LevelChoice};

use thiserror::Error;

use crate::gridset::GridError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singular point ({x}, {y})")]
    Singular { x: f64, y: f64 },
    #[error("gradients of phi{} and phi{} nearly parallel at ({x}, {y}): wedge {wedge:e}", pair.0, pair.1)]
    DegenerateGradients {
        x: f64,
        y: f64,
        pair: (usize, usize),
        wedge: f64,
    },
    #[error("Newton iteration did not converge for target ({u}, {v})")]
    NewtonFailed { u: f64, v: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}
