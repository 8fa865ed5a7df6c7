//! Sets of dyadic cells at scale `delta = 2^-k` and the measurements made on
//! them: covering numbers, non-concentration exponents, image sets under a
//! polynomial, and energy (collision) counts.

mod dyadic;
mod energy;
mod fit;
mod generators;
mod image;
mod measure;
mod sets;

pub use energy::{count_interval_overlaps, cs_growth_bound, energy_count, energy_pairs, PairRange};
pub use fit::{exponent_regression, ExponentFit};
pub use generators::{gen_ap, gen_cantor};
pub use image::{image_set, product_set, sum_set, ImageSet, ValueGrid};
pub use measure::{box_dim_fit, nonconcentration_exponent, nonconcentration_exponent_2d, NonConcentration};
pub use sets::{GridSet1D, GridSet2D, Scale, MAX_SCALE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("scale k={0} outside 1..=30")]
    ScaleOutOfRange(i64),
    #[error("cell index {index} out of range at scale k={k}")]
    CellOutOfRange { index: u64, k: u32 },
    #[error("coarse scale k'={coarse} must satisfy 1 <= k' <= {k}")]
    CoarseScaleOutOfRange { coarse: u32, k: u32 },
    #[error("set is empty")]
    EmptySet,
    #[error("scale mismatch: k={0} vs k={1}")]
    ScaleMismatch(u32, u32),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("need at least 3 scales, got {0}")]
    TooFewScales(usize),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("energy must be positive")]
    ZeroEnergy,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
