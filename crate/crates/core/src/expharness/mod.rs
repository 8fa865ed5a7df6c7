//! Named experiment scenarios: generate sets across a ladder of scales,
//! measure images, energies and projections, fit exponents, and check the
//! results against expected values.

mod builtins;
mod report;
mod run;
mod scenario;

pub use crate::gridset::{exponent_regression, ExponentFit};
pub use builtins::{builtin_scenario, builtin_scenarios};
pub use report::{format_sig, Outcome, Report, Stats, Table, DEFAULT_PRECISION};
pub use run::{metric_names, parse_scales, run_scenario, run_scenario_with, web_preimage, RunOptions, CS_CONSTANT};
pub use scenario::{
    parse_f64, Comparator, Expectation, Kind, Provenance, Scenario, DEFAULT_TOLERANCE, SCHEMA_VERSION,
};

use thiserror::Error;

use crate::geomdecomp::GeomError;
use crate::gridset::GridError;
use crate::polyexpr::PolyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing parameter '{0}'")]
    MissingParameter(String),
    #[error("parameter '{key}': {message}")]
    InvalidParameter { key: String, message: String },
    #[error("scenario '{scenario}' expects unknown metric '{metric}'")]
    UnknownMetric { metric: String, scenario: String },
    #[error("no builtin scenario named '{0}'")]
    UnknownScenario(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
