//! Laboratory for discretized expanding polynomials.
//!
//! * [`polyexpr`]: parsing, exact polynomials, `M_P`, `H_F` and the
//!   special-form classifier.
//! * [`gridset`]: dyadic grid sets, covering numbers, images and energies.
//! * [`geomdecomp`]: Whitney and band decompositions, zero-set
//!   neighbourhoods, web curvature and product extraction.
//! * [`expharness`]: named scenarios, exponent fits and reports.

pub mod polyexpr;
pub mod gridset;
pub mod geomdecomp;
pub mod expharness;
