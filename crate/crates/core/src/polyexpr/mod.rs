//! Expression parsing, exact polynomial arithmetic, range enclosures and the
//! special-form classifier.

mod interval;
mod parse;
mod poly;
mod special;

pub use interval::{interval_range, Interval};
pub use parse::{parse_poly, parse_poly2, parse_poly4};
pub use poly::{fmt_rational, Poly, Poly2, Poly4, Var};
pub use special::{
    classify_special_form, difference_form, hf_general, hf_poly, mp_numerator, Classification,
    Reason, Verdict,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("exponent at offset {offset} must be a non-negative integer")]
    NonIntegerExponent { offset: usize },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

/// Partial derivative of any order, for either ring.
pub fn partial<const N: usize>(p: &Poly<N>, v: Var, order: u32) -> Poly<N> {
    p.partial(v, order)
}
