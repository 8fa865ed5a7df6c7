//! Integer evaluation of polynomial enclosures on dyadic cells.
//!
//! On cells `[X, X+1] 2^-k x [Y, Y+1] 2^-k` inside the unit square every
//! coordinate is non-negative, so each monomial is monotone and its exact
//! range is `c [X^i Y^j, (X+1)^i (Y+1)^j]` (swapped when `c < 0`). Scaling
//! by `L 2^(k d)` (`L` the lcm of coefficient denominators, `d` the degree)
//! turns every enclosure endpoint into an integer with a shared denominator,
//! so endpoints compare as plain `i128`s. The enclosures are identical to
//! [`crate::polyexpr::Poly::range`] on the same cells.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::polyexpr::Poly2;

// headroom below i128::MAX for the sum of all monomials
const MAX_BITS: u64 = 125;

pub(crate) struct DyadicEvaluator {
    k: u32,
    /// `d`, with constants treated as degree 1.
    degree: u32,
    /// `L`.
    lcm: BigInt,
    terms: Vec<(i128, u32, u32)>,
}

impl DyadicEvaluator {
    /// Returns `None` when the scaled values might overflow `i128`.
    pub(crate) fn new(p: &Poly2, k: u32) -> Option<Self> {
        let degree = p.degree().unwrap_or(1).max(1);
        let lcm = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut sum_abs = BigInt::zero();
        let mut terms = Vec::new();
        for (e, c) in p.terms() {
            let scaled = (c * BigRational::from_integer(lcm.clone())).to_integer();
            sum_abs += scaled.abs();
            let shift = k as u64 * (degree - e[0] - e[1]) as u64;
            if shift >= MAX_BITS {
                return None;
            }
            let v = scaled.to_i128()?.checked_shl(shift as u32)?;
            terms.push((v, e[0], e[1]));
        }
        let bits = sum_abs.bits() + k as u64 * degree as u64 + 1;
        if bits > MAX_BITS {
            return None;
        }
        Some(DyadicEvaluator {
            k,
            degree,
            lcm,
            terms,
        })
    }

    /// Scaled enclosure numerators of `P` on cell `(s, t)`.
    pub(crate) fn range(&self, s: u64, t: u64) -> (i128, i128) {
        let (x0, x1) = (s as i128, s as i128 + 1);
        let (y0, y1) = (t as i128, t as i128 + 1);
        let mut lo = 0i128;
        let mut hi = 0i128;
        for &(c, i, j) in &self.terms {
            let a = x0.pow(i) * y0.pow(j);
            let b = x1.pow(i) * y1.pow(j);
            if c >= 0 {
                lo += c * a;
                hi += c * b;
            } else {
                lo += c * b;
                hi += c * a;
            }
        }
        (lo, hi)
    }

    /// Scaled numerator of a rational value, if it is representable.
    pub(crate) fn scale_value(&self, v: &BigRational) -> Option<i128> {
        let s = v * BigRational::from_integer(&self.lcm << (self.k as usize * self.degree as usize));
        if s.is_integer() {
            s.to_integer().to_i128()
        } else {
            None
        }
    }

    /// Scaled width of one output cell (`2^-k` in value units).
    pub(crate) fn cell_width(&self) -> Option<i128> {
        (&self.lcm << (self.k as usize * (self.degree as usize - 1))).to_i128()
    }
}
