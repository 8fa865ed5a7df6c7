//! Range enclosures for polynomials on axis-aligned boxes.
//!
//! Each monomial is enclosed separately (interval power of each coordinate,
//! then interval product) and the enclosures are summed. The result always
//! contains the true range; it is exact for polynomials that are monotone in
//! every monomial on the box, such as positive-coefficient polynomials on the
//! positive quadrant.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{fmt_rational, Poly, Poly2};

/// Closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    /// The dyadic cell `[j 2^-k, (j+1) 2^-k]`.
    pub fn dyadic(j: u64, k: u32) -> Self {
        let den = BigInt::one() << k;
        Interval {
            lo: BigRational::new(BigInt::from(j), den.clone()),
            hi: BigRational::new(BigInt::from(j + 1), den),
        }
    }

    pub fn from_ints(lo: i64, hi: i64) -> Self {
        Self::new(
            BigRational::from_integer(lo.into()),
            BigRational::from_integer(hi.into()),
        )
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Enclosure of `{|v| : v in self}`.
    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Interval {
                lo: -self.hi.clone(),
                hi: -self.lo.clone(),
            }
        } else {
            Interval {
                lo: BigRational::zero(),
                hi: (-self.lo.clone()).max(self.hi.clone()),
            }
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().cloned().expect("nonempty");
        let hi = c.iter().max().cloned().expect("nonempty");
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Tight enclosure of `{v^n : v in self}`.
    pub fn pow(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::point(BigRational::one());
        }
        let a = num_traits::pow(self.lo.clone(), n as usize);
        let b = num_traits::pow(self.hi.clone(), n as usize);
        if n % 2 == 1 || !self.lo.is_negative() {
            Interval::new(a, b)
        } else if !self.hi.is_positive() {
            Interval::new(b, a)
        } else {
            Interval::new(BigRational::zero(), a.max(b))
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.lo.to_f64().unwrap_or(f64::NEG_INFINITY),
            self.hi.to_f64().unwrap_or(f64::INFINITY),
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

impl<const N: usize> Poly<N> {
    /// Exact-endpoint enclosure of the range of `self` over the box.
    pub fn range(&self, bx: &[Interval; N]) -> Interval {
        let mut acc = Interval::point(BigRational::zero());
        for (e, c) in self.terms() {
            let mut m = Interval::point(c.clone());
            for (iv, &d) in bx.iter().zip(e.iter()) {
                if d > 0 {
                    m = m.mul(&iv.pow(d));
                }
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Floating-point enclosure of the range over the box, with every
    /// operation rounded outward so the result still contains the true range.
    pub fn range_f64(&self, bx: &[(f64, f64); N]) -> (f64, f64) {
        let mut acc = FInterval::point(0.0);
        for (e, c) in self.terms() {
            let cv = c.to_f64().unwrap_or(f64::NAN);
            let exact = BigRational::from_float(cv).is_some_and(|r| r == *c);
            let mut m = FInterval::around(cv, exact);
            for (&(lo, hi), &d) in bx.iter().zip(e.iter()) {
                if d > 0 {
                    m = m.mul(FInterval { lo, hi }.pow(d));
                }
            }
            acc = acc.add(m);
        }
        (acc.lo, acc.hi)
    }
}

/// Enclosure of `P` on an axis-aligned rectangle `cell = [x-interval, y-interval]`.
pub fn interval_range(p: &Poly2, cell: &[Interval; 2]) -> Interval {
    p.range(cell)
}

/// Rounded result and its exact error, `a op b = r + e`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

// A non-finite error term (overflow) also rounds outward.
fn round_down((r, e): (f64, f64)) -> f64 {
    if e >= 0.0 {
        r
    } else {
        r.next_down()
    }
}

fn round_up((r, e): (f64, f64)) -> f64 {
    if e <= 0.0 {
        r
    } else {
        r.next_up()
    }
}

#[derive(Clone, Copy, Debug)]
struct FInterval {
    lo: f64,
    hi: f64,
}

impl FInterval {
    fn point(v: f64) -> Self {
        FInterval { lo: v, hi: v }
    }

    /// `v` is itself a rounded conversion; widen by one ulp each way
    /// unless the conversion was exact.
    fn around(v: f64, exact: bool) -> Self {
        if exact {
            return FInterval::point(v);
        }
        FInterval {
            lo: v.next_down(),
            hi: v.next_up(),
        }
    }

    fn add(self, o: FInterval) -> FInterval {
        FInterval {
            lo: round_down(two_sum(self.lo, o.lo)),
            hi: round_up(two_sum(self.hi, o.hi)),
        }
    }

    fn mul(self, o: FInterval) -> FInterval {
        let c = [
            two_prod(self.lo, o.lo),
            two_prod(self.lo, o.hi),
            two_prod(self.hi, o.lo),
            two_prod(self.hi, o.hi),
        ];
        FInterval {
            lo: c.iter().map(|&r| round_down(r)).fold(f64::INFINITY, f64::min),
            hi: c.iter().map(|&r| round_up(r)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn pow(self, n: u32) -> FInterval {
        let mut acc = FInterval::point(1.0);
        // repeated multiplication keeps the outward rounding simple; even
        // powers of a sign-straddling interval are clamped at zero below
        for _ in 0..n {
            acc = acc.mul(self);
        }
        if n.is_multiple_of(2) && self.lo < 0.0 && self.hi > 0.0 {
            acc.lo = acc.lo.max(0.0);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexpr::parse_poly2;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn linear_on_small_cell_is_exact() {
        let p = parse_poly2("x + y").unwrap();
        let k = 10;
        let cell = [Interval::dyadic(0, k), Interval::dyadic(0, k)];
        let r = interval_range(&p, &cell);
        assert_eq!(r, Interval::new(q(0, 1), q(2, 1024)));
    }

    #[test]
    fn monotone_product_on_positive_cell() {
        let p = parse_poly2("x*y").unwrap();
        let cell = [Interval::from_ints(1, 2), Interval::from_ints(1, 2)];
        assert_eq!(interval_range(&p, &cell), Interval::from_ints(1, 4));
    }

    #[test]
    fn nonmonotone_enclosure_contains_true_range() {
        let p = parse_poly2("x^2 - x").unwrap();
        let cell = [Interval::from_ints(0, 1), Interval::from_ints(0, 1)];
        let r = interval_range(&p, &cell);
        assert!(r.contains_interval(&Interval::new(q(-1, 4), q(0, 1))));
        assert_eq!(r, Interval::from_ints(-1, 1));
    }

    #[test]
    fn even_power_straddling_zero() {
        let iv = Interval::new(q(-1, 2), q(1, 3));
        assert_eq!(iv.pow(2), Interval::new(q(0, 1), q(1, 4)));
        assert_eq!(iv.pow(3), Interval::new(q(-1, 8), q(1, 27)));
        assert_eq!(iv.abs(), Interval::new(q(0, 1), q(1, 2)));
    }

    #[test]
    fn float_backend_encloses_exact_backend() {
        let p = parse_poly2("x^3 - 3*x*y + 1/3*y^2 - 7/5").unwrap();
        let cell = [Interval::new(q(-1, 4), q(1, 2)), Interval::new(q(1, 8), q(3, 4))];
        let exact = p.range(&cell).to_f64();
        let fl = p.range_f64(&[cell[0].to_f64(), cell[1].to_f64()]);
        assert!(fl.0 <= exact.0 && exact.1 <= fl.1);
    }
}
