//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A variable of the bivariate ring `Q[x, y]` or the four-variable ring
/// `Q[x, x', y, y']`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    /// `x'`, spelled `xp` in expressions.
    Xp,
    /// `y'`, spelled `yp` in expressions.
    Yp,
}

impl Var {
    /// Slot of this variable in an exponent vector of arity `n`, if the
    /// variable belongs to that ring.
    pub fn slot(self, n: usize) -> Option<usize> {
        match (n, self) {
            (2, Var::X) => Some(0),
            (2, Var::Y) => Some(1),
            (4, Var::X) => Some(0),
            (4, Var::Xp) => Some(1),
            (4, Var::Y) => Some(2),
            (4, Var::Yp) => Some(3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Xp => "xp",
            Var::Yp => "yp",
        }
    }
}

pub(crate) fn var_names(n: usize) -> &'static [&'static str] {
    match n {
        2 => &["x", "y"],
        4 => &["x", "xp", "y", "yp"],
        _ => panic!("unsupported arity {n}"),
    }
}

/// Polynomial in `N` variables. Zero coefficients are never stored, so two
/// polynomials are equal exactly when their term maps are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<const N: usize> {
    terms: BTreeMap<[u32; N], BigRational>,
}

/// Polynomial in `(x, y)`.
pub type Poly2 = Poly<2>;
/// Polynomial in `(x, x', y, y')`.
pub type Poly4 = Poly<4>;

impl<const N: usize> Default for Poly<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, [0; N])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(c: BigRational, exps: [u32; N]) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, c);
        p
    }

    /// The variable `v` as a polynomial.
    ///
    /// Panics if `v` is not a variable of this ring.
    pub fn var(v: Var) -> Self {
        let slot = v
            .slot(N)
            .unwrap_or_else(|| panic!("{} is not a variable of the {N}-variable ring", v.name()));
        let mut exps = [0; N];
        exps[slot] = 1;
        Self::monomial(BigRational::one(), exps)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ([u32; N], BigRational)>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: [u32; N], c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32; N]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &BigRational)> {
        self.terms.iter()
    }

    /// Terms in graded-lex order: higher total degree first, ties broken by
    /// lexicographically larger exponent vector first.
    pub fn terms_grlex(&self) -> Vec<(&[u32; N], &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| grlex_desc(a, b));
        v
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (*e, v * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(1);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative of the given order.
    ///
    /// Panics if `v` is not a variable of this ring.
    pub fn partial(&self, v: Var, order: u32) -> Self {
        let slot = v
            .slot(N)
            .unwrap_or_else(|| panic!("{} is not a variable of the {N}-variable ring", v.name()));
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let d = e[slot];
            if d < order {
                continue;
            }
            // falling factorial d (d-1) ... (d-order+1)
            let mut f = BigInt::one();
            for t in 0..order {
                f *= BigInt::from(d - t);
            }
            let mut ne = *e;
            ne[slot] = d - order;
            out.add_term(ne, c * BigRational::from_integer(f));
        }
        out
    }

    /// Mixed partial: applies `partial(v, 1)` for each variable in turn.
    pub fn d(&self, vars: &[Var]) -> Self {
        vars.iter().fold(self.clone(), |p, &v| p.partial(v, 1))
    }

    pub fn eval(&self, point: &[BigRational; N]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &d) in point.iter().zip(e.iter()) {
                if d > 0 {
                    m *= num_traits::pow(x.clone(), d as usize);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64; N]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = c.to_f64().unwrap_or(f64::NAN);
                for (x, &d) in point.iter().zip(e.iter()) {
                    m *= x.powi(d as i32);
                }
                m
            })
            .sum()
    }

    /// Renames variables: term exponent slot `i` goes to slot `map[i]` of
    /// the target ring.
    pub fn embed<const M: usize>(&self, map: [usize; N]) -> Poly<M> {
        Poly::from_terms(self.terms.iter().map(|(e, c)| {
            let mut ne = [0u32; M];
            for (i, &d) in e.iter().enumerate() {
                ne[map[i]] += d;
            }
            (ne, c.clone())
        }))
    }
}

fn grlex_desc<const N: usize>(a: &[u32; N], b: &[u32; N]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl<const N: usize> Add for &Poly<N> {
    type Output = Poly<N>;
    fn add(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<const N: usize> Sub for &Poly<N> {
    type Output = Poly<N>;
    fn sub(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<const N: usize> Mul for &Poly<N> {
    type Output = Poly<N>;
    fn mul(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for (s, d) in e.iter_mut().zip(eb.iter()) {
                    *s += d;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr for Poly<N> {
            type Output = Poly<N>;
            fn $m(self, rhs: Poly<N>) -> Poly<N> {
                (&self).$m(&rhs)
            }
        }
        impl<const N: usize> $tr<&Poly<N>> for Poly<N> {
            type Output = Poly<N>;
            fn $m(self, rhs: &Poly<N>) -> Poly<N> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<const N: usize> Neg for Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        -&self
    }
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl<const N: usize> fmt::Display for Poly<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let names = var_names(N);
        for (i, (e, c)) in self.terms_grlex().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&d| d == 0);
            if !mag.is_one() || is_const {
                factors.push(fmt_rational(&mag));
            }
            for (name, &d) in names.iter().zip(e.iter()) {
                match d {
                    0 => {}
                    1 => factors.push((*name).to_string()),
                    _ => factors.push(format!("{name}^{d}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_terms_are_dropped() {
        let x = Poly2::var(Var::X);
        let p = &x - &x;
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn power_rule() {
        let x = Poly2::var(Var::X);
        let y = Poly2::var(Var::Y);
        let p = &x.pow(2) * &y;
        let expect = (&x * &y).scale(&q(2, 1));
        assert_eq!(p.partial(Var::X, 1), expect);
        assert!((&x + &y).partial(Var::X, 2).is_zero());
    }

    #[test]
    fn grlex_printing() {
        let x = Poly2::var(Var::X);
        let y = Poly2::var(Var::Y);
        let p = &(&x.pow(2) * &y) + &x.scale(&q(1, 2));
        assert_eq!(p.to_string(), "x^2*y + 1/2*x");
        let r = &(&y - &x.pow(3)) + &Poly2::from_int(-3);
        assert_eq!(r.to_string(), "-x^3 + y - 3");
    }

    #[test]
    #[should_panic]
    fn primed_variable_not_in_bivariate_ring() {
        Poly2::var(Var::Xp);
    }

    #[test]
    fn embed_into_four_variables() {
        let p = &Poly2::var(Var::X) * &Poly2::var(Var::Y);
        let e: Poly4 = p.embed([1, 3]);
        assert_eq!(e.to_string(), "xp*yp");
    }
}
