//! Smooth maps of the plane with derivatives up to third order and
//! enclosures on rectangles.

use std::fmt;

use crate::polyexpr::{Poly2, Var};

/// Closed axis-parallel rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "empty rectangle");
        Rect { x0, x1, y0, y1 }
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1)]
    }

    /// Half the diagonal.
    pub fn radius(&self) -> f64 {
        0.5 * (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    /// Grows every side outward by `s`.
    pub fn inflate(&self, s: f64) -> Rect {
        Rect::new(self.x0 - s, self.x1 + s, self.y0 - s, self.y1 + s)
    }

    /// Closed containment of a point.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.x0 <= p[0] && p[0] <= self.x1 && self.y0 <= p[1] && p[1] <= self.y1
    }

    /// Containment of a point in the open interior.
    pub fn interior_contains(&self, p: [f64; 2]) -> bool {
        self.x0 < p[0] && p[0] < self.x1 && self.y0 < p[1] && p[1] < self.y1
    }

    /// Maps `(s, t) in [0, 1]^2` affinely onto the rectangle.
    pub fn lerp(&self, s: f64, t: f64) -> [f64; 2] {
        [self.x0 + s * (self.x1 - self.x0), self.y0 + t * (self.y1 - self.y0)]
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.x0, self.x1, self.y0, self.y1)
    }
}

/// A real function on a planar domain with derivatives up to order 3.
///
/// Implementations are immutable and can be shared across threads.
pub trait SmoothMap2: Send + Sync {
    fn value(&self, p: [f64; 2]) -> f64;

    /// `d_x^a d_y^b` at `p`, for `a + b <= 3`. Returns NaN at singular points
    /// and for higher orders.
    fn derivative(&self, a: u32, b: u32, p: [f64; 2]) -> f64;

    fn domain(&self) -> Rect {
        Rect::UNIT
    }

    /// True at points where the map or its derivatives are undefined.
    fn is_singular(&self, _p: [f64; 2]) -> bool {
        false
    }

    /// Upper bound for `|grad f|` on `r`.
    fn gradient_bound(&self, r: &Rect) -> f64;

    /// Interval containing `f(r)`: by default `f(center) +- Lip * radius`,
    /// widened by a relative margin for rounding.
    fn enclosure(&self, r: &Rect) -> (f64, f64) {
        let c = self.value(r.center());
        let spread = self.gradient_bound(r) * r.radius();
        let margin = 4.0 * f64::EPSILON * (c.abs() + spread) + f64::MIN_POSITIVE;
        (c - spread - margin, c + spread + margin)
    }

    /// Pointwise coordinate projection, if the map is exactly `x` or `y`.
    fn as_coordinate(&self) -> Option<Var> {
        None
    }

    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        [self.derivative(1, 0, p), self.derivative(0, 1, p)]
    }
}

impl fmt::Debug for dyn SmoothMap2 + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap2 on {}", self.domain())
    }
}

/// Number of partials with `a + b <= 3`.
const ORDERS: usize = 10;

fn order_slot(a: u32, b: u32) -> Option<usize> {
    let n = a + b;
    if n > 3 {
        return None;
    }
    // blocks of sizes 1, 2, 3, 4 by total order
    Some((n * (n + 1) / 2 + b) as usize)
}

/// Exact polynomial realization.
#[derive(Clone, Debug)]
pub struct PolyMap {
    poly: Poly2,
    partials: Vec<Poly2>,
    domain: Rect,
}

impl PolyMap {
    pub fn new(poly: Poly2) -> Self {
        let mut partials = vec![Poly2::zero(); ORDERS];
        for n in 0..=3u32 {
            for b in 0..=n {
                let a = n - b;
                let d = poly.partial(Var::X, a).partial(Var::Y, b);
                partials[order_slot(a, b).unwrap()] = d;
            }
        }
        PolyMap {
            poly,
            partials,
            domain: Rect::UNIT,
        }
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    pub fn poly(&self) -> &Poly2 {
        &self.poly
    }
}

impl SmoothMap2 for PolyMap {
    fn value(&self, p: [f64; 2]) -> f64 {
        self.poly.eval_f64(&p)
    }

    fn derivative(&self, a: u32, b: u32, p: [f64; 2]) -> f64 {
        match order_slot(a, b) {
            Some(i) => self.partials[i].eval_f64(&p),
            None => f64::NAN,
        }
    }

    fn domain(&self) -> Rect {
        self.domain
    }

    fn gradient_bound(&self, r: &Rect) -> f64 {
        let bx = [(r.x0, r.x1), (r.y0, r.y1)];
        let mag = |q: &Poly2| {
            let (lo, hi) = q.range_f64(&bx);
            lo.abs().max(hi.abs())
        };
        mag(&self.partials[1]).hypot(mag(&self.partials[2]))
    }

    fn enclosure(&self, r: &Rect) -> (f64, f64) {
        self.poly.range_f64(&[(r.x0, r.x1), (r.y0, r.y1)])
    }

    fn as_coordinate(&self) -> Option<Var> {
        [Var::X, Var::Y]
            .into_iter()
            .find(|&v| self.poly == Poly2::var(v))
    }
}

/// `q -> |q - center|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinnedDistance {
    center: [f64; 2],
    domain: Rect,
}

impl PinnedDistance {
    pub fn new(center: [f64; 2]) -> Self {
        PinnedDistance {
            center,
            domain: Rect::UNIT,
        }
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }
}

/// Distance map to `center`, smooth away from the center.
pub fn pinned_distance_map(center: [f64; 2]) -> PinnedDistance {
    PinnedDistance::new(center)
}

impl SmoothMap2 for PinnedDistance {
    fn value(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1])
    }

    fn derivative(&self, a: u32, b: u32, p: [f64; 2]) -> f64 {
        let u = p[0] - self.center[0];
        let v = p[1] - self.center[1];
        let r = u.hypot(v);
        if r == 0.0 {
            return if a + b == 0 { 0.0 } else { f64::NAN };
        }
        let r3 = r * r * r;
        let r5 = r3 * r * r;
        match (a, b) {
            (0, 0) => r,
            (1, 0) => u / r,
            (0, 1) => v / r,
            (2, 0) => v * v / r3,
            (1, 1) => -u * v / r3,
            (0, 2) => u * u / r3,
            (3, 0) => -3.0 * u * v * v / r5,
            (2, 1) => v * (2.0 * u * u - v * v) / r5,
            (1, 2) => u * (2.0 * v * v - u * u) / r5,
            (0, 3) => -3.0 * u * u * v / r5,
            _ => f64::NAN,
        }
    }

    fn domain(&self) -> Rect {
        self.domain
    }

    fn is_singular(&self, p: [f64; 2]) -> bool {
        p == self.center
    }

    fn gradient_bound(&self, _r: &Rect) -> f64 {
        1.0
    }
}

/// `(x, y) -> x cos(theta) + y sin(theta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearProjection {
    theta: f64,
    cos: f64,
    sin: f64,
}

impl LinearProjection {
    pub fn new(theta: f64) -> Self {
        LinearProjection {
            theta,
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl SmoothMap2 for LinearProjection {
    fn value(&self, p: [f64; 2]) -> f64 {
        p[0] * self.cos + p[1] * self.sin
    }

    fn derivative(&self, a: u32, b: u32, p: [f64; 2]) -> f64 {
        match (a, b) {
            (0, 0) => self.value(p),
            (1, 0) => self.cos,
            (0, 1) => self.sin,
            _ if a + b <= 3 => 0.0,
            _ => f64::NAN,
        }
    }

    fn gradient_bound(&self, _r: &Rect) -> f64 {
        1.0
    }

    fn enclosure(&self, r: &Rect) -> (f64, f64) {
        let (xa, xb) = if self.cos >= 0.0 { (r.x0, r.x1) } else { (r.x1, r.x0) };
        let (ya, yb) = if self.sin >= 0.0 { (r.y0, r.y1) } else { (r.y1, r.y0) };
        let lo = xa * self.cos + ya * self.sin;
        let hi = xb * self.cos + yb * self.sin;
        let margin = 4.0 * f64::EPSILON * (lo.abs().max(hi.abs())) + f64::MIN_POSITIVE;
        (lo - margin, hi + margin)
    }
}

/// `f - level`, used to scan level sets.
pub(crate) struct Shifted<'a> {
    pub(crate) inner: &'a dyn SmoothMap2,
    pub(crate) level: f64,
}

impl SmoothMap2 for Shifted<'_> {
    fn value(&self, p: [f64; 2]) -> f64 {
        self.inner.value(p) - self.level
    }

    fn derivative(&self, a: u32, b: u32, p: [f64; 2]) -> f64 {
        if a + b == 0 {
            self.value(p)
        } else {
            self.inner.derivative(a, b, p)
        }
    }

    fn domain(&self) -> Rect {
        self.inner.domain()
    }

    fn gradient_bound(&self, r: &Rect) -> f64 {
        self.inner.gradient_bound(r)
    }

    fn enclosure(&self, r: &Rect) -> (f64, f64) {
        let (lo, hi) = self.inner.enclosure(r);
        let margin = 4.0 * f64::EPSILON * (lo.abs().max(hi.abs()) + self.level.abs());
        (lo - self.level - margin, hi - self.level + margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexpr::parse_poly2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Centered difference of the `(a, b)` partial of `f` in direction `x`
    /// or `y`, compared against the analytic `(a + 1, b)` or `(a, b + 1)`.
    fn check_fd(f: &dyn SmoothMap2, p: [f64; 2]) {
        let h = 1e-5;
        for n in 0..3u32 {
            for b in 0..=n {
                let a = n - b;
                let dx = (f.derivative(a, b, [p[0] + h, p[1]]) - f.derivative(a, b, [p[0] - h, p[1]]))
                    / (2.0 * h);
                let dy = (f.derivative(a, b, [p[0], p[1] + h]) - f.derivative(a, b, [p[0], p[1] - h]))
                    / (2.0 * h);
                for (fd, exact) in [(dx, f.derivative(a + 1, b, p)), (dy, f.derivative(a, b + 1, p))] {
                    let tol = 1e-4 * exact.abs().max(1.0);
                    assert!((fd - exact).abs() <= tol, "({a},{b}) at {p:?}: fd {fd} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn pinned_distance_values() {
        let d = pinned_distance_map([0.0, 0.0]);
        let q = [0.6, 0.8];
        assert!((d.value(q) - 1.0).abs() < 1e-15);
        assert!((d.derivative(1, 0, q) - 0.6).abs() < 1e-15);
        assert!((d.derivative(0, 1, q) - 0.8).abs() < 1e-15);
        assert!(d.derivative(1, 0, [0.0, 0.0]).is_nan());
        assert!(d.is_singular([0.0, 0.0]));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let maps: Vec<Box<dyn SmoothMap2>> = vec![
            Box::new(pinned_distance_map([0.0, 0.0])),
            Box::new(pinned_distance_map([1.0, 0.0])),
            Box::new(pinned_distance_map([0.2, 1.3])),
            Box::new(LinearProjection::new(0.7)),
            Box::new(PolyMap::new(parse_poly2("x^3*y - 2*x*y^2 + y^3 + x").unwrap())),
        ];
        for f in &maps {
            for _ in 0..40 {
                let p = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)];
                check_fd(f.as_ref(), p);
            }
        }
    }

    #[test]
    fn enclosures_contain_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let maps: Vec<Box<dyn SmoothMap2>> = vec![
            Box::new(pinned_distance_map([0.0, 1.0])),
            Box::new(LinearProjection::new(2.5)),
            Box::new(PolyMap::new(parse_poly2("x^2 + x*y + y^2 - 1/3").unwrap())),
        ];
        for f in &maps {
            for _ in 0..200 {
                let x0: f64 = rng.gen_range(0.0..0.9);
                let y0: f64 = rng.gen_range(0.0..0.9);
                let r = Rect::new(x0, x0 + 0.1, y0, y0 + 0.05);
                let (lo, hi) = f.enclosure(&r);
                for _ in 0..10 {
                    let v = f.value(r.lerp(rng.gen(), rng.gen()));
                    assert!(lo <= v && v <= hi);
                }
            }
        }
    }

    #[test]
    fn coordinate_detection() {
        assert_eq!(PolyMap::new(parse_poly2("x").unwrap()).as_coordinate(), Some(Var::X));
        assert_eq!(PolyMap::new(parse_poly2("y").unwrap()).as_coordinate(), Some(Var::Y));
        assert_eq!(PolyMap::new(parse_poly2("2*x").unwrap()).as_coordinate(), None);
    }
}
