//! Dyadic squares, cube decompositions and the Whitney decomposition of
//! regions given by membership oracles.

use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use super::{GeomError, Rect};
use crate::gridset::{GridSet2D, Scale, MAX_SCALE};
use crate::polyexpr::fmt_rational;

/// `[i 2^-k, (i+1) 2^-k] x [j 2^-k, (j+1) 2^-k]`, `0 <= k <= 30`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicSquare {
    pub k: u32,
    pub i: u64,
    pub j: u64,
}

impl DyadicSquare {
    pub const ROOT: DyadicSquare = DyadicSquare { k: 0, i: 0, j: 0 };

    pub fn side(&self) -> f64 {
        (-(self.k as f64)).exp2()
    }

    pub fn rect(&self) -> Rect {
        let s = self.side();
        Rect::new(self.i as f64 * s, (self.i + 1) as f64 * s, self.j as f64 * s, (self.j + 1) as f64 * s)
    }

    /// Concentric dilate by factor 2.
    pub fn dilate(&self) -> Rect {
        self.rect().inflate(0.5 * self.side())
    }

    /// Children in the order (i, j), (i, j+1), (i+1, j), (i+1, j+1).
    pub fn children(&self) -> [DyadicSquare; 4] {
        let (k, i, j) = (self.k + 1, 2 * self.i, 2 * self.j);
        [
            DyadicSquare { k, i, j },
            DyadicSquare { k, i, j: j + 1 },
            DyadicSquare { k, i: i + 1, j },
            DyadicSquare { k, i: i + 1, j: j + 1 },
        ]
    }

    /// Range of cell indices at scale `k >= self.k` covered in each axis.
    pub fn cell_span(&self, k: u32) -> (std::ops::Range<u64>, std::ops::Range<u64>) {
        let shift = k - self.k;
        (
            (self.i << shift)..((self.i + 1) << shift),
            (self.j << shift)..((self.j + 1) << shift),
        )
    }

    pub fn contains_square(&self, other: &DyadicSquare) -> bool {
        other.k >= self.k && other.i >> (other.k - self.k) == self.i && other.j >> (other.k - self.k) == self.j
    }

    /// True when the open interiors meet.
    pub fn overlaps(&self, other: &DyadicSquare) -> bool {
        self.contains_square(other) || other.contains_square(self)
    }
}

/// Band certificate `v <= |f_j| < 4 v` on a cube, with `v = 2^log2_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Band {
    pub j: usize,
    pub log2_v: i32,
}

impl Band {
    pub fn v(&self) -> f64 {
        (self.log2_v as f64).exp2()
    }

    pub fn v_rational(&self) -> BigRational {
        let p = BigInt::one() << self.log2_v.unsigned_abs() as usize;
        if self.log2_v >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube {
    pub square: DyadicSquare,
    pub bands: Vec<Band>,
    /// Emitted without satisfying the defining condition of its construction.
    pub flagged: bool,
}

/// Interior-disjoint dyadic cubes plus the `delta`-cells left uncovered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeDecomposition {
    pub cubes: Vec<Cube>,
    pub leftover: GridSet2D,
}

impl CubeDecomposition {
    /// Number of cubes at each depth, index = depth.
    pub fn depth_histogram(&self) -> Vec<usize> {
        let max = self.cubes.iter().map(|c| c.square.k).max().unwrap_or(0) as usize;
        let mut h = vec![0; if self.cubes.is_empty() { 0 } else { max + 1 }];
        for c in &self.cubes {
            h[c.square.k as usize] += 1;
        }
        h
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cubes {
            let q = c.square;
            let _ = write!(s, "cube k={} i={} j={}", q.k, q.i, q.j);
            for b in &c.bands {
                let _ = write!(s, " band j={} v={}", b.j, fmt_rational(&b.v_rational()));
            }
            if c.flagged {
                s.push_str(" flagged");
            }
            s.push('\n');
        }
        s.push_str(&self.leftover.to_text());
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GeomError> {
        let mut cubes = Vec::new();
        let mut lines = text.lines().enumerate().peekable();
        while let Some((n, line)) = lines.peek().copied() {
            if line.trim().is_empty() {
                lines.next();
                continue;
            }
            if !line.starts_with("cube") {
                break;
            }
            lines.next();
            cubes.push(parse_cube_line(line).map_err(|message| GeomError::Parse { line: n + 1, message })?);
        }
        let offset = lines.peek().map(|(n, _)| *n).unwrap_or(0);
        let rest: Vec<&str> = lines.map(|(_, l)| l).collect();
        let leftover = GridSet2D::from_text(&rest.join("\n")).map_err(|e| GeomError::Parse {
            line: offset + 1,
            message: e.to_string(),
        })?;
        Ok(CubeDecomposition { cubes, leftover })
    }
}

fn parse_cube_line(line: &str) -> Result<Cube, String> {
    let mut toks = line.split_whitespace().peekable();
    toks.next();
    let mut field = |name: &str| -> Result<String, String> {
        let t = toks.next().ok_or(format!("missing {name}="))?;
        t.strip_prefix(name)
            .and_then(|r| r.strip_prefix('='))
            .map(str::to_string)
            .ok_or(format!("expected {name}=, found '{t}'"))
    };
    let k: u32 = field("k")?.parse().map_err(|e| format!("k: {e}"))?;
    let i: u64 = field("i")?.parse().map_err(|e| format!("i: {e}"))?;
    let j: u64 = field("j")?.parse().map_err(|e| format!("j: {e}"))?;
    if k > MAX_SCALE || i >> k != 0 || j >> k != 0 {
        return Err(format!("square k={k} i={i} j={j} outside the unit square"));
    }
    let mut bands = Vec::new();
    let mut flagged = false;
    while let Some(t) = toks.next() {
        match t {
            "band" => {
                let idx = toks
                    .next()
                    .and_then(|s| s.strip_prefix("j="))
                    .and_then(|s| s.parse().ok())
                    .ok_or("band needs j=<index>")?;
                let v: BigRational = toks
                    .next()
                    .and_then(|s| s.strip_prefix("v="))
                    .and_then(|s| s.parse().ok())
                    .ok_or("band needs v=<rational>")?;
                bands.push(Band {
                    j: idx,
                    log2_v: dyadic_log2(&v).ok_or(format!("v={v} is not a power of two"))?,
                });
            }
            "flagged" => flagged = true,
            other => return Err(format!("unexpected token '{other}'")),
        }
    }
    Ok(Cube {
        square: DyadicSquare { k, i, j },
        bands,
        flagged,
    })
}

fn dyadic_log2(v: &BigRational) -> Option<i32> {
    if !v.is_positive() {
        return None;
    }
    let (n, d) = (v.numer(), v.denom());
    let pow2 = |x: &BigInt| x.trailing_zeros().filter(|&t| *x == BigInt::one() << t as usize);
    if d.is_one() {
        pow2(n).map(|t| t as i32)
    } else if n.is_one() {
        pow2(d).map(|t| -(t as i32))
    } else {
        None
    }
}

/// Position of an open square relative to an open region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareStatus {
    /// The open square lies in the region.
    Inside,
    /// The open square misses the region.
    Outside,
    Touching,
}

/// Membership oracle for an open subset of the plane.
pub trait Region: Sync {
    /// Status of the open interior of `r`.
    fn square_status(&self, r: &Rect) -> SquareStatus;
    /// Whether the closed rectangle `r` lies in the region.
    fn contains_rect(&self, r: &Rect) -> bool;
}

/// The empty region.
pub struct EmptyRegion;

impl Region for EmptyRegion {
    fn square_status(&self, _r: &Rect) -> SquareStatus {
        SquareStatus::Outside
    }

    fn contains_rect(&self, _r: &Rect) -> bool {
        false
    }
}

fn in_open_unit(r: &Rect) -> bool {
    r.x0 > 0.0 && r.x1 < 1.0 && r.y0 > 0.0 && r.y1 < 1.0
}

fn within_unit(r: &Rect) -> bool {
    r.x0 >= 0.0 && r.x1 <= 1.0 && r.y0 >= 0.0 && r.y1 <= 1.0
}

/// The open unit square `(0, 1)^2`.
pub struct OpenUnitSquare;

impl Region for OpenUnitSquare {
    fn square_status(&self, r: &Rect) -> SquareStatus {
        if within_unit(r) {
            SquareStatus::Inside
        } else if r.x1 <= 0.0 || r.x0 >= 1.0 || r.y1 <= 0.0 || r.y0 >= 1.0 {
            SquareStatus::Outside
        } else {
            SquareStatus::Touching
        }
    }

    fn contains_rect(&self, r: &Rect) -> bool {
        in_open_unit(r)
    }
}

/// `(0, 1)^2` minus one point.
pub struct PuncturedSquare {
    pub puncture: [f64; 2],
}

impl Region for PuncturedSquare {
    fn square_status(&self, r: &Rect) -> SquareStatus {
        match OpenUnitSquare.square_status(r) {
            SquareStatus::Inside if r.interior_contains(self.puncture) => SquareStatus::Touching,
            s => s,
        }
    }

    fn contains_rect(&self, r: &Rect) -> bool {
        in_open_unit(r) && !r.contains(self.puncture)
    }
}

/// Whitney-type decomposition of `omega` by dyadic squares in `[0, 1]^2`.
///
/// A square is emitted when its open interior lies in `omega`; squares
/// partly inside are split, and those still undecided at depth `k_max`
/// become the leftover cells at scale `k_max`. Emitted squares whose
/// dilate `2Q` still lies in `omega` are flagged.
pub fn whitney_decompose(omega: &dyn Region, k_max: Scale) -> CubeDecomposition {
    let mut found = Vec::new();
    let mut left = Vec::new();
    walk(omega, DyadicSquare::ROOT, k_max.k(), &mut found, &mut left);
    let cubes = found
        .into_iter()
        .map(|sq| Cube {
            square: sq,
            bands: Vec::new(),
            flagged: omega.contains_rect(&sq.dilate()),
        })
        .collect();
    CubeDecomposition {
        cubes,
        leftover: GridSet2D::new(k_max, left.into_iter().map(|q| (q.i, q.j))).expect("cells at scale k_max"),
    }
}

fn walk(
    omega: &dyn Region,
    sq: DyadicSquare,
    k_max: u32,
    found: &mut Vec<DyadicSquare>,
    left: &mut Vec<DyadicSquare>,
) {
    match omega.square_status(&sq.rect()) {
        SquareStatus::Inside => found.push(sq),
        SquareStatus::Outside => {}
        SquareStatus::Touching if sq.k >= k_max => left.push(sq),
        SquareStatus::Touching if sq.k < 3 => {
            // fan out near the root; deeper levels are cheap enough serially
            let parts: Vec<(Vec<DyadicSquare>, Vec<DyadicSquare>)> = sq
                .children()
                .into_par_iter()
                .map(|c| {
                    let (mut f, mut l) = (Vec::new(), Vec::new());
                    walk(omega, c, k_max, &mut f, &mut l);
                    (f, l)
                })
                .collect();
            for (f, l) in parts {
                found.extend(f);
                left.extend(l);
            }
        }
        SquareStatus::Touching => {
            for c in sq.children() {
                walk(omega, c, k_max, found, left);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: u32) -> Scale {
        Scale::new(k).unwrap()
    }

    fn assert_disjoint(d: &CubeDecomposition) {
        for (a, qa) in d.cubes.iter().enumerate() {
            for qb in &d.cubes[a + 1..] {
                assert!(!qa.square.overlaps(&qb.square), "{:?} {:?}", qa.square, qb.square);
            }
        }
    }

    #[test]
    fn empty_region() {
        let d = whitney_decompose(&EmptyRegion, s(6));
        assert!(d.cubes.is_empty());
        assert!(d.leftover.is_empty());
    }

    #[test]
    fn open_unit_square_is_one_cube() {
        let d = whitney_decompose(&OpenUnitSquare, s(6));
        assert_eq!(d.cubes.len(), 1);
        assert_eq!(d.cubes[0].square, DyadicSquare::ROOT);
        assert!(!d.cubes[0].flagged);
        assert!(d.leftover.is_empty());
    }

    #[test]
    fn dyadic_puncture_gives_quadrants() {
        let d = whitney_decompose(&PuncturedSquare { puncture: [0.5, 0.5] }, s(8));
        assert_eq!(d.cubes.len(), 4);
        assert!(d.cubes.iter().all(|c| c.square.k == 1 && !c.flagged));
        assert!(d.leftover.is_empty());
    }

    #[test]
    fn generic_puncture_halves_toward_center() {
        let k = 12;
        let omega = PuncturedSquare { puncture: [1.0 / 3.0, 1.0 / 3.0] };
        let d = whitney_decompose(&omega, s(k));
        assert_disjoint(&d);
        assert!(d.cubes.iter().all(|c| !c.flagged && !omega.contains_rect(&c.square.dilate())));
        let h = d.depth_histogram();
        assert_eq!(h.len(), k as usize + 1);
        for g in 2..=k as usize {
            assert!((1..=12).contains(&h[g]), "generation {g}: {h:?}");
        }
        // the cell containing the puncture is the only undecided one
        assert_eq!(d.leftover.len(), 1);
        let area: f64 = d.cubes.iter().map(|c| c.square.side().powi(2)).sum::<f64>()
            + (-2.0 * k as f64).exp2();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let mut d = whitney_decompose(&PuncturedSquare { puncture: [0.3, 0.6] }, s(5));
        d.cubes[0].bands = vec![Band { j: 0, log2_v: -3 }, Band { j: 2, log2_v: 1 }];
        d.cubes[1].flagged = true;
        let t = d.to_text();
        assert!(t.starts_with("cube k=1 i=0 j=0 band j=0 v=1/8 band j=2 v=2\n"));
        assert_eq!(CubeDecomposition::from_text(&t).unwrap(), d);
        assert!(CubeDecomposition::from_text("cube k=1 i=2 j=0\ngridset2d k=3\n").is_err());
        assert!(CubeDecomposition::from_text("cube k=1 i=0 j=0 band j=0 v=3\ngridset2d k=3\n").is_err());
    }
}
