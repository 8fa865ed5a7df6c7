use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::dyadic::DyadicEvaluator;
use super::{GridError, GridSet1D, Scale, MAX_SCALE};
use crate::polyexpr::{parse_poly2, Interval, Poly2};

/// Affine map `v -> (v - offset) / 2^m` from a value range onto `[0, 1]`,
/// gridded at scale `k + m` so that each output cell has width `2^-k` in the
/// original value units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueGrid {
    offset: BigRational,
    m: u32,
    k: u32,
}

impl ValueGrid {
    /// Grid covering `range` at base scale `k`.
    pub fn for_range(range: &Interval, k: u32) -> Result<Self, GridError> {
        let width = range.width();
        let mut m = 0u32;
        let mut span = BigRational::one();
        while span < width {
            span *= BigRational::from_integer(2.into());
            m += 1;
        }
        if k + m > MAX_SCALE {
            return Err(GridError::InvalidParameters(format!(
                "value range {range} needs output scale {} > {MAX_SCALE}",
                k + m
            )));
        }
        Ok(ValueGrid {
            offset: range.lo().clone(),
            m,
            k,
        })
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    /// `log2` of the divisor in the affine map.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn output_scale(&self) -> Scale {
        Scale::new(self.k + self.m).expect("checked at construction")
    }

    fn last_cell(&self) -> u64 {
        (1u64 << (self.k + self.m)) - 1
    }

    /// Output cells met by the closed value interval `iv`.
    pub fn cells_for(&self, iv: &Interval) -> (u64, u64) {
        let scale = BigRational::from_integer(BigInt::one() << self.k);
        let to_cell = |v: &BigRational| -> u64 {
            let t = ((v - &self.offset) * &scale).floor().to_integer();
            if t < BigInt::zero() {
                0
            } else {
                t.to_u64().unwrap_or(u64::MAX).min(self.last_cell())
            }
        };
        (to_cell(iv.lo()), to_cell(iv.hi()))
    }

    /// Floating-point variant of [`Self::cells_for`] for enclosures computed in `f64`.
    pub fn cells_for_f64(&self, lo: f64, hi: f64) -> (u64, u64) {
        let off = self.offset.to_f64().unwrap_or(0.0);
        let scale = (self.k as f64).exp2();
        let last = self.last_cell();
        let to_cell = |v: f64| -> u64 {
            let t = ((v - off) * scale).floor();
            if t < 0.0 {
                0
            } else {
                (t as u64).min(last)
            }
        };
        (to_cell(lo), to_cell(hi))
    }

    /// Renormalized position in `[0, 1]` of a value.
    pub fn normalize(&self, v: &BigRational) -> BigRational {
        (v - &self.offset) / BigRational::from_integer(BigInt::one() << self.m)
    }

    /// Collects the union of the cell ranges into a set.
    pub fn collect<I: IntoIterator<Item = (u64, u64)>>(&self, ranges: I) -> GridSet1D {
        let mut cells: Vec<u64> = ranges.into_iter().flat_map(|(a, b)| a..=b).collect();
        cells.par_sort_unstable();
        cells.dedup();
        GridSet1D::new(self.output_scale(), cells).expect("cells clamped to the grid")
    }
}

/// Over-approximate `delta`-covering of `P(A, B)`, with the renormalizing map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSet {
    pub cells: GridSet1D,
    pub grid: ValueGrid,
}

impl ImageSet {
    /// Covering number of the image at the input scale.
    pub fn count(&self) -> usize {
        self.cells.len()
    }
}

fn unit_square() -> [Interval; 2] {
    [Interval::from_ints(0, 1), Interval::from_ints(0, 1)]
}

/// Output cells `c` such that the enclosure of `P` on some `S x T`,
/// `S in A`, `T in B`, meets `c`.
pub fn image_set(p: &Poly2, a: &GridSet1D, b: &GridSet1D) -> Result<ImageSet, GridError> {
    if a.scale() != b.scale() {
        return Err(GridError::ScaleMismatch(a.scale().k(), b.scale().k()));
    }
    let k = a.scale().k();
    let grid = ValueGrid::for_range(&p.range(&unit_square()), k)?;
    if let Some(cells) = image_cells_fast(p, a, b, &grid) {
        return Ok(ImageSet { cells, grid });
    }
    let ranges: Vec<(u64, u64)> = a
        .cells()
        .par_iter()
        .flat_map_iter(|&s| {
            let sx = Interval::dyadic(s, k);
            let grid = &grid;
            b.cells().iter().map(move |&t| {
                let r = p.range(&[sx.clone(), Interval::dyadic(t, k)]);
                grid.cells_for(&r)
            })
        })
        .collect();
    let cells = grid.collect(ranges);
    Ok(ImageSet { cells, grid })
}

fn image_cells_fast(p: &Poly2, a: &GridSet1D, b: &GridSet1D, grid: &ValueGrid) -> Option<GridSet1D> {
    let ev = DyadicEvaluator::new(p, a.scale().k())?;
    let off = ev.scale_value(grid.offset())?;
    let w = ev.cell_width()?;
    let last = grid.last_cell() as i128;
    let to_cell = |v: i128| (v - off).div_euclid(w).clamp(0, last) as u64;
    let ranges: Vec<(u64, u64)> = a
        .cells()
        .par_iter()
        .flat_map_iter(|&s| {
            let ev = &ev;
            b.cells().iter().map(move |&t| {
                let (lo, hi) = ev.range(s, t);
                (to_cell(lo), to_cell(hi))
            })
        })
        .collect();
    Some(grid.collect(ranges))
}

pub fn sum_set(a: &GridSet1D, b: &GridSet1D) -> Result<ImageSet, GridError> {
    image_set(&parse_poly2("x + y").expect("literal"), a, b)
}

pub fn product_set(a: &GridSet1D, b: &GridSet1D) -> Result<ImageSet, GridError> {
    image_set(&parse_poly2("x*y").expect("literal"), a, b)
}
