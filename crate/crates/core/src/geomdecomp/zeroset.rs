//! Coverings of thin neighborhoods of level sets, and images of planar cell
//! sets under smooth maps.

use num_rational::BigRational;
use rayon::prelude::*;

use super::smooth::Shifted;
use super::{GeomError, Rect, SmoothMap2};
use crate::gridset::{GridSet2D, ImageSet, ValueGrid};
use crate::polyexpr::Interval;

fn cell_rect(a: &GridSet2D, (i, j): (u64, u64)) -> Rect {
    let d = a.scale().delta();
    Rect::new(i as f64 * d, (i + 1) as f64 * d, j as f64 * d, (j + 1) as f64 * d)
}

/// Number of cells of `A` whose `s`-inflation carries an enclosure of `phi`
/// containing 0. This over-counts the cells meeting `N_s(Z(phi))`: an
/// inflated cell reaches distance up to `s sqrt 2` and enclosures are not
/// tight.
pub fn zero_nbhd_covering(phi: &dyn SmoothMap2, a: &GridSet2D, s: f64) -> Result<u64, GeomError> {
    let delta = a.scale().delta();
    if !(s >= delta && s <= 1.0) {
        return Err(GeomError::Precondition(format!("s = {s} outside [delta, 1] = [{delta}, 1]")));
    }
    Ok(a.cells()
        .par_iter()
        .filter(|&&c| {
            let (lo, hi) = phi.enclosure(&cell_rect(a, c).inflate(s));
            lo <= 0.0 && 0.0 <= hi
        })
        .count() as u64)
}

/// Level `t` and its neighborhood count from [`select_level`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelChoice {
    pub t: f64,
    pub count: u64,
    pub candidates: usize,
    /// Mean count over all candidates.
    pub mean_count: f64,
}

/// Scans `ceil(s^(-kappa/2))` equally spaced levels in `[t0, 2 t0]` and
/// returns the one whose `s`-neighborhood meets the fewest cells of `A`
/// (the smallest such level on ties).
pub fn select_level(
    phi: &dyn SmoothMap2,
    a: &GridSet2D,
    s: f64,
    t0: f64,
    kappa: f64,
) -> Result<LevelChoice, GeomError> {
    if !(kappa > 0.0) {
        return Err(GeomError::Precondition(format!("kappa = {kappa} must be positive")));
    }
    let floor = s.powf(kappa / 2.0);
    if !(floor < t0 && t0 <= 0.5) {
        return Err(GeomError::Precondition(format!(
            "need s^(kappa/2) < t0 <= 1/2, got s^(kappa/2) = {floor}, t0 = {t0}"
        )));
    }
    let n = (1.0 / floor).ceil() as usize;
    let levels: Vec<f64> = if n <= 1 {
        vec![t0]
    } else {
        (0..n).map(|i| t0 * (1.0 + i as f64 / (n - 1) as f64)).collect()
    };
    let counts = levels
        .iter()
        .map(|&t| zero_nbhd_covering(&Shifted { inner: phi, level: t }, a, s))
        .collect::<Result<Vec<u64>, _>>()?;
    let (best, &count) = counts
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .expect("at least one level");
    Ok(LevelChoice {
        t: levels[best],
        count,
        candidates: n.max(1),
        mean_count: counts.iter().sum::<u64>() as f64 / counts.len() as f64,
    })
}

/// `delta`-covering of `f(X)`: output cells met by the enclosure of `f` on
/// some cell of `X`, on a value grid fitted to `f`'s enclosure over its
/// domain.
pub fn smooth_image(f: &dyn SmoothMap2, x: &GridSet2D) -> Result<ImageSet, GeomError> {
    let (lo, hi) = f.enclosure(&f.domain());
    let to_q = |v: f64| {
        BigRational::from_float(v).ok_or_else(|| GeomError::Precondition(format!("enclosure bound {v} is not finite")))
    };
    let grid = ValueGrid::for_range(&Interval::new(to_q(lo)?, to_q(hi)?), x.scale().k())?;
    let ranges: Vec<(u64, u64)> = x
        .cells()
        .par_iter()
        .map(|&c| {
            let (a, b) = f.enclosure(&cell_rect(x, c));
            grid.cells_for_f64(a, b)
        })
        .collect();
    let cells = grid.collect(ranges);
    Ok(ImageSet { cells, grid })
}
