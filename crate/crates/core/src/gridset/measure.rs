use serde::Serialize;

use std::collections::HashMap;

use super::{exponent_regression, ExponentFit, GridError, GridSet1D, GridSet2D, Scale};

/// Result of [`nonconcentration_exponent`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonConcentration {
    /// Reported exponent, never negative.
    pub eta: f64,
    /// Unclamped maximum over dyadic intervals.
    pub raw_eta: f64,
    /// True when `raw_eta < 0` and the report was clamped to zero.
    pub floored: bool,
    /// Level `m` (interval length `2^-m`) attaining the maximum.
    pub worst_level: u32,
}

/// Least `eta` with `E(S cap J) <= |J|^kappa delta^(-alpha-eta)` for every
/// dyadic interval `J` of length at least `delta`.
///
/// Only dyadic `J` are scanned; an arbitrary interval is covered by two
/// dyadic intervals of comparable length, which shifts `eta` by `O(1/k)`.
pub fn nonconcentration_exponent(
    s: &GridSet1D,
    kappa: f64,
    alpha: f64,
) -> Result<NonConcentration, GridError> {
    if s.is_empty() {
        return Err(GridError::EmptySet);
    }
    let k = s.scale().k();
    let mut best = f64::NEG_INFINITY;
    let mut worst_level = 0;
    for m in 0..=k {
        let shift = k - m;
        let cells = s.cells();
        let mut max_count = 0usize;
        let mut i = 0;
        while i < cells.len() {
            let group = cells[i] >> shift;
            let start = i;
            while i < cells.len() && cells[i] >> shift == group {
                i += 1;
            }
            max_count = max_count.max(i - start);
        }
        let eta = ((max_count as f64).log2() + m as f64 * kappa) / k as f64 - alpha;
        if eta > best {
            best = eta;
            worst_level = m;
        }
    }
    Ok(NonConcentration {
        eta: best.max(0.0),
        raw_eta: best,
        floored: best < 0.0,
        worst_level,
    })
}

/// Planar analogue of [`nonconcentration_exponent`]: least `eta` with
/// `E(X cap Q) <= r^kappa delta^(-alpha-eta)` over dyadic squares `Q` of
/// side `r >= delta`. Here `alpha` is the full target dimension of `X`.
pub fn nonconcentration_exponent_2d(
    x: &GridSet2D,
    kappa: f64,
    alpha: f64,
) -> Result<NonConcentration, GridError> {
    if x.is_empty() {
        return Err(GridError::EmptySet);
    }
    let k = x.scale().k();
    let mut best = f64::NEG_INFINITY;
    let mut worst_level = 0;
    for m in 0..=k {
        let shift = k - m;
        let mut counts: HashMap<(u64, u64), usize> = HashMap::new();
        for &(i, j) in x.cells() {
            *counts.entry((i >> shift, j >> shift)).or_default() += 1;
        }
        let max_count = counts.values().copied().max().unwrap_or(0);
        let eta = ((max_count as f64).log2() + m as f64 * kappa) / k as f64 - alpha;
        if eta > best {
            best = eta;
            worst_level = m;
        }
    }
    Ok(NonConcentration {
        eta: best.max(0.0),
        raw_eta: best,
        floored: best < 0.0,
        worst_level,
    })
}

/// Box-dimension estimate: slope of `log2 |family(k)|` against `k`.
pub fn box_dim_fit<F>(family: F, ks: &[u32]) -> Result<ExponentFit, GridError>
where
    F: Fn(Scale) -> Result<GridSet1D, GridError>,
{
    if ks.len() < 3 {
        return Err(GridError::TooFewScales(ks.len()));
    }
    let mut points = Vec::with_capacity(ks.len());
    for &k in ks {
        let set = family(Scale::new(k)?)?;
        points.push((k as f64, set.len() as f64));
    }
    exponent_regression(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridset::{gen_ap, gen_cantor};

    fn s(k: u32) -> Scale {
        Scale::new(k).unwrap()
    }

    #[test]
    fn full_interval_worst_case_is_whole_interval() {
        let full = GridSet1D::full(s(10));
        let nc = nonconcentration_exponent(&full, 0.5, 0.5).unwrap();
        assert!((nc.eta - 0.5).abs() < 1e-12);
        assert_eq!(nc.worst_level, 0);
        assert!(!nc.floored);
    }

    #[test]
    fn single_cell_floors_at_zero() {
        let one = GridSet1D::new(s(10), [37]).unwrap();
        let nc = nonconcentration_exponent(&one, 0.25, 0.5).unwrap();
        assert_eq!(nc.eta, 0.0);
        assert!(nc.floored);
        let nc = nonconcentration_exponent(&one, 0.5, 0.5).unwrap();
        assert!(nc.eta.abs() < 1e-12);
    }

    #[test]
    fn arithmetic_progression_is_nonconcentrated() {
        for (alpha, eta0) in [(0.5, 0.0), (0.5, 0.25), (0.25, 0.5)] {
            for k in [12, 16, 20] {
                let a = gen_ap(alpha, eta0, s(k)).unwrap();
                let nc = nonconcentration_exponent(&a, alpha, alpha).unwrap();
                assert!(nc.eta <= eta0 + 2.0 / k as f64, "alpha={alpha} eta0={eta0} k={k}: {nc:?}");
            }
        }
    }

    #[test]
    fn empty_set_is_an_error() {
        let e = GridSet1D::new(s(4), []).unwrap();
        assert_eq!(nonconcentration_exponent(&e, 0.5, 0.5), Err(GridError::EmptySet));
    }

    #[test]
    fn planar_full_grid() {
        let full = GridSet2D::full(s(6));
        let nc = nonconcentration_exponent_2d(&full, 2.0, 2.0).unwrap();
        assert!(nc.raw_eta.abs() < 1e-12);
        let nc = nonconcentration_exponent_2d(&full, 1.0, 1.0).unwrap();
        assert!((nc.eta - 1.0).abs() < 1e-12);
        assert_eq!(nc.worst_level, 0);
    }

    #[test]
    fn box_dimension_of_standard_families() {
        let f = box_dim_fit(|sc| Ok(GridSet1D::full(sc)), &[6, 8, 10, 12]).unwrap();
        assert!((f.slope - 1.0).abs() < 0.01);
        let c = box_dim_fit(|sc| gen_cantor(&[0, 1], 4, sc.k() / 2), &[8, 10, 12, 14]).unwrap();
        assert!((c.slope - 0.5).abs() < 0.03);
        assert!(matches!(
            box_dim_fit(|sc| Ok(GridSet1D::full(sc)), &[4, 5]),
            Err(GridError::TooFewScales(2))
        ));
    }
}
