//! Counting `delta`-cell quadruples `(S, S', T, T')` with `P(S x T)` and
//! `P(S' x T')` overlapping.
//!
//! The ranges of all `|A| |B|` cell pairs are computed once. Two closed
//! intervals `[a, b]`, `[c, d]` meet iff `c <= b` and `d >= a`, and since
//! `d < a` implies `c < a <= b`, the number of ranges meeting `[a, b]` is
//! `#{c <= b} - #{d < a}`. Summed over all pairs, both terms come from a
//! linear merge of the sorted endpoint lists, so the count costs
//! `O(N log N)` for `N = |A| |B|` instead of the `N^2` quadruple scan.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use rayon::prelude::*;

use super::dyadic::DyadicEvaluator;
use super::{GridError, GridSet1D};
use crate::polyexpr::{hf_poly, Interval, Poly2};

/// One `(S, T)` cell pair with the enclosure of `P` on `S x T`.
#[derive(Clone, Debug)]
pub struct PairRange {
    pub s: u64,
    pub t: u64,
    pub range: Interval,
}

/// Enclosures of `P` on every `S x T`, `S in A`, `T in B`, in `(S, T)` order.
pub fn energy_pairs(p: &Poly2, a: &GridSet1D, b: &GridSet1D) -> Result<Vec<PairRange>, GridError> {
    if a.scale() != b.scale() {
        return Err(GridError::ScaleMismatch(a.scale().k(), b.scale().k()));
    }
    let k = a.scale().k();
    Ok(a.cells()
        .par_iter()
        .flat_map_iter(|&s| {
            let sx = Interval::dyadic(s, k);
            b.cells().iter().map(move |&t| PairRange {
                s,
                t,
                range: p.range(&[sx.clone(), Interval::dyadic(t, k)]),
            })
        })
        .collect())
}

/// Number of quadruples `(S, S', T, T')` with intersecting `P`-ranges.
///
/// With `hf_min` set, quadruples whose 4-variate enclosure of `H_F` on
/// `S x S' x T x T'` lies strictly inside `(-hf_min, hf_min)` are excluded.
pub fn energy_count(
    p: &Poly2,
    a: &GridSet1D,
    b: &GridSet1D,
    hf_min: Option<f64>,
) -> Result<u128, GridError> {
    if hf_min.is_none() && a.scale() == b.scale() {
        if let Some(ev) = DyadicEvaluator::new(p, a.scale().k()) {
            let ranges: Vec<(i128, i128)> = a
                .cells()
                .par_iter()
                .flat_map_iter(|&s| b.cells().iter().map(|&t| ev.range(s, t)).collect::<Vec<_>>())
                .collect();
            return Ok(count_overlaps_by(&ranges, |r| &r.0, |r| &r.1));
        }
    }
    let pairs = energy_pairs(p, a, b)?;
    match hf_min {
        None => Ok(count_overlaps_by(&pairs, |p| p.range.lo(), |p| p.range.hi())),
        Some(h) => {
            let thr = BigRational::from_f64(h).ok_or_else(|| {
                GridError::InvalidParameters(format!("hf_min {h} is not finite"))
            })?;
            Ok(count_overlaps_filtered(p, &pairs, &thr, a.scale().k()))
        }
    }
}

fn count_overlaps_by<T, V, L, H>(items: &[T], lo: L, hi: H) -> u128
where
    T: Sync,
    V: Ord + Clone + Send + Sync,
    L: Fn(&T) -> &V + Sync,
    H: Fn(&T) -> &V + Sync,
{
    let mut los: Vec<V> = items.par_iter().map(|it| lo(it).clone()).collect();
    let mut his: Vec<V> = items.par_iter().map(|it| hi(it).clone()).collect();
    los.par_sort_unstable();
    his.par_sort_unstable();
    // sum over i of #{lo_j <= hi_i}, minus sum over i of #{hi_j < lo_i}
    let mut total: u128 = 0;
    let mut j = 0;
    for h in &his {
        while j < los.len() && los[j] <= *h {
            j += 1;
        }
        total += j as u128;
    }
    let mut j = 0;
    for l in &los {
        while j < his.len() && his[j] < *l {
            j += 1;
        }
        total -= j as u128;
    }
    total
}

/// Counts ordered pairs of intersecting closed intervals (including each
/// interval with itself).
pub fn count_interval_overlaps<V: Ord + Clone + Send + Sync>(ranges: &[(V, V)]) -> u128 {
    count_overlaps_by(ranges, |r| &r.0, |r| &r.1)
}

fn count_overlaps_filtered(p: &Poly2, pairs: &[PairRange], thr: &BigRational, k: u32) -> u128 {
    let hf = hf_poly(p);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&i, &j| pairs[i].range.lo().cmp(pairs[j].range.lo()));
    let sorted_los: Vec<&BigRational> = order.iter().map(|&i| pairs[i].range.lo()).collect();
    pairs
        .par_iter()
        .map(|q| {
            let end = sorted_los.partition_point(|&c| c <= q.range.hi());
            order[..end]
                .iter()
                .map(|&j| &pairs[j])
                .filter(|r| r.range.hi() >= q.range.lo())
                .filter(|r| {
                    // variable order (x, x', y, y')
                    let bx = [
                        Interval::dyadic(q.s, k),
                        Interval::dyadic(r.s, k),
                        Interval::dyadic(q.t, k),
                        Interval::dyadic(r.t, k),
                    ];
                    let h = hf.range(&bx);
                    let sup = h.lo().abs().max(h.hi().abs());
                    sup >= *thr
                })
                .count() as u128
        })
        .sum()
}

/// Cauchy-Schwarz lower-bound functional `c E(X)^2 / energy`.
pub fn cs_growth_bound(cover: f64, energy: f64, c: f64) -> Result<f64, GridError> {
    if !(energy > 0.0) {
        return Err(GridError::ZeroEnergy);
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(GridError::InvalidParameters(format!("c={c} outside (0, 1]")));
    }
    if energy < cover {
        return Err(GridError::InvalidParameters(format!(
            "energy {energy} below cover {cover}; diagonal quadruples always collide"
        )));
    }
    Ok(c * cover * cover / energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridset::Scale;
    use crate::polyexpr::parse_poly2;

    fn s(k: u32) -> Scale {
        Scale::new(k).unwrap()
    }

    #[test]
    fn two_point_additive_energy() {
        // sums 0, m, m, 2m: four collisions on the middle pair plus two diagonals
        let k = 8;
        let a = GridSet1D::new(s(k), [0, 1 << (k - 1)]).unwrap();
        let p = parse_poly2("x + y").unwrap();
        assert_eq!(energy_count(&p, &a, &a, None).unwrap(), 6);
    }

    #[test]
    fn energy_at_least_diagonal() {
        let a = GridSet1D::new(s(6), [1, 5, 9, 40]).unwrap();
        let b = GridSet1D::new(s(6), [0, 3, 33]).unwrap();
        let p = parse_poly2("x^2 + x*y + y^2").unwrap();
        let e = energy_count(&p, &a, &b, None).unwrap();
        assert!(e >= 12);
    }

    #[test]
    fn filter_never_increases_count() {
        let a = GridSet1D::new(s(5), [2, 7, 11, 20, 29]).unwrap();
        let p = parse_poly2("x*y + x^2").unwrap();
        let all = energy_count(&p, &a, &a, None).unwrap();
        for h in [0.0, 0.01, 0.1, 1.0] {
            assert!(energy_count(&p, &a, &a, Some(h)).unwrap() <= all);
        }
        assert_eq!(energy_count(&p, &a, &a, Some(0.0)).unwrap(), all);
    }

    #[test]
    fn separable_polynomial_is_fully_filtered() {
        // H_F vanishes identically when P_xy does
        let a = GridSet1D::new(s(5), [2, 7, 11]).unwrap();
        let p = parse_poly2("x + y").unwrap();
        assert_eq!(energy_count(&p, &a, &a, Some(1e-6)).unwrap(), 0);
    }

    #[test]
    fn fast_path_matches_exact_ranges() {
        let a = GridSet1D::new(s(7), [0, 3, 17, 40, 41, 99, 127]).unwrap();
        for src in ["x + y", "x^2 + x*y + y^2", "x*y - 1/3*y^3"] {
            let p = parse_poly2(src).unwrap();
            let pairs = energy_pairs(&p, &a, &a).unwrap();
            let exact = count_overlaps_by(&pairs, |p| p.range.lo(), |p| p.range.hi());
            assert_eq!(energy_count(&p, &a, &a, None).unwrap(), exact, "{src}");
        }
    }

    #[test]
    fn cs_bound_values() {
        assert_eq!(cs_growth_bound(16.0, 256.0, 1.0).unwrap(), 1.0);
        let v = cs_growth_bound(64.0, 12.5f64.exp2(), 1.0).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        let half = cs_growth_bound(64.0, 12.5f64.exp2(), 0.5).unwrap();
        assert!((half - v / 2.0).abs() < 1e-12);
        assert_eq!(cs_growth_bound(4.0, 0.0, 1.0), Err(GridError::ZeroEnergy));
        assert!(cs_growth_bound(40.0, 4.0, 1.0).is_err());
    }
}
