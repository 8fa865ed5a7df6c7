//! Large Cartesian products inside planar cell sets, by iterated pruning of
//! sparse rows and columns.

use std::collections::BTreeMap;

use serde::Serialize;

use super::GeomError;
use crate::gridset::{nonconcentration_exponent, GridSet1D, GridSet2D};

#[derive(Clone, Debug)]
pub struct ProductExtraction {
    /// Surviving columns (first coordinates).
    pub a: GridSet1D,
    /// Surviving rows (second coordinates).
    pub b: GridSet1D,
    pub report: ExtractionReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtractionReport {
    pub x_cells: usize,
    /// `|X cap (A x B)|`.
    pub intersection: usize,
    pub rounds: usize,
    pub column_threshold: f64,
    pub row_threshold: f64,
    /// Non-concentration exponents of `A` and `B` at `kappa` against their own
    /// dimensions `log2 |A| / k`, `log2 |B| / k`.
    pub eta_a: f64,
    pub eta_b: f64,
}

/// Removes, until nothing changes, every column with fewer than
/// `|X| / (4 #columns(X))` surviving cells and every row with fewer than
/// `|X| / (4 #rows(X))`, scanning in ascending index order. Each threshold
/// can remove fewer than `|X| / 4` cells in total, so at least half of `X`
/// survives, and the survivors are exactly `X cap (A x B)`.
pub fn extract_product(x: &GridSet2D, kappa: f64) -> Result<ProductExtraction, GeomError> {
    if x.is_empty() {
        return Err(GeomError::Precondition("X is empty".into()));
    }
    let total = x.len() as f64;
    let col_thr = total / (4.0 * x.columns().len() as f64);
    let row_thr = total / (4.0 * x.rows().len() as f64);

    let mut alive = vec![true; x.len()];
    let mut by_col: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut by_row: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (n, &(i, j)) in x.cells().iter().enumerate() {
        by_col.entry(i).or_default().push(n);
        by_row.entry(j).or_default().push(n);
    }
    let mut col_deg: BTreeMap<u64, usize> = by_col.iter().map(|(&i, v)| (i, v.len())).collect();
    let mut row_deg: BTreeMap<u64, usize> = by_row.iter().map(|(&j, v)| (j, v.len())).collect();

    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        let weak_cols: Vec<u64> = col_deg
            .iter()
            .filter(|&(_, &d)| d > 0 && (d as f64) < col_thr)
            .map(|(&i, _)| i)
            .collect();
        for i in weak_cols {
            for &n in &by_col[&i] {
                if std::mem::take(&mut alive[n]) {
                    *row_deg.get_mut(&x.cells()[n].1).unwrap() -= 1;
                }
            }
            col_deg.insert(i, 0);
            changed = true;
        }
        let weak_rows: Vec<u64> = row_deg
            .iter()
            .filter(|&(_, &d)| d > 0 && (d as f64) < row_thr)
            .map(|(&j, _)| j)
            .collect();
        for j in weak_rows {
            for &n in &by_row[&j] {
                if std::mem::take(&mut alive[n]) {
                    *col_deg.get_mut(&x.cells()[n].0).unwrap() -= 1;
                }
            }
            row_deg.insert(j, 0);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let scale = x.scale();
    let a = GridSet1D::new(scale, col_deg.iter().filter(|(_, &d)| d > 0).map(|(&i, _)| i))?;
    let b = GridSet1D::new(scale, row_deg.iter().filter(|(_, &d)| d > 0).map(|(&j, _)| j))?;
    let intersection = alive.iter().filter(|&&v| v).count();
    let k = scale.k() as f64;
    let eta = |s: &GridSet1D| -> Result<f64, GeomError> {
        Ok(nonconcentration_exponent(s, kappa, (s.len() as f64).log2() / k)?.eta)
    };
    let report = ExtractionReport {
        x_cells: x.len(),
        intersection,
        rounds,
        column_threshold: col_thr,
        row_threshold: row_thr,
        eta_a: eta(&a)?,
        eta_b: eta(&b)?,
    };
    Ok(ProductExtraction { a, b, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridset::{gen_ap, gen_cantor, Scale};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(k: u32) -> Scale {
        Scale::new(k).unwrap()
    }

    #[test]
    fn exact_product_is_kept() {
        let a0 = gen_cantor(&[0, 2], 4, 4).unwrap();
        let b0 = gen_ap(0.5, 0.0, s(8)).unwrap();
        let x = GridSet2D::product(&a0, &b0).unwrap();
        let e = extract_product(&x, 0.5).unwrap();
        assert_eq!(e.a, a0);
        assert_eq!(e.b, b0);
        assert_eq!(e.report.intersection, x.len());
        assert_eq!(e.report.rounds, 1);
    }

    #[test]
    fn full_grid() {
        let x = GridSet2D::full(s(5));
        let e = extract_product(&x, 0.5).unwrap();
        assert_eq!(e.a, GridSet1D::full(s(5)));
        assert_eq!(e.b, GridSet1D::full(s(5)));
    }

    #[test]
    fn noise_rows_are_pruned() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = 8;
        let a0 = gen_ap(0.5, 0.0, s(k)).unwrap();
        let b0 = gen_ap(0.5, 0.0, s(k)).unwrap();
        let core = GridSet2D::product(&a0, &b0).unwrap();
        let noise: Vec<(u64, u64)> = (0..core.len() / 9)
            .map(|_| (rng.gen_range(0..256), rng.gen_range(0..256)))
            .collect();
        let x = GridSet2D::new(s(k), core.cells().iter().copied().chain(noise)).unwrap();
        let e = extract_product(&x, 0.5).unwrap();
        assert!(2 * e.report.intersection >= x.len());
        assert!(e.report.intersection >= core.len());
        assert!(e.b.cells().iter().all(|j| b0.contains(*j)));
    }

    #[test]
    fn empty_is_an_error() {
        assert!(extract_product(&GridSet2D::new(s(3), []).unwrap(), 0.5).is_err());
    }
}
