use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::GridError;
use crate::polyexpr::Interval;

pub const MAX_SCALE: u32 = 30;

/// Dyadic scale `delta = 2^-k`, `1 <= k <= 30`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Scale(u32);

impl Scale {
    pub fn new(k: u32) -> Result<Self, GridError> {
        if (1..=MAX_SCALE).contains(&k) {
            Ok(Scale(k))
        } else {
            Err(GridError::ScaleOutOfRange(k as i64))
        }
    }

    pub fn k(self) -> u32 {
        self.0
    }

    pub fn delta(self) -> f64 {
        (-(self.0 as f64)).exp2()
    }

    /// Number of cells `2^k` across the unit interval.
    pub fn cells(self) -> u64 {
        1u64 << self.0
    }
}

/// Subset of the cells `[j 2^-k, (j+1) 2^-k]`, `0 <= j < 2^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridSet1D {
    scale: Scale,
    cells: Vec<u64>,
}

impl GridSet1D {
    /// Builds a set from arbitrary (unsorted, repeated) indices.
    pub fn new<I: IntoIterator<Item = u64>>(scale: Scale, cells: I) -> Result<Self, GridError> {
        let set: BTreeSet<u64> = cells.into_iter().collect();
        if let Some(&last) = set.iter().next_back() {
            if last >= scale.cells() {
                return Err(GridError::CellOutOfRange {
                    index: last,
                    k: scale.k(),
                });
            }
        }
        Ok(GridSet1D {
            scale,
            cells: set.into_iter().collect(),
        })
    }

    pub fn full(scale: Scale) -> Self {
        GridSet1D {
            scale,
            cells: (0..scale.cells()).collect(),
        }
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, j: u64) -> bool {
        self.cells.binary_search(&j).is_ok()
    }

    pub fn cell_interval(&self, j: u64) -> Interval {
        Interval::dyadic(j, self.scale.k())
    }

    /// The set of cells at scale `k'` that meet this set.
    pub fn coarsen(&self, coarse: u32) -> Result<GridSet1D, GridError> {
        let k = self.scale.k();
        if coarse < 1 || coarse > k {
            return Err(GridError::CoarseScaleOutOfRange { coarse, k });
        }
        let shift = k - coarse;
        let mut cells: Vec<u64> = self.cells.iter().map(|j| j >> shift).collect();
        cells.dedup();
        Ok(GridSet1D {
            scale: Scale(coarse),
            cells,
        })
    }

    /// Number of dyadic cells of side `2^-k'` meeting the set.
    pub fn covering_number(&self, coarse: u32) -> Result<u64, GridError> {
        Ok(self.coarsen(coarse)?.len() as u64)
    }

    /// Cells meeting the closed interval `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> GridSet1D {
        let d = self.scale.delta();
        GridSet1D {
            scale: self.scale,
            cells: self
                .cells
                .iter()
                .copied()
                .filter(|&j| (j as f64) * d <= hi && ((j + 1) as f64) * d >= lo)
                .collect(),
        }
    }

    /// Number of cells inside the dyadic interval of level `m` and index `t`
    /// (i.e. `[t 2^-m, (t+1) 2^-m]`).
    pub fn count_in_dyadic(&self, m: u32, t: u64) -> usize {
        let shift = self.scale.k() - m;
        let lo = t << shift;
        let hi = (t + 1) << shift;
        let a = self.cells.partition_point(|&j| j < lo);
        let b = self.cells.partition_point(|&j| j < hi);
        b - a
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("gridset1d k={}\n", self.scale.k());
        for j in &self.cells {
            let _ = writeln!(s, "{j}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GridError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(GridError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let scale = parse_header(header, "gridset1d")?;
        let mut cells = Vec::new();
        let mut prev: Option<u64> = None;
        for (n, line) in lines {
            let j: u64 = line.trim().parse().map_err(|_| GridError::Parse {
                line: n + 1,
                message: format!("bad cell index '{}'", line.trim()),
            })?;
            if prev.is_some_and(|p| p >= j) {
                return Err(GridError::Parse {
                    line: n + 1,
                    message: "cell indices must be strictly ascending".into(),
                });
            }
            prev = Some(j);
            cells.push(j);
        }
        GridSet1D::new(scale, cells)
    }
}

fn parse_header(header: &str, tag: &str) -> Result<Scale, GridError> {
    let bad = || GridError::Parse {
        line: 1,
        message: format!("expected header '{tag} k=<k>'"),
    };
    let mut parts = header.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(bad());
    }
    let k: u32 = parts
        .next()
        .and_then(|p| p.strip_prefix("k="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Scale::new(k)
}

/// Subset of the square cells `[i 2^-k, (i+1) 2^-k] x [j 2^-k, (j+1) 2^-k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridSet2D {
    scale: Scale,
    cells: Vec<(u64, u64)>,
}

impl GridSet2D {
    pub fn new<I: IntoIterator<Item = (u64, u64)>>(
        scale: Scale,
        cells: I,
    ) -> Result<Self, GridError> {
        let set: BTreeSet<(u64, u64)> = cells.into_iter().collect();
        let n = scale.cells();
        if let Some(&(i, j)) = set.iter().find(|(i, j)| *i >= n || *j >= n) {
            return Err(GridError::CellOutOfRange {
                index: i.max(j),
                k: scale.k(),
            });
        }
        Ok(GridSet2D {
            scale,
            cells: set.into_iter().collect(),
        })
    }

    pub fn full(scale: Scale) -> Self {
        let n = scale.cells();
        GridSet2D {
            scale,
            cells: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        }
    }

    pub fn product(a: &GridSet1D, b: &GridSet1D) -> Result<Self, GridError> {
        if a.scale != b.scale {
            return Err(GridError::ScaleMismatch(a.scale.k(), b.scale.k()));
        }
        Ok(GridSet2D {
            scale: a.scale,
            cells: a
                .cells
                .iter()
                .flat_map(|&i| b.cells.iter().map(move |&j| (i, j)))
                .collect(),
        })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn cells(&self) -> &[(u64, u64)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: u64, j: u64) -> bool {
        self.cells.binary_search(&(i, j)).is_ok()
    }

    pub fn cell_box(&self, (i, j): (u64, u64)) -> [Interval; 2] {
        let k = self.scale.k();
        [Interval::dyadic(i, k), Interval::dyadic(j, k)]
    }

    pub fn coarsen(&self, coarse: u32) -> Result<GridSet2D, GridError> {
        let k = self.scale.k();
        if coarse < 1 || coarse > k {
            return Err(GridError::CoarseScaleOutOfRange { coarse, k });
        }
        let shift = k - coarse;
        let set: BTreeSet<(u64, u64)> = self
            .cells
            .iter()
            .map(|(i, j)| (i >> shift, j >> shift))
            .collect();
        Ok(GridSet2D {
            scale: Scale(coarse),
            cells: set.into_iter().collect(),
        })
    }

    pub fn covering_number(&self, coarse: u32) -> Result<u64, GridError> {
        Ok(self.coarsen(coarse)?.len() as u64)
    }

    /// Projection onto the first coordinate.
    pub fn columns(&self) -> GridSet1D {
        let set: BTreeSet<u64> = self.cells.iter().map(|c| c.0).collect();
        GridSet1D {
            scale: self.scale,
            cells: set.into_iter().collect(),
        }
    }

    /// Projection onto the second coordinate.
    pub fn rows(&self) -> GridSet1D {
        let set: BTreeSet<u64> = self.cells.iter().map(|c| c.1).collect();
        GridSet1D {
            scale: self.scale,
            cells: set.into_iter().collect(),
        }
    }

    pub fn filter<F: FnMut(&(u64, u64)) -> bool>(&self, mut keep: F) -> GridSet2D {
        GridSet2D {
            scale: self.scale,
            cells: self.cells.iter().copied().filter(|c| keep(c)).collect(),
        }
    }

    pub fn intersection(&self, other: &GridSet2D) -> GridSet2D {
        self.filter(|&(i, j)| other.contains(i, j))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("gridset2d k={}\n", self.scale.k());
        for (i, j) in &self.cells {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GridError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(GridError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let scale = parse_header(header, "gridset2d")?;
        let mut cells = Vec::new();
        let mut prev: Option<(u64, u64)> = None;
        for (n, line) in lines {
            let bad = || GridError::Parse {
                line: n + 1,
                message: format!("bad cell '{}'", line.trim()),
            };
            let mut it = line.split_whitespace();
            let i: u64 = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let j: u64 = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            if prev.is_some_and(|p| p >= (i, j)) {
                return Err(GridError::Parse {
                    line: n + 1,
                    message: "cells must be strictly ascending".into(),
                });
            }
            prev = Some((i, j));
            cells.push((i, j));
        }
        GridSet2D::new(scale, cells)
    }
}
