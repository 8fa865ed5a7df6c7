//! Quadtree partition into squares on which each tracked function has a
//! pinned dyadic magnitude.

use rayon::prelude::*;
use serde::Serialize;

use super::{Band, Cube, CubeDecomposition, DyadicSquare, GeomError, SmoothMap2};
use crate::gridset::{GridSet2D, Scale};

/// Result of [`band_partition`].
#[derive(Clone, Debug)]
pub struct BandPartition {
    pub decomposition: CubeDecomposition,
    /// `|A cap leftover| / |A|`.
    pub leftover_fraction: f64,
    /// `delta^w`.
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandSummary {
    pub cubes: usize,
    pub leftover_cells: usize,
    pub leftover_fraction: f64,
}

impl BandPartition {
    pub fn summary(&self) -> BandSummary {
        BandSummary {
            cubes: self.decomposition.cubes.len(),
            leftover_cells: self.decomposition.leftover.len(),
            leftover_fraction: self.leftover_fraction,
        }
    }
}

enum Verdict {
    Accept(Vec<Band>),
    Small,
    Split,
}

/// Largest `e` with `2^e <= x`, for positive finite `x`.
fn floor_log2(x: f64) -> i32 {
    let mut e = x.log2().floor() as i32;
    // log2 can be off by one ulp near powers of two
    while (e as f64).exp2() > x {
        e -= 1;
    }
    while ((e + 1) as f64).exp2() <= x {
        e += 1;
    }
    e
}

fn judge(fs: &[&dyn SmoothMap2], sq: &DyadicSquare, threshold: f64) -> Verdict {
    let r = sq.rect();
    let mut bands = Vec::with_capacity(fs.len());
    let mut split = false;
    for (j, f) in fs.iter().enumerate() {
        let (lo, hi) = f.enclosure(&r);
        let (alo, ahi) = if lo >= 0.0 {
            (lo, hi)
        } else if hi <= 0.0 {
            (-hi, -lo)
        } else {
            (0.0, (-lo).max(hi))
        };
        if ahi < threshold {
            return Verdict::Small;
        }
        if split || alo < threshold {
            split = true;
            continue;
        }
        let e = floor_log2(alo);
        let v = (e as f64).exp2();
        if v >= threshold && ahi < 4.0 * v {
            bands.push(Band { j, log2_v: e });
        } else {
            split = true;
        }
    }
    if split {
        Verdict::Split
    } else {
        Verdict::Accept(bands)
    }
}

/// Splits `[0, 1]^2` into dyadic squares meeting `A` on which, for every
/// `j`, the enclosure of `|f_j|` lies in `[v, 4v)` for a power of two
/// `v >= delta^w`. Squares where some `|f_j|` stays below `delta^w`, and
/// cells still undecided at the given scale, make up the leftover.
pub fn band_partition(
    fs: &[&dyn SmoothMap2],
    w: f64,
    scale: Scale,
    a: &GridSet2D,
) -> Result<BandPartition, GeomError> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(GeomError::Precondition(format!("w = {w} must be positive")));
    }
    if a.scale() != scale {
        return Err(GeomError::Precondition(format!(
            "set is at scale k={}, partition requested at k={}",
            a.scale().k(),
            scale.k()
        )));
    }
    let threshold = scale.delta().powf(w);
    let mut cubes = Vec::new();
    let mut left = Vec::new();
    refine(fs, threshold, scale.k(), DyadicSquare::ROOT, a.cells().to_vec(), &mut cubes, &mut left);
    let leftover = GridSet2D::new(scale, left).expect("cells of A");
    let leftover_fraction = if a.is_empty() {
        0.0
    } else {
        leftover.len() as f64 / a.len() as f64
    };
    Ok(BandPartition {
        decomposition: CubeDecomposition { cubes, leftover },
        leftover_fraction,
        threshold,
    })
}

fn refine(
    fs: &[&dyn SmoothMap2],
    threshold: f64,
    k: u32,
    sq: DyadicSquare,
    cells: Vec<(u64, u64)>,
    cubes: &mut Vec<Cube>,
    left: &mut Vec<(u64, u64)>,
) {
    if cells.is_empty() {
        return;
    }
    match judge(fs, &sq, threshold) {
        Verdict::Accept(bands) => cubes.push(Cube {
            square: sq,
            bands,
            flagged: false,
        }),
        Verdict::Small => left.extend(cells),
        Verdict::Split if sq.k >= k => left.extend(cells),
        Verdict::Split => {
            let shift = k - sq.k - 1;
            let children = sq.children();
            let mut parts: [Vec<(u64, u64)>; 4] = Default::default();
            for c in cells {
                let di = ((c.0 >> shift) & 1) as usize;
                let dj = ((c.1 >> shift) & 1) as usize;
                parts[2 * di + dj].push(c);
            }
            if sq.k < 3 {
                let results: Vec<(Vec<Cube>, Vec<(u64, u64)>)> = children
                    .into_par_iter()
                    .zip(parts.into_par_iter())
                    .map(|(c, p)| {
                        let (mut cu, mut le) = (Vec::new(), Vec::new());
                        refine(fs, threshold, k, c, p, &mut cu, &mut le);
                        (cu, le)
                    })
                    .collect();
                for (cu, le) in results {
                    cubes.extend(cu);
                    left.extend(le);
                }
            } else {
                for (c, p) in children.into_iter().zip(parts) {
                    refine(fs, threshold, k, c, p, cubes, left);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomdecomp::PolyMap;
    use crate::polyexpr::{mp_numerator, parse_poly2, Var};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(k: u32) -> Scale {
        Scale::new(k).unwrap()
    }

    #[test]
    fn constant_function_is_one_cube() {
        let one = PolyMap::new(parse_poly2("1").unwrap());
        let k = 5;
        let bp = band_partition(&[&one], 0.5, s(k), &GridSet2D::full(s(k))).unwrap();
        assert_eq!(bp.decomposition.cubes.len(), 1);
        assert_eq!(bp.decomposition.cubes[0].square, DyadicSquare::ROOT);
        assert_eq!(bp.decomposition.cubes[0].bands, vec![Band { j: 0, log2_v: 0 }]);
        assert!(bp.decomposition.leftover.is_empty());
    }

    #[test]
    fn coordinate_function_strip() {
        // delta^w = 2^-3 at k = 6
        let k = 6;
        let x = PolyMap::new(parse_poly2("x").unwrap());
        let bp = band_partition(&[&x], 0.5, s(k), &GridSet2D::full(s(k))).unwrap();
        let strip: Vec<(u64, u64)> = GridSet2D::full(s(k)).filter(|c| c.0 < 8).cells().to_vec();
        assert_eq!(bp.decomposition.leftover.cells(), &strip[..]);
        for c in &bp.decomposition.cubes {
            let r = c.square.rect();
            let v = c.bands[0].v();
            assert!(v <= r.x0 && r.x1 <= 4.0 * v, "{r} v={v}");
        }
        let area: f64 = bp.decomposition.cubes.iter().map(|c| c.square.side().powi(2)).sum();
        assert!((area - 7.0 / 8.0).abs() < 1e-12);
    }

    fn tracked(p: &str) -> Vec<PolyMap> {
        let p = parse_poly2(p).unwrap();
        let px = p.partial(Var::X, 1);
        let py = p.partial(Var::Y, 1);
        let pxy = px.partial(Var::Y, 1);
        [px, py, pxy, mp_numerator(&p)].into_iter().map(PolyMap::new).collect()
    }

    #[test]
    fn band_certificates_hold_on_samples() {
        let maps = tracked("x^2 + x*y + y^2");
        let fs: Vec<&dyn SmoothMap2> = maps.iter().map(|m| m as &dyn SmoothMap2).collect();
        let k = 8;
        let bp = band_partition(&fs, 0.2, s(k), &GridSet2D::full(s(k))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(!bp.decomposition.cubes.is_empty());
        for c in &bp.decomposition.cubes {
            let r = c.square.rect();
            for b in &c.bands {
                assert!(b.v() >= bp.threshold);
                for _ in 0..50 {
                    let z = r.lerp(rng.gen(), rng.gen());
                    let v = fs[b.j].value(z).abs();
                    assert!(b.v() <= v && v < 4.0 * b.v(), "f{} = {v} on {r}, v = {}", b.j, b.v());
                }
            }
        }
    }

    #[test]
    fn leftover_shrinks_with_scale() {
        let maps = tracked("x^2 + x*y + y^2");
        let fs: Vec<&dyn SmoothMap2> = maps.iter().map(|m| m as &dyn SmoothMap2).collect();
        let fr: Vec<f64> = [6, 8, 10]
            .iter()
            .map(|&k| band_partition(&fs, 0.2, s(k), &GridSet2D::full(s(k))).unwrap().leftover_fraction)
            .collect();
        assert!(fr[0] > fr[1] && fr[1] > fr[2], "{fr:?}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let x = PolyMap::new(parse_poly2("x").unwrap());
        assert!(band_partition(&[&x], 0.0, s(4), &GridSet2D::full(s(4))).is_err());
        assert!(band_partition(&[&x], 0.5, s(4), &GridSet2D::full(s(5))).is_err());
    }
}
