//! Blaschke curvature of planar 3-webs given by three smooth functions.

use super::{GeomError, SmoothMap2};
use crate::polyexpr::Var;

/// Pairwise gradient wedges below this magnitude are treated as degenerate.
pub const MIN_WEDGE: f64 = 1e-8;

/// Step in `(phi1, phi2)` coordinates for the mixed difference quotient.
const STEP: f64 = 1e-4;

fn wedge(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn check_point(fs: [&dyn SmoothMap2; 3], p: [f64; 2]) -> Result<[[f64; 2]; 3], GeomError> {
    if fs.iter().any(|f| f.is_singular(p)) {
        return Err(GeomError::Singular { x: p[0], y: p[1] });
    }
    let g = [fs[0].gradient(p), fs[1].gradient(p), fs[2].gradient(p)];
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let w = wedge(g[a], g[b]);
        if !(w.abs() >= MIN_WEDGE) {
            return Err(GeomError::DegenerateGradients {
                x: p[0],
                y: p[1],
                pair: (a + 1, b + 1),
                wedge: w,
            });
        }
    }
    Ok(g)
}

/// Coefficient of the curvature form `2 d_x d_y log|P_x / P_y| dx ^ dy` of the
/// web `(x, y, P)`, from derivatives of `P` up to order 3:
/// `2 [P_y^2 (P_x P_xxy - P_xx P_xy) - P_x^2 (P_y P_xyy - P_xy P_yy)] / (P_x P_y)^2`.
pub fn chart_curvature(p: &dyn SmoothMap2, q: [f64; 2]) -> Result<f64, GeomError> {
    let d = |a, b| p.derivative(a, b, q);
    let (px, py) = (d(1, 0), d(0, 1));
    if p.is_singular(q) {
        return Err(GeomError::Singular { x: q[0], y: q[1] });
    }
    if !(px.abs() >= MIN_WEDGE && py.abs() >= MIN_WEDGE) {
        return Err(GeomError::DegenerateGradients {
            x: q[0],
            y: q[1],
            pair: if px.abs() < MIN_WEDGE { (2, 3) } else { (1, 3) },
            wedge: if px.abs() < MIN_WEDGE { px } else { -py },
        });
    }
    let (pxx, pxy, pyy) = (d(2, 0), d(1, 1), d(0, 2));
    let (pxxy, pxyy) = (d(2, 1), d(1, 2));
    let m = py * py * (px * pxxy - pxx * pxy) - px * px * (py * pxyy - pxy * pyy);
    Ok(2.0 * m / (px * py).powi(2))
}

/// Point `q` near `start` with `(phi1(q), phi2(q)) = target`, by Newton's
/// method.
fn invert(phi1: &dyn SmoothMap2, phi2: &dyn SmoothMap2, target: [f64; 2], start: [f64; 2]) -> Result<[f64; 2], GeomError> {
    let mut q = start;
    for _ in 0..60 {
        let r = [phi1.value(q) - target[0], phi2.value(q) - target[1]];
        let (g1, g2) = (phi1.gradient(q), phi2.gradient(q));
        let det = wedge(g1, g2);
        if !(det.abs() >= MIN_WEDGE) {
            break;
        }
        let dx = (r[0] * g2[1] - r[1] * g1[1]) / det;
        let dy = (g1[0] * r[1] - g2[0] * r[0]) / det;
        q = [q[0] - dx, q[1] - dy];
        if dx.abs().max(dy.abs()) <= 4.0 * f64::EPSILON * (1.0 + q[0].abs().max(q[1].abs())) {
            return Ok(q);
        }
    }
    Err(GeomError::NewtonFailed { u: target[0], v: target[1] })
}

/// `log |g_u / g_v|` where `grad phi3 = g_u grad phi1 + g_v grad phi2` at `q`.
fn log_ratio(fs: [&dyn SmoothMap2; 3], q: [f64; 2]) -> f64 {
    let (g1, g2, g3) = (fs[0].gradient(q), fs[1].gradient(q), fs[2].gradient(q));
    let det = wedge(g1, g2);
    let gu = wedge(g3, g2) / det;
    let gv = wedge(g1, g3) / det;
    (gu / gv).abs().ln()
}

/// Curvature coefficient computed in the chart `(u, v) = (phi1, phi2)`: the
/// local inverse is found by Newton's method and `2 d_u d_v log|g_u / g_v|`
/// is taken by a centered mixed difference quotient.
pub fn blaschke_curvature_numeric(fs: [&dyn SmoothMap2; 3], p: [f64; 2]) -> Result<f64, GeomError> {
    check_point(fs, p)?;
    let (u0, v0) = (fs[0].value(p), fs[1].value(p));
    let mut acc = 0.0;
    for (su, sv, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
        let q = invert(fs[0], fs[1], [u0 + su * STEP, v0 + sv * STEP], p)?;
        if fs.iter().any(|f| f.is_singular(q)) {
            return Err(GeomError::Singular { x: q[0], y: q[1] });
        }
        acc += sign * log_ratio(fs, q);
    }
    Ok(2.0 * acc / (4.0 * STEP * STEP))
}

/// Coefficient of the Blaschke curvature form
/// `2 d_phi1 d_phi2 log((d phi3 / d phi1) / (d phi3 / d phi2)) dphi1 ^ dphi2`
/// at `p`. When `phi1 = x` and `phi2 = y` the closed form of
/// [`chart_curvature`] is used; otherwise [`blaschke_curvature_numeric`].
pub fn blaschke_curvature(
    phi1: &dyn SmoothMap2,
    phi2: &dyn SmoothMap2,
    phi3: &dyn SmoothMap2,
    p: [f64; 2],
) -> Result<f64, GeomError> {
    let fs = [phi1, phi2, phi3];
    check_point(fs, p)?;
    if phi1.as_coordinate() == Some(Var::X) && phi2.as_coordinate() == Some(Var::Y) {
        chart_curvature(phi3, p)
    } else {
        blaschke_curvature_numeric(fs, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomdecomp::{pinned_distance_map, LinearProjection, PolyMap};
    use crate::polyexpr::parse_poly2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(src: &str) -> PolyMap {
        PolyMap::new(parse_poly2(src).unwrap())
    }

    #[test]
    fn linear_projections_are_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b, c) = (LinearProjection::new(0.1), LinearProjection::new(1.2), LinearProjection::new(2.4));
        for _ in 0..100 {
            let p = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            assert!(blaschke_curvature(&a, &b, &c, p).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn product_web_is_flat() {
        let (x, y, xy) = (poly("x"), poly("y"), poly("x*y"));
        let k = blaschke_curvature(&x, &y, &xy, [0.5, 1.0 / 3.0]).unwrap();
        assert!(k.abs() < 1e-12);
        let k = blaschke_curvature_numeric([&x, &y, &xy], [0.5, 1.0 / 3.0]).unwrap();
        assert!(k.abs() < 1e-6);
    }

    #[test]
    fn chart_formula_matches_numeric_route() {
        let (x, y) = (poly("x"), poly("y"));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for src in ["x^2 + x*y + y^2", "x + y + (x^2 + y^2)^2", "x^3 + 2*x*y^2 + y"] {
            let p = poly(src);
            let mut checked = 0;
            while checked < 20 {
                let q = [rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)];
                if p.derivative(1, 0, q).abs() < 0.1 || p.derivative(0, 1, q).abs() < 0.1 {
                    continue;
                }
                let a = chart_curvature(&p, q).unwrap();
                let b = blaschke_curvature_numeric([&x, &y, &p], q).unwrap();
                assert!((a - b).abs() <= 1e-3 * a.abs().max(b.abs()).max(1e-3), "{src} at {q:?}: {a} vs {b}");
                checked += 1;
            }
        }
    }

    #[test]
    fn pinned_distances_are_curved() {
        let d1 = pinned_distance_map([0.0, 0.0]);
        let d2 = pinned_distance_map([1.0, 0.0]);
        let d3 = pinned_distance_map([0.0, 1.0]);
        let k = blaschke_curvature(&d1, &d2, &d3, [0.4, 0.35]).unwrap();
        assert!(k.abs() > 1e-3, "{k}");
        // relabelling the web does not change the curvature up to sign
        let k2 = blaschke_curvature(&d2, &d1, &d3, [0.4, 0.35]).unwrap();
        assert!((k.abs() - k2.abs()).abs() < 1e-4 * k.abs());
    }

    #[test]
    fn degenerate_and_singular_points() {
        let d1 = pinned_distance_map([0.0, 0.0]);
        let d2 = pinned_distance_map([1.0, 0.0]);
        let d3 = pinned_distance_map([0.0, 1.0]);
        // on the segment between the second and third pins their gradients are opposite
        assert!(matches!(
            blaschke_curvature(&d1, &d2, &d3, [0.5, 0.5]),
            Err(GeomError::DegenerateGradients { pair: (2, 3), .. })
        ));
        assert!(matches!(blaschke_curvature(&d1, &d2, &d3, [0.0, 0.0]), Err(GeomError::Singular { .. })));
        let (x, y) = (poly("x"), poly("y"));
        assert!(blaschke_curvature(&x, &y, &poly("y^2"), [0.3, 0.3]).is_err());
    }
}
