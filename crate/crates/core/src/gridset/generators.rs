use super::{GridError, GridSet1D, Scale, MAX_SCALE};

// guards floor/ceil of 2^(k t) against representation error when k t is an integer
const EPS: f64 = 1e-9;

/// Arithmetic-progression set: `floor(delta^-alpha)` cells, spaced
/// `ceil(delta^(alpha+eta) 2^k)` cells apart, starting at cell 0. Cells that
/// would fall past the unit interval (possible only through rounding when
/// `eta = 0`) are dropped.
pub fn gen_ap(alpha: f64, eta: f64, scale: Scale) -> Result<GridSet1D, GridError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(eta >= 0.0) || alpha + eta > 1.0 + EPS {
        return Err(GridError::InvalidParameters(format!(
            "arithmetic progression needs 0 < alpha <= 1, eta >= 0, alpha + eta <= 1 \
             (alpha={alpha}, eta={eta})"
        )));
    }
    let k = scale.k() as f64;
    let count = ((k * alpha).exp2() + EPS).floor() as u64;
    let spacing = ((k * (1.0 - alpha - eta)).max(0.0).exp2() - EPS).ceil().max(1.0) as u64;
    let n = scale.cells();
    GridSet1D::new(
        scale,
        (0..count).map(|j| j * spacing).take_while(|&c| c < n),
    )
}

/// Self-similar set of all `depth`-digit base-`base` numbers whose digits lie
/// in `pattern`, at scale `k = depth log2(base)`.
pub fn gen_cantor(pattern: &[u64], base: u64, depth: u32) -> Result<GridSet1D, GridError> {
    if base < 2 || !base.is_power_of_two() {
        return Err(GridError::InvalidParameters(format!(
            "base {base} is not a power of two >= 2, so digits do not align to the dyadic grid"
        )));
    }
    if pattern.is_empty() {
        return Err(GridError::InvalidParameters("empty digit pattern".into()));
    }
    if let Some(d) = pattern.iter().find(|&&d| d >= base) {
        return Err(GridError::InvalidParameters(format!(
            "digit {d} not below base {base}"
        )));
    }
    if depth == 0 {
        return Err(GridError::InvalidParameters("depth must be positive".into()));
    }
    let bits = base.trailing_zeros();
    let k = depth
        .checked_mul(bits)
        .filter(|&k| k <= MAX_SCALE)
        .ok_or(GridError::ScaleOutOfRange(depth as i64 * bits as i64))?;
    let scale = Scale::new(k)?;
    let mut digits: Vec<u64> = pattern.to_vec();
    digits.sort_unstable();
    digits.dedup();
    let mut cells = vec![0u64];
    for _ in 0..depth {
        cells = cells
            .iter()
            .flat_map(|&c| digits.iter().map(move |&d| c * base + d))
            .collect();
    }
    GridSet1D::new(scale, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: u32) -> Scale {
        Scale::new(k).unwrap()
    }

    #[test]
    fn ap_half_dimension() {
        let a = gen_ap(0.5, 0.0, s(8)).unwrap();
        assert_eq!(a.len(), 16);
        assert!(a.cells().windows(2).all(|w| w[1] - w[0] == 16));
        let full = gen_ap(1.0, 0.0, s(6)).unwrap();
        assert_eq!(full, GridSet1D::full(s(6)));
    }

    #[test]
    fn ap_with_eta_is_compressed() {
        let a = gen_ap(0.5, 0.25, s(8)).unwrap();
        assert_eq!(a.len(), 16);
        // delta^(alpha+eta) 2^k = 2^(8 * 0.25) = 4 cells
        assert!(a.cells().windows(2).all(|w| w[1] - w[0] == 4));
    }

    #[test]
    fn ap_rejects_bad_parameters() {
        assert!(gen_ap(0.75, 0.5, s(8)).is_err());
        assert!(gen_ap(0.0, 0.0, s(8)).is_err());
        assert!(gen_ap(0.5, -0.1, s(8)).is_err());
    }

    #[test]
    fn cantor_counts() {
        let c = gen_cantor(&[0, 1], 4, 5).unwrap();
        assert_eq!(c.scale().k(), 10);
        assert_eq!(c.len(), 32);
        assert_eq!(gen_cantor(&[0, 1, 2, 3], 4, 3).unwrap(), GridSet1D::full(s(6)));
        let point = gen_cantor(&[0], 2, 7).unwrap();
        assert_eq!(point.cells(), &[0]);
    }

    #[test]
    fn cantor_rejects_misaligned_base() {
        assert!(gen_cantor(&[0, 2], 3, 4).is_err());
        assert!(gen_cantor(&[], 4, 4).is_err());
        assert!(gen_cantor(&[4], 4, 4).is_err());
        assert!(gen_cantor(&[0], 4, 16).is_err());
    }
}
