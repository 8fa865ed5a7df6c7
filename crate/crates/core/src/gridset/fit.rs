use serde::Serialize;

use super::GridError;

/// Ordinary least-squares fit of `log2(value)` against `k`; `slope` is the
/// empirical exponent `s` in `value ~ delta^-s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit, in log2 units.
    pub residual: f64,
    /// `(k, log2 value)` pairs the fit was computed from.
    pub points: Vec<(f64, f64)>,
}

impl ExponentFit {
    pub fn predict(&self, k: f64) -> f64 {
        self.intercept + self.slope * k
    }
}

pub fn exponent_regression(points: &[(f64, f64)]) -> Result<ExponentFit, GridError> {
    if points.len() < 3 {
        return Err(GridError::TooFewScales(points.len()));
    }
    if let Some(&(k, v)) = points.iter().find(|(k, v)| !(*v > 0.0) || !k.is_finite() || !v.is_finite()) {
        return Err(GridError::DegenerateFit(format!(
            "value {v} at k={k} is not a positive finite number"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(k, v)| (k, v.log2())).collect();
    let n = logs.len() as f64;
    let mk = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mk).powi(2)).sum();
    if sxx == 0.0 {
        return Err(GridError::DegenerateFit("all scales identical".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mk) * (p.1 - mv)).sum();
    let slope = sxy / sxx;
    let intercept = mv - slope * mk;
    let residual = (logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        points: logs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_powers() {
        let pts: Vec<_> = (10..15).map(|k| (k as f64, (k as f64).exp2())).collect();
        let f = exponent_regression(&pts).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn noisy_three_halves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<_> = (10..15)
            .map(|k| {
                let noise: f64 = rng.gen_range(0.9..1.1);
                (k as f64, (1.5 * k as f64).exp2() * noise)
            })
            .collect();
        let f = exponent_regression(&pts).unwrap();
        assert!((f.slope - 1.5).abs() < 0.05, "slope {}", f.slope);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let pts: Vec<_> = (0..5).map(|k| (k as f64, 12.0)).collect();
        assert_eq!(exponent_regression(&pts).unwrap().slope, 0.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            exponent_regression(&[(1.0, 2.0), (2.0, 4.0)]),
            Err(GridError::TooFewScales(2))
        ));
        assert!(exponent_regression(&[(1.0, 2.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(exponent_regression(&[(1.0, 2.0), (1.0, 4.0), (1.0, 1.0)]).is_err());
    }
}
