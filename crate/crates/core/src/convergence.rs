//! Observed-order estimation from error ladders.

/// Least-squares slope of `ln(error)` against `ln(size)`.
///
/// Returns `None` with fewer than two points or when an error or size is not
/// strictly positive (the logarithm would be undefined).
pub fn fitted_order(sizes: &[f64], errors: &[f64]) -> Option<f64> {
    if sizes.len() != errors.len() || sizes.len() < 2 {
        return None;
    }
    if sizes
        .iter()
        .chain(errors)
        .any(|v| *v <= 0.0 || !v.is_finite())
    {
        return None;
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// `log2(coarse / fine)` for a pair that differ by a factor of two in size.
pub fn halving_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_law() {
        let sizes = [0.1, 0.05, 0.025];
        let errors: Vec<f64> = sizes.iter().map(|h: &f64| 3.0 * h.powi(4)).collect();
        assert_abs_diff_eq!(fitted_order(&sizes, &errors).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(fitted_order(&[0.1], &[1.0]), None);
        assert_eq!(fitted_order(&[0.1, 0.2], &[1.0, 0.0]), None);
        assert_eq!(fitted_order(&[0.1, 0.1], &[1.0, 2.0]), None);
        assert_eq!(fitted_order(&[0.1, 0.2], &[1.0]), None);
    }

    #[test]
    fn halving() {
        assert_abs_diff_eq!(halving_order(32.0, 1.0), 5.0, epsilon = 1e-15);
    }
}
