use crate::error::{Error, Result};

/// Bisection for the switching point of a monotone predicate on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` and returns its midpoint.
pub fn threshold_scan(mut predicate: impl FnMut(f64) -> bool, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    try_threshold_scan(|x| Ok(predicate(x)), lo, hi, tol)
}

/// [`threshold_scan`] for predicates that can fail.
pub fn try_threshold_scan(mut predicate: impl FnMut(f64) -> Result<bool>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let valid = lo < hi && tol > 0.0;
    if !valid {
        return Err(Error::InvalidParameter(format!(
            "bad bracket [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let at_lo = predicate(a)?;
    if at_lo == predicate(b)? {
        return Err(Error::ConstantPredicate { lo, hi });
    }
    while b - a >= tol {
        let mid = 0.5 * (a + b);
        if predicate(mid)? == at_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let x = threshold_scan(|x| x * x > 2.0, 0.0, 2.0, 1e-10).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-10);
        let y = threshold_scan(|x| x < 0.3, 0.0, 1.0, 1e-6).unwrap();
        assert!((y - 0.3).abs() < 1e-6);
    }

    #[test]
    fn constant_predicate_rejected() {
        assert_eq!(
            threshold_scan(|_| true, 0.0, 1.0, 1e-6).unwrap_err(),
            Error::ConstantPredicate { lo: 0.0, hi: 1.0 }
        );
        assert!(threshold_scan(|x| x > 0.5, 1.0, 0.0, 1e-6).is_err());
    }
}
