//! Numerically stable primitives used throughout the crate.

use crate::error::{Error, Result};

/// Largest exponent we hand to `f64::exp` before declaring a range error;
/// `ln(f64::MAX)` is about 709.78.
pub const MAX_EXP: f64 = 709.0;

/// `ln(sum_i exp(log_weights[i] + exponents[i]))` via the maximum-shift
/// technique, finite and accurate whenever the true value is representable.
///
/// A `-inf` log weight drops its term; exponents must be finite. At least one
/// weight has to be non-zero.
pub fn log_sum_exp_weighted(log_weights: &[f64], exponents: &[f64]) -> Result<f64> {
    if log_weights.is_empty() {
        return Err(Error::EmptyInput("log_sum_exp_weighted needs at least one term"));
    }
    if log_weights.len() != exponents.len() {
        return Err(Error::InvalidArgument(format!(
            "log_sum_exp_weighted length mismatch: {} weights vs {} exponents",
            log_weights.len(),
            exponents.len()
        )));
    }
    if let Some(e) = exponents.iter().find(|e| !e.is_finite()) {
        return Err(Error::NonFinite(format!("exponent {e}")));
    }
    if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::NonFinite("log weight must be finite or -inf".into()));
    }

    let combined: Vec<f64> = log_weights
        .iter()
        .zip(exponents)
        .map(|(w, e)| w + e)
        .collect();
    let max = combined.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(
            "log_sum_exp_weighted: all weights are zero".into(),
        ));
    }
    let sum: f64 = combined.iter().map(|c| (c - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Max-shifted `ln(sum_i exp(terms[i]))` over a slice that is already in log
/// space. `-inf` terms contribute nothing.
pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Neumaier-compensated sum. Order-insensitive to within a couple of ulps,
/// which is what makes trace totals and Monte-Carlo reductions reproducible.
/// Infinities fall back to plain IEEE summation so sentinels propagate.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    if values.iter().any(|v| v.is_infinite()) {
        return values.iter().sum();
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and unbiased standard error of a sample, reduced with compensated
/// sums in index order.
pub(crate) fn mean_and_standard_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n >= 2, "need at least two samples for a standard error");
    let mean = compensated_sum(values) / n as f64;
    let squared: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = compensated_sum(&squared) / (n - 1) as f64;
    (mean, (variance / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weighted_lse_matches_reference_value() {
        // 0.5*exp(-2) + 0.5*exp(5) = 74.27424719290661 (50-digit arithmetic,
        // scripts/reference_values.py)
        let got = log_sum_exp_weighted(&[0.5f64.ln(), 0.5f64.ln()], &[-2.0, 5.0]).unwrap();
        assert_relative_eq!(got, 4.307764285893829, max_relative = 1e-12);
    }

    #[test]
    fn single_unit_term_is_zero() {
        assert_eq!(log_sum_exp_weighted(&[0.0], &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn shift_in_exponents_shifts_output() {
        let lw = [0.25f64.ln(), 0.75f64.ln()];
        let base = log_sum_exp_weighted(&lw, &[1.0, -3.0]).unwrap();
        let shifted = log_sum_exp_weighted(&lw, &[1.0 + 17.5, -3.0 + 17.5]).unwrap();
        assert_relative_eq!(shifted, base + 17.5, max_relative = 1e-12);
    }

    #[test]
    fn survives_exponents_that_overflow_naively() {
        let got = log_sum_exp_weighted(&[0.5f64.ln(), 0.5f64.ln()], &[800.0, 802.0]).unwrap();
        assert!(got.is_finite());
        assert_relative_eq!(got, 802.0 + (0.5 + 0.5 * (-2.0f64).exp()).ln(), max_relative = 1e-12);
    }

    #[test]
    fn empty_and_zero_weight_inputs_error() {
        assert!(log_sum_exp_weighted(&[], &[]).is_err());
        assert!(log_sum_exp_weighted(&[f64::NEG_INFINITY], &[0.0]).is_err());
        assert!(log_sum_exp_weighted(&[0.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn compensated_sum_handles_cancellation() {
        let values = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(&values), 1.0);
    }

    #[test]
    fn compensated_sum_propagates_infinity() {
        assert_eq!(compensated_sum(&[1.0, f64::INFINITY]), f64::INFINITY);
    }
}
