use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const QUARTILE_METHOD: &str =
    "linear interpolation between order statistics at position 1+(n-1)p (type 7)";
pub const WHISKER_RULE: &str =
    "whiskers at the most extreme data points within 1.5*IQR of the box; points beyond are outliers";

/// Median, quartiles, 1.5·IQR whiskers, outliers and mean of one parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub label: String,
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
    pub mean: f64,
}

/// Type-7 quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_boxplot(label: &str, values: &[f64]) -> Result<BoxplotSummary> {
    if values.is_empty() {
        return Err(Error::Domain(format!("no values to summarize for {label}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite value in {label}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || sorted.iter().copied().filter(|&v| v >= lo_fence && v <= hi_fence);
    // The median always lies inside the fences, so both folds see data.
    let whisker_low = inside().fold(f64::INFINITY, f64::min);
    let whisker_high = inside().fold(f64::NEG_INFINITY, f64::max);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < whisker_low || v > whisker_high)
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(BoxplotSummary {
        label: label.to_string(),
        count: values.len(),
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
        mean,
    })
}
