use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const LOW_PERCENTILE: f64 = 5.0;
pub const HIGH_PERCENTILE: f64 = 95.0;

/// Per-feature min-max scaling with robust endpoints: the 5th percentile maps
/// to 0 and the 95th to 1, values outside are clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileScaler {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

/// Percentile of an ascending slice, interpolating linearly between order
/// statistics.
pub fn percentile_sorted(sorted: &[f64], pct: f64) -> f64 {
    let pos = pct / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn fit_percentile_scaler<R: AsRef<[f64]>>(rows: &[R]) -> Result<PercentileScaler> {
    if rows.len() < 2 {
        return Err(Error::invalid(format!("percentile scaler needs at least 2 rows, got {}", rows.len())));
    }
    let dim = rows[0].as_ref().len();
    if let Some(r) = rows.iter().find(|r| r.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: r.as_ref().len(),
        });
    }
    let mut low = Vec::with_capacity(dim);
    let mut high = Vec::with_capacity(dim);
    let mut column = vec![0.0; rows.len()];
    for j in 0..dim {
        for (c, r) in column.iter_mut().zip(rows) {
            *c = r.as_ref()[j];
        }
        if column.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value in feature {j}")));
        }
        column.sort_by(f64::total_cmp);
        low.push(percentile_sorted(&column, LOW_PERCENTILE));
        high.push(percentile_sorted(&column, HIGH_PERCENTILE));
    }
    Ok(PercentileScaler { low, high })
}

impl PercentileScaler {
    pub fn dim(&self) -> usize {
        self.low.len()
    }

    /// Scales one coordinate.
    pub fn scale(&self, feature: usize, value: f64) -> f64 {
        let (lo, hi) = (self.low[feature], self.high[feature]);
        if hi <= lo {
            return 0.5;
        }
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(x.iter().enumerate().map(|(j, &v)| self.scale(j, v)).collect())
    }

    pub fn transform_rows<R: AsRef<[f64]>>(&self, rows: &[R]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.transform(r.as_ref())).collect()
    }
}
