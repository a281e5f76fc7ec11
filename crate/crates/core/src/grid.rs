use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `lo` to `hi` inclusive. Endpoints are exact.
pub fn grid(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::config("grid needs at least one point"));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::config("grid bounds must be finite"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    if !(lo < hi) {
        return Err(Error::config(format!("grid needs lo < hi, got [{lo}, {hi}]")));
    }
    let last = (count - 1) as f64;
    let mut pts: Vec<f64> = match spacing {
        Spacing::Linear => (0..count).map(|i| lo + (hi - lo) * i as f64 / last).collect(),
        Spacing::Log => {
            if !(lo > 0.0) {
                return Err(Error::config("log spacing requires lo > 0"));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..count).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
        }
    };
    pts[0] = lo;
    pts[count - 1] = hi;
    Ok(pts)
}
