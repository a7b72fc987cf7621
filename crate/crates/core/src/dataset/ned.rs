use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equal-width binning over the training range of one variable.
///
/// The `n_bins` intervals partition `[lower, upper]`; all bins are
/// left-closed and the last bin is right-closed. Out-of-range values clamp
/// to the first or last bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NedModel {
    pub lower: f64,
    pub upper: f64,
    pub n_bins: usize,
}

impl NedModel {
    /// Interior edges (`n_bins - 1` of them) at equal widths.
    pub fn edges(&self) -> Vec<f64> {
        let width = (self.upper - self.lower) / self.n_bins as f64;
        (1..self.n_bins)
            .map(|i| self.lower + width * i as f64)
            .collect()
    }

    pub fn assign(&self, x: f64) -> usize {
        if x <= self.lower {
            return 0;
        }
        if x >= self.upper {
            return self.n_bins - 1;
        }
        let width = (self.upper - self.lower) / self.n_bins as f64;
        (((x - self.lower) / width) as usize).min(self.n_bins - 1)
    }

    /// Human-readable bounds of one bin, reflecting the clamping rule.
    pub fn interval_label(&self, bin: usize) -> String {
        let edges = self.edges();
        match (bin, self.n_bins) {
            (0, 1) => "(-inf, +inf)".to_string(),
            (0, _) => format!("(-inf, {:.4})", edges[0]),
            (b, n) if b + 1 == n => format!("[{:.4}, +inf)", edges[b - 1]),
            (b, _) => format!("[{:.4}, {:.4})", edges[b - 1], edges[b]),
        }
    }
}

/// Fits equal-width bins over `[min, max]` of the training values.
pub fn fit_ned(values: &[f64], n_bins: usize) -> Result<NedModel> {
    if n_bins < 2 {
        return Err(Error::InvalidConfig(format!(
            "ned bin count must be at least 2, got {n_bins}"
        )));
    }
    if values.is_empty() {
        return Err(Error::DegenerateInput("ned fit on empty values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("ned input contains non-finite values".into()));
    }
    let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(upper > lower) {
        return Err(Error::DegenerateInput(
            "ned fit on constant values: no range to split".into(),
        ));
    }
    Ok(NedModel {
        lower,
        upper,
        n_bins,
    })
}
