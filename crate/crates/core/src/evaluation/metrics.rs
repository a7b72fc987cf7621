use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Confusion counts with positive class = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// Tallies predictions against labels.
pub fn confusion(predictions: &[bool], labels: &[bool]) -> Result<ConfusionCounts> {
    if predictions.len() != labels.len() {
        return Err(Error::Contract(format!(
            "predictions ({}) and labels ({}) differ in length",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Contract("confusion of empty inputs".into()));
    }
    let mut c = ConfusionCounts {
        true_positives: 0,
        false_positives: 0,
        true_negatives: 0,
        false_negatives: 0,
    };
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (true, true) => c.true_positives += 1,
            (true, false) => c.false_positives += 1,
            (false, false) => c.true_negatives += 1,
            (false, true) => c.false_negatives += 1,
        }
    }
    Ok(c)
}

/// TP / (TP + FN): probability of predicting a positive when one occurs.
pub fn sensitivity(c: &ConfusionCounts) -> Result<f64> {
    let denom = c.true_positives + c.false_negatives;
    if denom == 0 {
        return Err(Error::UndefinedMetric(
            "sensitivity undefined: no positive labels".into(),
        ));
    }
    Ok(c.true_positives as f64 / denom as f64)
}

/// FP / (FP + TN): probability of predicting a positive under normal
/// conditions.
pub fn false_alarm_rate(c: &ConfusionCounts) -> Result<f64> {
    let denom = c.false_positives + c.true_negatives;
    if denom == 0 {
        return Err(Error::UndefinedMetric(
            "false alarm rate undefined: no negative labels".into(),
        ));
    }
    Ok(c.false_positives as f64 / denom as f64)
}

/// Renders a rate as a percentage with two decimals, e.g. `38.16%`.
pub fn percent(rate: f64) -> String {
    format!("{:.2}%", rate * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_all_four_cells() {
        let c = confusion(&[true, false], &[true, false]).unwrap();
        assert_eq!(c.true_positives, 1);
        assert_eq!(c.true_negatives, 1);
        assert_eq!(c.false_positives, 0);
        assert_eq!(c.false_negatives, 0);
    }

    #[test]
    fn all_positive_predictions() {
        let c = confusion(&[true, true, true], &[true, false, false]).unwrap();
        assert_eq!(c.true_positives, 1);
        assert_eq!(c.false_positives, 2);
    }

    #[test]
    fn empty_inputs_are_a_contract_error() {
        assert!(matches!(confusion(&[], &[]), Err(Error::Contract(_))));
    }

    #[test]
    fn length_mismatch_is_a_contract_error() {
        assert!(matches!(
            confusion(&[true], &[true, false]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn half_sensitivity_renders_to_two_decimals() {
        let c = ConfusionCounts {
            true_positives: 2,
            false_positives: 0,
            true_negatives: 0,
            false_negatives: 2,
        };
        assert_eq!(percent(sensitivity(&c).unwrap()), "50.00%");
    }

    #[test]
    fn false_alarm_formatting_matches_table_style() {
        let c = ConfusionCounts {
            true_positives: 0,
            false_positives: 29,
            true_negatives: 47,
            false_negatives: 1,
        };
        assert_eq!(percent(false_alarm_rate(&c).unwrap()), "38.16%");
    }

    #[test]
    fn zero_denominators_are_undefined_not_zero() {
        let c = ConfusionCounts {
            true_positives: 0,
            false_positives: 1,
            true_negatives: 1,
            false_negatives: 0,
        };
        assert!(matches!(sensitivity(&c), Err(Error::UndefinedMetric(_))));
        let c = ConfusionCounts {
            true_positives: 1,
            false_positives: 0,
            true_negatives: 0,
            false_negatives: 1,
        };
        assert!(matches!(
            false_alarm_rate(&c),
            Err(Error::UndefinedMetric(_))
        ));
    }
}
