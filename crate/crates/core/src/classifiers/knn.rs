use serde::{Deserialize, Serialize};

use crate::dataset::RawRecord;
use crate::error::{Error, Result};

pub const KNN_MODEL_VERSION: u32 = 1;

/// k-nearest-neighbor model over z-score-standardized variables.
///
/// Standardization parameters come from the training data only; queries are
/// standardized with the same parameters, so any consistent positive
/// rescaling of a raw variable leaves predictions unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub version: u32,
    pub model: String,
    pub k: usize,
    pub kept_variables: Vec<usize>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Standardized training rows, one per record, `kept_variables` wide.
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

/// Fits the model: z-scoring parameters plus the standardized training
/// matrix. A constant variable gets its standard deviation forced to 1 with
/// a warning.
pub fn knn_fit(train: &[RawRecord], kept_variables: &[usize], k: usize) -> Result<KnnModel> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k > train.len() {
        return Err(Error::Contract(format!(
            "k = {k} exceeds the {} training records",
            train.len()
        )));
    }
    if kept_variables.is_empty() {
        return Err(Error::InvalidConfig("no variables kept for k-NN".into()));
    }
    let n = train.len() as f64;
    let mut means = Vec::with_capacity(kept_variables.len());
    let mut stds = Vec::with_capacity(kept_variables.len());
    for &v in kept_variables {
        let mean = train.iter().map(|r| r.values[v]).sum::<f64>() / n;
        let var = train
            .iter()
            .map(|r| (r.values[v] - mean) * (r.values[v] - mean))
            .sum::<f64>()
            / n;
        let mut std = var.sqrt();
        if std == 0.0 {
            log::warn!("variable {v} is constant in training; std forced to 1");
            std = 1.0;
        }
        means.push(mean);
        stds.push(std);
    }
    let rows = train
        .iter()
        .map(|r| {
            kept_variables
                .iter()
                .enumerate()
                .map(|(j, &v)| (r.values[v] - means[j]) / stds[j])
                .collect()
        })
        .collect();
    Ok(KnnModel {
        version: KNN_MODEL_VERSION,
        model: "knn".into(),
        k,
        kept_variables: kept_variables.to_vec(),
        means,
        stds,
        rows,
        labels: train.iter().map(|r| r.label).collect(),
    })
}

impl KnnModel {
    fn standardize(&self, record: &RawRecord) -> Vec<f64> {
        self.kept_variables
            .iter()
            .enumerate()
            .map(|(j, &v)| (record.values[v] - self.means[j]) / self.stds[j])
            .collect()
    }

    /// Predicts 1 iff at least half of the k nearest neighbors are positive
    /// (so k=2 with one positive neighbor predicts 1). Distance ties break
    /// by training-row index.
    pub fn predict(&self, record: &RawRecord) -> bool {
        let query = self.standardize(record);
        let mut distances: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row
                    .iter()
                    .zip(&query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, i)
            })
            .collect();
        distances.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let positives = distances
            .iter()
            .take(self.k)
            .filter(|&&(_, i)| self.labels[i])
            .count();
        2 * positives >= self.k
    }

    pub fn predict_all(&self, records: &[RawRecord]) -> Vec<bool> {
        records.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let m: KnnModel = serde_json::from_str(json)?;
        if m.version != KNN_MODEL_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported knn model version {}",
                m.version
            )));
        }
        if m.model != "knn" {
            return Err(Error::InvalidConfig(format!(
                "expected a knn model, found `{}`",
                m.model
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(values: [f64; 8], label: bool) -> RawRecord {
        RawRecord::new(values, label)
    }

    fn grid_records(n: usize) -> Vec<RawRecord> {
        (0..n)
            .map(|i| {
                let mut values = [0.0; 8];
                for (v, slot) in values.iter_mut().enumerate() {
                    *slot = ((i * 13 + v * 7) % 29) as f64 + (i as f64) * 0.01;
                }
                rec(values, i % 3 == 0)
            })
            .collect()
    }

    #[test]
    fn stores_standardized_matrix_of_expected_shape() {
        let train = grid_records(594);
        let kept = vec![0, 1, 2, 3, 5, 7];
        let model = knn_fit(&train, &kept, 2).unwrap();
        assert_eq!(model.rows.len(), 594);
        assert!(model.rows.iter().all(|r| r.len() == 6));
    }

    #[test]
    fn degenerate_single_row_model_is_valid() {
        let train = vec![rec([1.0; 8], true)];
        let model = knn_fit(&train, &[0, 1], 1).unwrap();
        assert!(model.predict(&rec([5.0; 8], false)));
    }

    #[test]
    fn constant_variable_std_forced_to_one() {
        let mut train = grid_records(10);
        for r in &mut train {
            r.values[3] = 42.0;
        }
        let model = knn_fit(&train, &[0, 3], 1).unwrap();
        assert_eq!(model.stds[1], 1.0);
    }

    #[test]
    fn k_larger_than_training_is_contract_error() {
        let train = grid_records(3);
        assert!(matches!(
            knn_fit(&train, &[0], 4),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn query_identical_to_training_row_returns_its_label_at_k1() {
        let train = grid_records(30);
        let model = knn_fit(&train, &[0, 1, 2, 3, 4, 5, 6, 7], 1).unwrap();
        for r in &train {
            assert_eq!(model.predict(r), r.label);
        }
    }

    #[test]
    fn k2_tie_predicts_positive() {
        // two training rows, one of each class, equidistant query
        let train = vec![
            rec([-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], true),
            rec([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], false),
        ];
        let model = knn_fit(&train, &[0], 2).unwrap();
        assert!(model.predict(&rec([0.0; 8], false)));
    }

    #[test]
    fn k3_majority_of_negatives_predicts_negative() {
        let train = vec![
            rec([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], true),
            rec([0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], false),
            rec([0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], false),
            rec([9.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], true),
        ];
        let model = knn_fit(&train, &[0], 3).unwrap();
        assert!(!model.predict(&rec([0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], true)));
    }

    #[test]
    fn json_round_trip() {
        let train = grid_records(12);
        let model = knn_fit(&train, &[0, 2], 2).unwrap();
        let back = KnnModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn positive_power_of_two_rescaling_leaves_predictions_unchanged(
            scale_exp in -3i32..9,
            seed in 0u64..50,
        ) {
            // power-of-two scaling only shifts exponents, so z-scores are
            // bit-identical and predictions cannot move
            let scale = (2.0f64).powi(scale_exp);
            let train: Vec<RawRecord> = (0..40)
                .map(|i| {
                    let mut values = [0.0; 8];
                    for (v, slot) in values.iter_mut().enumerate() {
                        *slot = (((i as u64). wrapping_mul(6364136223846793005)
                            .wrapping_add(seed + v as u64) >> 33) % 1000) as f64 / 10.0;
                    }
                    rec(values, i % 2 == 0)
                })
                .collect();
            let queries: Vec<RawRecord> = train.iter().take(10).map(|r| {
                let mut q = *r;
                q.values[0] += 0.25;
                q
            }).collect();

            let scaled = |rs: &[RawRecord]| -> Vec<RawRecord> {
                rs.iter().map(|r| {
                    let mut s = *r;
                    s.values[2] *= scale;
                    s
                }).collect()
            };

            let base = knn_fit(&train, &[0, 2, 5], 3).unwrap();
            let rescaled = knn_fit(&scaled(&train), &[0, 2, 5], 3).unwrap();
            for (q, qs) in queries.iter().zip(scaled(&queries)) {
                prop_assert_eq!(base.predict(q), rescaled.predict(&qs));
            }
        }
    }
}
