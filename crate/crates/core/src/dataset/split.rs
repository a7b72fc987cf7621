use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::record::RawRecord;
use crate::error::{Error, Result};

/// Splits records into train and test independently within each label class.
///
/// The test size per class is `round(test_fraction * class_size)` with
/// half-up rounding; the remainder stays in train. Records keep their input
/// order within each side. Deterministic for a given seed.
pub fn stratified_split(
    records: &[RawRecord],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<RawRecord>, Vec<RawRecord>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; records.len()];
    for class in [true, false] {
        let mut indices: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == class)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            log::warn!(
                "class {} has no records; it contributes nothing to the split",
                if class { 1 } else { 0 }
            );
            continue;
        }
        let test_n = (test_fraction * indices.len() as f64).round() as usize;
        indices.shuffle(&mut rng);
        for &i in indices.iter().take(test_n) {
            in_test[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        if in_test[i] {
            test.push(*rec);
        } else {
            train.push(*rec);
        }
    }
    Ok((train, test))
}
