use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::record::{RawRecord, NUM_VARIABLES};
use crate::error::{Error, Result};

// Every variable draws from one common right-skewed mixture: a dominant
// baseline level plus two progressively rarer elevated levels, partially
// synchronized within a record by a shared regime, the shape sensor-style
// variables take in practice. The skew and cross-variable coupling make
// discretized records share tree paths, which is the regime branch mining
// addresses; independent symmetric columns would instead spread records
// over the full bin-combination space and leave every branch with
// near-singleton support.
const COMPONENT_WEIGHTS: [f64; 3] = [0.84, 0.08, 0.08];
const COMPONENT_CENTERS: [f64; 3] = [0.0, 2.5, 5.0];
const COMPONENT_SD: f64 = 0.25;
/// Probability that a variable follows the record's shared regime instead
/// of drawing its mixture component independently. The per-variable
/// marginal is the same mixture either way.
const REGIME_COUPLING: f64 = 0.5;

/// Standard deviation of the common noise distribution.
fn mixture_sd() -> f64 {
    let mean: f64 = COMPONENT_WEIGHTS
        .iter()
        .zip(&COMPONENT_CENTERS)
        .map(|(w, c)| w * c)
        .sum();
    let second: f64 = COMPONENT_WEIGHTS
        .iter()
        .zip(&COMPONENT_CENTERS)
        .map(|(w, c)| w * (c * c + COMPONENT_SD * COMPONENT_SD))
        .sum();
    (second - mean * mean).sqrt()
}

/// Generates a labeled dataset with planted signal.
///
/// Noise variables are drawn from one common distribution in both classes.
/// Informative variables shift the positive-class mean by `effect_size`
/// standard deviations of that distribution. `effect_size = 0` makes the
/// label independent of every variable.
pub fn generate_synthetic(
    n_pos: usize,
    n_neg: usize,
    informative_vars: &[usize],
    effect_size: f64,
    seed: u64,
) -> Result<Vec<RawRecord>> {
    if !(effect_size >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "effect size must be non-negative, got {effect_size}"
        )));
    }
    if let Some(&bad) = informative_vars.iter().find(|&&v| v >= NUM_VARIABLES) {
        return Err(Error::InvalidConfig(format!(
            "informative variable index {bad} out of range 0..{NUM_VARIABLES}"
        )));
    }
    let mut informative = [false; NUM_VARIABLES];
    for &v in informative_vars {
        informative[v] = true;
    }
    let shift = effect_size * mixture_sd();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n_pos + n_neg);
    for idx in 0..n_pos + n_neg {
        let label = idx < n_pos;
        let regime = draw_component(&mut rng);
        let mut values = [0.0; NUM_VARIABLES];
        for (v, slot) in values.iter_mut().enumerate() {
            let component = if rng.random::<f64>() < REGIME_COUPLING {
                regime
            } else {
                draw_component(&mut rng)
            };
            let z: f64 = StandardNormal.sample(&mut rng);
            let mut value = COMPONENT_CENTERS[component] + COMPONENT_SD * z;
            if label && informative[v] {
                value += shift;
            }
            *slot = value;
        }
        records.push(RawRecord::new(values, label));
    }
    Ok(records)
}

fn draw_component(rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    if u < COMPONENT_WEIGHTS[0] {
        0
    } else if u < COMPONENT_WEIGHTS[0] + COMPONENT_WEIGHTS[1] {
        1
    } else {
        2
    }
}
