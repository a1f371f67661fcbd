use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GbdtError;

/// Class counts before and after balancing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResampleAudit {
    pub negatives_before: usize,
    pub positives_before: usize,
    pub negatives_after: usize,
    pub positives_after: usize,
}

fn class_counts<T>(examples: &[(T, bool)]) -> (usize, usize) {
    let pos = examples.iter().filter(|e| e.1).count();
    (examples.len() - pos, pos)
}

/// Random oversampling of the minority class until both classes have the
/// same size, then a seeded shuffle.
pub fn resample<T: Clone>(examples: &[(T, bool)], seed: u64) -> Result<Vec<(T, bool)>, GbdtError> {
    resample_with_audit(examples, seed).map(|(out, _)| out)
}

pub fn resample_with_audit<T: Clone>(
    examples: &[(T, bool)],
    seed: u64,
) -> Result<(Vec<(T, bool)>, ResampleAudit), GbdtError> {
    let (neg, pos) = class_counts(examples);
    if neg == 0 || pos == 0 {
        return Err(GbdtError::SingleClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let minority_label = pos < neg;
    let minority: Vec<usize> = (0..examples.len())
        .filter(|&i| examples[i].1 == minority_label)
        .collect();
    let mut out = examples.to_vec();
    for _ in 0..neg.abs_diff(pos) {
        let pick = minority[rng.random_range(0..minority.len())];
        out.push(examples[pick].clone());
    }
    out.shuffle(&mut rng);
    let (neg_after, pos_after) = class_counts(&out);
    let audit = ResampleAudit {
        negatives_before: neg,
        positives_before: pos,
        negatives_after: neg_after,
        positives_after: pos_after,
    };
    Ok((out, audit))
}
