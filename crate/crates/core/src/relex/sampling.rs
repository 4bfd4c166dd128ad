use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frame::MentionPairFrame;
use crate::corpus::RelationType;
use crate::error::{Error, Result};

/// Rebalancing applied to training frames.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum SamplingStrategy {
    None,
    /// Keep every positive frame and `ceil(rate * positives)` negatives.
    NegativeSampling { rate: f64, seed: u64 },
    /// Duplicate `target` frames until the class holds
    /// `ceil(multiplier * original)` frames.
    RandomOverSampling {
        target: RelationType,
        multiplier: f64,
        seed: u64,
    },
}

impl SamplingStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SamplingStrategy::None => Ok(()),
            SamplingStrategy::NegativeSampling { rate, .. } => {
                if rate > 0.0 && rate.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!("negative sampling rate must be > 0, got {rate}")))
                }
            }
            SamplingStrategy::RandomOverSampling { multiplier, .. } => {
                if multiplier >= 1.0 && multiplier.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "oversampling multiplier must be >= 1, got {multiplier}"
                    )))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SamplingStrategy::None => "none",
            SamplingStrategy::NegativeSampling { .. } => "negative-sampling",
            SamplingStrategy::RandomOverSampling { .. } => "ros",
        }
    }
}

/// `ceil(x * n)`, ignoring float noise below 1e-9.
pub fn scaled_count(x: f64, n: usize) -> usize {
    let v = x * n as f64;
    (v - 1e-9).ceil().max(0.0) as usize
}

/// Applies `strategy` to `frames`. Frames are never modified, only dropped
/// (negatives under negative sampling) or duplicated (oversampled class,
/// appended after the originals).
pub fn apply_sampling(
    frames: &[MentionPairFrame],
    strategy: &SamplingStrategy,
) -> Result<Vec<MentionPairFrame>> {
    strategy.validate()?;
    match *strategy {
        SamplingStrategy::None => Ok(frames.to_vec()),
        SamplingStrategy::NegativeSampling { rate, seed } => {
            let negatives: Vec<usize> = (0..frames.len())
                .filter(|&i| frames[i].label == RelationType::NoRelation)
                .collect();
            let positives = frames.len() - negatives.len();
            if positives == 0 {
                return Err(Error::NoPositiveFrames);
            }
            let keep = scaled_count(rate, positives).min(negatives.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut kept = vec![false; frames.len()];
            for i in index::sample(&mut rng, negatives.len(), keep) {
                kept[negatives[i]] = true;
            }
            Ok(frames
                .iter()
                .enumerate()
                .filter(|(i, f)| f.label != RelationType::NoRelation || kept[*i])
                .map(|(_, f)| f.clone())
                .collect())
        }
        SamplingStrategy::RandomOverSampling {
            target,
            multiplier,
            seed,
        } => {
            let members: Vec<usize> = (0..frames.len())
                .filter(|&i| frames[i].label == target)
                .collect();
            let mut out = frames.to_vec();
            if members.is_empty() {
                return Ok(out);
            }
            let extra = scaled_count(multiplier, members.len()) - members.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..extra {
                let pick = members[rng.gen_range(0..members.len())];
                out.push(frames[pick].clone());
            }
            Ok(out)
        }
    }
}
