use std::ops::Range;

use rand::Rng;

use crate::{Error, Result};

/// Assignment of minibatch rows to discriminators for one iteration.
///
/// Discriminator `k` owns the contiguous rows `[k·m, (k+1)·m)` of both the real
/// and the fake minibatch, and additionally sees `m` fake rows drawn without
/// replacement from everyone else's microbatches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicrobatchPartition {
    pub micro: usize,
    pub ranges: Vec<Range<usize>>,
    pub complements: Vec<Vec<usize>>,
}

impl MicrobatchPartition {
    pub fn discriminators(&self) -> usize {
        self.ranges.len()
    }

    pub fn batch(&self) -> usize {
        self.micro * self.ranges.len()
    }
}

pub fn micro_size(batch: usize, discriminators: usize) -> Result<usize> {
    if discriminators == 0 || !batch.is_multiple_of(discriminators) {
        return Err(Error::IndivisibleBatch {
            batch,
            discriminators,
        });
    }
    Ok(batch / discriminators)
}

/// Splits a minibatch of `batch` rows across `discriminators` and draws fresh
/// complement sets, consuming the rng once per discriminator in index order.
pub fn partition<R: Rng + ?Sized>(
    batch: usize,
    discriminators: usize,
    rng: &mut R,
) -> Result<MicrobatchPartition> {
    let m = micro_size(batch, discriminators)?;
    let ranges: Vec<_> = (0..discriminators).map(|k| k * m..(k + 1) * m).collect();
    let complements = ranges
        .iter()
        .map(|own| {
            if discriminators == 1 {
                return Vec::new();
            }
            rand::seq::index::sample(rng, batch - m, m)
                .into_iter()
                .map(|i| if i < own.start { i } else { i + m })
                .collect()
        })
        .collect();
    Ok(MicrobatchPartition {
        micro: m,
        ranges,
        complements,
    })
}
