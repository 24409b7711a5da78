//! Data-parallel versions of the pair aggregations.
//!
//! Work is cut into fixed-size chunks of positives and merged in chunk order,
//! so results do not depend on the number of worker threads.

use aucslice_core::attribution::{pair_credit, sample_classes, PairCredit, PairSample};
use aucslice_core::dataset::{EvalDataset, Partition};
use aucslice_core::pairs::{CrossAccumulator, CrossMatrix, CrossStatistic, NegativeIndex};
use aucslice_core::Error;
use rayon::prelude::*;

use crate::error::Result;

const CHUNK: usize = 512;

/// Thread pool with `threads` workers, or one per core when `None`.
pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {threads:?} threads: {e}")).into())
}

/// Same result as `aucslice_core::pairs::cross_matrix_over`.
pub fn cross_matrix(
    data: &EvalDataset,
    model: &str,
    partition: &Partition,
    statistic: CrossStatistic,
) -> Result<CrossMatrix> {
    data.require_both_classes()?;
    let labels = data.labels();
    let scores = data.scores(model)?;
    if partition.assignment.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: partition.assignment.len(),
            right: labels.len(),
        }
        .into());
    }
    let negatives = NegativeIndex::new(&labels, &scores, partition);
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let partials: Vec<CrossAccumulator> = positives
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = CrossAccumulator::new(partition.cells());
            acc.add_positives(chunk, &scores, partition, &negatives);
            acc
        })
        .collect();
    let mut total = CrossAccumulator::new(partition.cells());
    for part in &partials {
        total.merge(part);
    }
    Ok(total.finish(partition, statistic))
}

/// Every (sampled) positive-negative pair with its credit, positives major.
pub fn pair_credits(data: &EvalDataset, model: &str, sample: Option<PairSample>) -> Result<Vec<PairCredit>> {
    data.require_both_classes()?;
    let labels = data.labels();
    let scores = data.scores(model)?;
    let (positives, negatives) = sample_classes(&labels, sample);
    let rows: Vec<Vec<PairCredit>> = positives
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut out = Vec::with_capacity(chunk.len() * negatives.len());
            for &pos_index in chunk {
                for &neg_index in &negatives {
                    out.push(PairCredit {
                        pos_index,
                        neg_index,
                        credit: pair_credit(scores[pos_index], scores[neg_index]),
                    });
                }
            }
            out
        })
        .collect();
    Ok(rows.concat())
}
