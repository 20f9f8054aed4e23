use super::EpochRecord;
use crate::error::{Error, Result};

/// Picks the snapshot to keep from a trace.
///
/// Among epochs whose training statistical rate reaches `fairness_floor`,
/// the one with the highest training accuracy wins (earliest on ties). If
/// no epoch reaches the floor, the epoch with the highest rate wins, then
/// the highest accuracy, then the earliest.
pub fn select_model(trace: &[EpochRecord], fairness_floor: f64) -> Result<usize> {
    let first = trace.first().ok_or(Error::EmptyTrace)?;
    let qualifying = trace
        .iter()
        .filter(|r| r.statistical_rate_train >= fairness_floor)
        .fold(None::<&EpochRecord>, |best, r| match best {
            Some(b) if b.train_accuracy >= r.train_accuracy => Some(b),
            _ => Some(r),
        });
    if let Some(r) = qualifying {
        return Ok(r.snapshot_id);
    }
    let fallback = trace.iter().fold(first, |b, r| {
        let better = r.statistical_rate_train > b.statistical_rate_train
            || (r.statistical_rate_train == b.statistical_rate_train && r.train_accuracy > b.train_accuracy);
        if better {
            r
        } else {
            b
        }
    });
    Ok(fallback.snapshot_id)
}
