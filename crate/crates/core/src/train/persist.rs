//! Run directories.
//!
//! ```text
//! trace.csv                  one row per EpochRecord
//! config.txt                 effective TrainConfig, `key = value`
//! selection.txt              algorithm, selected epoch, fairness floor
//! final.params               classifier after the last epoch
//! final_adversary.params
//! selected.params            classifier chosen by select_model
//! selected_adversary.params
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{EpochRecord, TrainResult};
use crate::error::{Error, Result};
use crate::model::{write_adversary, write_params};

pub const TRACE_HEADER: &str = "epoch,train_accuracy,test_accuracy,statistical_rate_train,statistical_rate_test,adversary_auc,loss_c,loss_f,snapshot_id";

pub fn trace_to_csv(trace: &[EpochRecord]) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.epoch,
            r.train_accuracy,
            r.test_accuracy,
            r.statistical_rate_train,
            r.statistical_rate_test,
            r.adversary_auc,
            r.loss_c,
            r.loss_f,
            r.snapshot_id
        );
    }
    out
}

pub fn write_trace_csv(trace: &[EpochRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, trace_to_csv(trace)).map_err(|e| Error::io(path, e))
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<EpochRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(Error::format(path, "unexpected trace header"));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::format(path, format!("line {}: malformed record", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(bad());
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|_| bad());
            let int = |k: usize| f[k].parse::<usize>().map_err(|_| bad());
            Ok(EpochRecord {
                epoch: int(0)?,
                train_accuracy: num(1)?,
                test_accuracy: num(2)?,
                statistical_rate_train: num(3)?,
                statistical_rate_test: num(4)?,
                adversary_auc: num(5)?,
                loss_c: num(6)?,
                loss_f: num(7)?,
                snapshot_id: int(8)?,
            })
        })
        .collect()
}

/// Writes the trace, config echo and parameter snapshots into `dir`.
pub fn save_result(result: &TrainResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_trace_csv(&result.trace, dir.join("trace.csv"))?;
    let path = dir.join("config.txt");
    fs::write(&path, result.config.to_text()).map_err(|e| Error::io(&path, e))?;
    let path = dir.join("selection.txt");
    let selection = format!(
        "algorithm = {}\nselected_epoch = {}\nfairness_floor = {}\n",
        result.algorithm, result.selected_epoch, result.config.fairness_floor
    );
    fs::write(&path, selection).map_err(|e| Error::io(&path, e))?;
    write_params(&result.final_params, dir.join("final.params"))?;
    write_adversary(&result.final_adv, dir.join("final_adversary.params"))?;
    write_params(&result.selected_params, dir.join("selected.params"))?;
    write_adversary(&result.selected_adv, dir.join("selected_adversary.params"))?;
    Ok(())
}
