use std::collections::BTreeSet;

use log::warn;
use ndarray::Array2;

use super::table::{canonical, Cell, RawTable};
use super::Dataset;
use crate::error::{Error, Result};

enum Column {
    Numeric { name: String, values: Vec<f64> },
    Categorical { name: String, levels: Vec<String>, text: Vec<String> },
}

impl Column {
    fn width(&self) -> usize {
        match self {
            Column::Numeric { .. } => 1,
            Column::Categorical { levels, .. } => levels.len(),
        }
    }
}

/// Encodes a table into a numeric [`Dataset`].
///
/// Numeric columns (every cell parses as a finite number) are standardized
/// to zero mean and unit sample variance over the whole table; a constant
/// column becomes all zeros. Every other column expands into one indicator
/// column per distinct value, ordered lexicographically and named
/// `column=value`. The label and sensitive columns are mapped to `{0,1}`
/// and excluded from the features.
pub fn one_hot_encode(table: &RawTable) -> Result<Dataset> {
    let n = table.n_rows();
    if n == 0 {
        return Err(Error::EmptyTable);
    }
    let label_idx = table.column_index(&table.label_col)?;
    let sens_idx = table.column_index(&table.sensitive_col)?;
    let positive = canonical(&table.positive_label);
    let protected = canonical(&table.protected_value);

    let labels: Vec<u8> = table
        .column_text(label_idx)
        .iter()
        .map(|v| (*v == positive) as u8)
        .collect();
    let sensitive: Vec<u8> = table
        .column_text(sens_idx)
        .iter()
        .map(|v| (*v == protected) as u8)
        .collect();

    let columns: Vec<Column> = (0..table.column_names.len())
        .filter(|&j| j != label_idx && j != sens_idx)
        .map(|j| {
            let name = table.column_names[j].clone();
            let numeric: Option<Vec<f64>> = table
                .rows
                .iter()
                .map(|r| match r[j] {
                    Cell::Num(v) => Some(v),
                    Cell::Text(_) => None,
                })
                .collect();
            match numeric {
                Some(values) => Column::Numeric { name, values },
                None => {
                    let text = table.column_text(j);
                    let levels: BTreeSet<String> = text.iter().cloned().collect();
                    Column::Categorical {
                        name,
                        levels: levels.into_iter().collect(),
                        text,
                    }
                }
            }
        })
        .collect();

    let width: usize = columns.iter().map(Column::width).sum();
    let mut features = Array2::<f64>::zeros((n, width));
    let mut names = Vec::with_capacity(width);
    let mut offset = 0;
    for col in &columns {
        match col {
            Column::Numeric { name, values } => {
                for (i, v) in standardize(name, values).into_iter().enumerate() {
                    features[[i, offset]] = v;
                }
                names.push(name.clone());
            }
            Column::Categorical { name, levels, text } => {
                for (i, v) in text.iter().enumerate() {
                    let k = levels.binary_search(v).expect("level collected from column");
                    features[[i, offset + k]] = 1.0;
                }
                names.extend(levels.iter().map(|l| format!("{name}={l}")));
            }
        }
        offset += col.width();
    }

    Dataset::new(features, labels, sensitive, names)
}

fn standardize(name: &str, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    if var <= 0.0 {
        warn!("column `{name}` is constant; encoding it as zeros");
        return vec![0.0; n];
    }
    let sd = var.sqrt();
    values.iter().map(|v| (v - mean) / sd).collect()
}
