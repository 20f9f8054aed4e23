use std::collections::BTreeSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// A single parsed CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn parse(raw: &str) -> Cell {
        match raw.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Cell::Num(v),
            _ => Cell::Text(raw.trim().to_string()),
        }
    }

    /// Canonical text of the cell: numbers in shortest round-trip form.
    pub fn as_text(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Pre-encoding table with its label and sensitive columns designated.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub label_col: String,
    pub sensitive_col: String,
    pub positive_label: String,
    pub protected_value: String,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.column_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// Canonical text of every cell in a column.
    pub(crate) fn column_text(&self, idx: usize) -> Vec<String> {
        self.rows.iter().map(|r| r[idx].as_text()).collect()
    }
}

/// Reads a comma-separated file with a mandatory header row.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_col: &str,
    sensitive_col: &str,
    positive_label: &str,
    protected_value: &str,
) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, label_col, sensitive_col, positive_label, protected_value)
}

pub fn parse_csv<R: Read>(
    reader: R,
    label_col: &str,
    sensitive_col: &str,
    positive_label: &str,
    protected_value: &str,
) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let column_names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let width = column_names.len();

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = i + 2;
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (j, field) in record.iter().enumerate() {
            if field.trim().is_empty() {
                return Err(Error::MissingCell {
                    line,
                    column: column_names[j].clone(),
                });
            }
            row.push(Cell::parse(field));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }

    let table = RawTable {
        column_names,
        rows,
        label_col: label_col.to_string(),
        sensitive_col: sensitive_col.to_string(),
        positive_label: positive_label.to_string(),
        protected_value: protected_value.to_string(),
    };
    let label_idx = table.column_index(label_col)?;
    let sens_idx = table.column_index(sensitive_col)?;
    check_binary(&table, label_idx, "label", positive_label)?;
    check_binary(&table, sens_idx, "sensitive", protected_value)?;
    Ok(table)
}

/// Canonical spelling of a designated value, so `1.0` in a flag matches a
/// numeric `1` cell.
pub(crate) fn canonical(value: &str) -> String {
    Cell::parse(value).as_text()
}

fn check_binary(table: &RawTable, idx: usize, role: &'static str, designated: &str) -> Result<()> {
    let column = &table.column_names[idx];
    let distinct: BTreeSet<String> = table.column_text(idx).into_iter().collect();
    if distinct.len() != 2 {
        return Err(Error::NonBinaryColumn {
            role,
            column: column.to_string(),
            found: distinct.len(),
        });
    }
    if !distinct.contains(&canonical(designated)) {
        return Err(Error::UnknownValue {
            role,
            column: column.to_string(),
            value: designated.to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RawTable> {
        parse_csv(text.as_bytes(), "label", "race", "1", "b")
    }

    #[test]
    fn parses_small_table() {
        let t = parse("age,race,label\n20,a,0\n30,b,1\n40,a,1\n").unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.column_names, vec!["age", "race", "label"]);
        assert_eq!(t.rows[0][0], Cell::Num(20.0));
        assert_eq!(t.rows[1][1], Cell::Text("b".into()));
    }

    #[test]
    fn quoted_fields() {
        let t = parse("name,race,label\n\"Smith, J\",a,0\n\"Doe\",b,1\n").unwrap();
        assert_eq!(t.rows[0][0], Cell::Text("Smith, J".into()));
    }

    #[test]
    fn non_binary_label() {
        let err = parse("age,race,label\n1,a,0\n2,b,1\n3,a,2\n").unwrap_err();
        assert!(err.to_string().contains("non-binary label column"), "{err}");
    }

    #[test]
    fn missing_column() {
        let err = parse("age,label\n1,0\n2,1\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "race"));
    }

    #[test]
    fn ragged_row() {
        let err = parse("age,race,label\n1,a,0\n2,b\n").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { line: 3, .. }));
    }

    #[test]
    fn missing_cell_rejected() {
        let err = parse("age,race,label\n1,a,0\n,b,1\n").unwrap_err();
        assert!(matches!(err, Error::MissingCell { line: 3, .. }));
    }

    #[test]
    fn designated_value_must_exist() {
        let err = parse_csv("age,race,label\n1,a,0\n2,c,1\n".as_bytes(), "label", "race", "1", "b")
            .unwrap_err();
        assert!(matches!(err, Error::UnknownValue { role: "sensitive", .. }));
    }

    #[test]
    fn missing_file() {
        let err = load_csv("/nonexistent/x.csv", "label", "race", "1", "b").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn empty_table() {
        assert!(matches!(parse("age,race,label\n"), Err(Error::EmptyTable)));
    }
}
