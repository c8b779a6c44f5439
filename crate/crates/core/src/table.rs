//! Raw tabular input: a header row plus cells that are text, numbers, or missing.

use std::path::Path;

use crate::error::{Error, Result};

/// One parsed CSV field. Numbers are recognized eagerly: a field becomes
/// [`Cell::Number`] only when it parses as a finite float, otherwise it stays
/// text. Empty fields are missing.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn from_field(field: &str) -> Cell {
        let trimmed = field.trim();
        if trimmed.is_empty() {
            return Cell::Missing;
        }
        match trimmed.parse::<f64>() {
            Ok(v) if v.is_finite() => Cell::Number(v),
            _ => Cell::Text(trimmed.to_owned()),
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    /// Human form of the cell, as used for categorical labels and mapping
    /// keys. Integral numbers drop the trailing ".0" so a spec can say "1"
    /// rather than "1.0".
    pub fn display(&self) -> String {
        match self {
            Cell::Number(v) => fmt_number_plain(*v),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// Shortest exact rendering of a float: "33.0", "0.5".
pub fn fmt_number(v: f64) -> String {
    format!("{v:?}")
}

/// Integer-friendly rendering: 1.0 -> "1", 0.5 -> "0.5".
pub fn fmt_number_plain(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// In-memory table; `cells` is row-major and rectangular.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub column_names: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: b',',
            has_header: true,
        }
    }
}

impl RawTable {
    pub fn new(column_names: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<RawTable> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != column_names.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: column_names.len(),
                    found: row.len(),
                });
            }
        }
        Ok(RawTable { column_names, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.column_names.len()
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, column: usize) -> &Cell {
        &self.rows[row][column]
    }

    /// Exact-name lookup first, then a unique case-insensitive match, so CLI
    /// specs like `rank:zfya:...` resolve against a `ZFYA` header.
    pub fn column_index(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.column_names.iter().position(|c| c == name) {
            return Ok(i);
        }
        let lower = name.to_lowercase();
        let mut hits = self
            .column_names
            .iter()
            .enumerate()
            .filter(|(_, c)| c.to_lowercase() == lower);
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Ok(i),
            _ => Err(Error::ColumnNotFound(name.to_owned())),
        }
    }

    /// Column values for the given row indices, in that order.
    pub fn column_cells<'a>(&'a self, column: usize, rows: &[usize]) -> Vec<&'a Cell> {
        rows.iter().map(|&r| &self.rows[r][column]).collect()
    }

    /// True when every non-missing cell is numeric and at least one is.
    pub fn column_is_numeric(&self, column: usize) -> bool {
        let mut seen = false;
        for row in &self.rows {
            match &row[column] {
                Cell::Number(_) => seen = true,
                Cell::Missing => {}
                Cell::Text(_) => return false,
            }
        }
        seen
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: LoadOptions) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .from_path(path.as_ref())?;

    let column_names: Vec<String> = if options.has_header {
        reader.headers()?.iter().map(|h| h.trim().to_owned()).collect()
    } else {
        Vec::new()
    };

    let mut names = column_names;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if names.is_empty() {
            names = (0..record.len()).map(|c| format!("c{c}")).collect();
        }
        if record.len() != names.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: names.len(),
                found: record.len(),
            });
        }
        rows.push(record.iter().map(Cell::from_field).collect());
    }
    RawTable::new(names, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_simple_csv() {
        let f = write_temp("a,b\n1,x\n2,y\n");
        let t = load_csv(f.path(), LoadOptions::default()).unwrap();
        assert_eq!(t.column_names, ["a", "b"]);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.cell(0, 0), &Cell::Number(1.0));
        assert_eq!(t.cell(1, 1), &Cell::Text("y".into()));
    }

    #[test]
    fn ragged_row_names_the_row() {
        let f = write_temp("a,b\n1,2\n3\n");
        let err = load_csv(f.path(), LoadOptions::default()).unwrap_err();
        match err {
            Error::RaggedRow { row, expected, found } => {
                assert_eq!((row, expected, found), (2, 2, 1));
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn empty_cells_are_missing_and_non_numbers_stay_text() {
        let f = write_temp("a,b\n,1e3\nNaN,-2.5\n");
        let t = load_csv(f.path(), LoadOptions::default()).unwrap();
        assert!(t.cell(0, 0).is_missing());
        assert_eq!(t.cell(0, 1), &Cell::Number(1000.0));
        // NaN parses as a float but is not finite, so it stays text.
        assert_eq!(t.cell(1, 0), &Cell::Text("NaN".into()));
        assert_eq!(t.cell(1, 1), &Cell::Number(-2.5));
    }

    #[test]
    fn column_lookup_falls_back_to_case_insensitive() {
        let t = RawTable::new(
            vec!["ZFYA".into(), "sex".into()],
            vec![vec![Cell::Number(1.0), Cell::Text("F".into())]],
        )
        .unwrap();
        assert_eq!(t.column_index("zfya").unwrap(), 0);
        assert_eq!(t.column_index("sex").unwrap(), 1);
        assert!(t.column_index("age").is_err());
    }

    #[test]
    fn quoted_fields_keep_embedded_delimiters() {
        let f = write_temp("a,b\n\"x,y\",2\n");
        let t = load_csv(f.path(), LoadOptions::default()).unwrap();
        assert_eq!(t.cell(0, 0), &Cell::Text("x,y".into()));
    }
}
