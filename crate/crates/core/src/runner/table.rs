use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Named column table; `None` cells are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push(row.iter().copied().map(Some).collect());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Row index and value of the largest finite entry of a column.
    pub fn argmax(&self, name: &str) -> Option<(usize, f64)> {
        let k = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r[k].filter(|x| x.is_finite()).map(|x| (i, x)))
            .fold(None, |best: Option<(usize, f64)>, (i, x)| match best {
                Some((_, b)) if b >= x => best,
                _ => Some((i, x)),
            })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.map(format_float).unwrap_or_default()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Rounds to 12 significant digits, then prints the shortest string that
/// parses back to the rounded value.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let s = format!("{rounded:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

/// Writes each table to `<dir>/<name>.csv`, creating `dir` if needed.
pub fn write_tables(tables: &[Table], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::from(e).context(format!("creating {}", dir.display())))?;
    let mut written = Vec::with_capacity(tables.len());
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        std::fs::write(&path, t.to_csv()?).map_err(|e| Error::from(e).context(format!("writing {}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
