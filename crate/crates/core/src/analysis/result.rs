use std::collections::HashSet;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use super::{AnalysisError, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(AnalysisError::Shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(AnalysisError::Shape(format!(
                "row {i} has {} columns, expected {cols}",
                rows[i].len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "matrix index out of range");
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.rows && col < self.cols, "matrix index out of range");
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// A labelled matrix. Label counts always match the matrix shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    values: Matrix,
}

impl Table {
    pub fn new(name: impl Into<String>, row_labels: Vec<String>, col_labels: Vec<String>, values: Matrix) -> Result<Self> {
        if row_labels.len() != values.rows() || col_labels.len() != values.cols() {
            return Err(AnalysisError::Shape(format!(
                "{}x{} labels for a {}x{} table",
                row_labels.len(),
                col_labels.len(),
                values.rows(),
                values.cols()
            )));
        }
        Ok(Self {
            name: name.into(),
            row_labels,
            col_labels,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }
}

/// A named `(x, y)` line for plotting. `missing` lists x positions where no
/// value could be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub missing: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            missing: Vec::new(),
        }
    }
}

/// A file produced by a tool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub filename: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub tool: String,
    pub created_at: DateTime<Utc>,
    pub tables: Vec<Table>,
    pub series: Vec<Series>,
    artifacts: Vec<Artifact>,
    /// Whether a front end should plot `series` without being asked.
    pub auto_plot: bool,
}

impl AnalysisResult {
    pub fn new(tool: impl Into<String>) -> Self {
        Self {
            tool: tool.into(),
            created_at: Utc::now(),
            tables: Vec::new(),
            series: Vec::new(),
            artifacts: Vec::new(),
            auto_plot: false,
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    /// Adds an artifact; filenames must be unique, non-empty and free of path
    /// separators.
    pub fn add_artifact(&mut self, filename: impl Into<String>, bytes: Vec<u8>) -> Result<()> {
        let filename = filename.into();
        if filename.is_empty() || filename.contains(['/', '\\']) || filename == "." || filename == ".." {
            return Err(AnalysisError::InvalidArgument(format!("invalid artifact name {filename:?}")));
        }
        if self.artifacts.iter().any(|a| a.filename == filename) {
            return Err(AnalysisError::Conflict(format!("duplicate artifact {filename:?}")));
        }
        self.artifacts.push(Artifact { filename, bytes });
        Ok(())
    }

    /// File-name prefix derived from `created_at`, ISO-8601 basic format.
    pub fn timestamp(&self) -> String {
        self.created_at.format("%Y%m%dT%H%M%SZ").to_string()
    }

    /// Writes every artifact to `dir` as `<timestamp>_<filename>` and returns
    /// the paths written.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let stamp = self.timestamp();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(self.artifacts.len());
        for a in &self.artifacts {
            debug_assert!(seen.insert(&a.filename));
            let path = dir.join(format!("{stamp}_{}", a.filename));
            std::fs::write(&path, &a.bytes)?;
            out.push(path);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn matrix_shapes() {
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.row(0), &[1.0, 2.0]);
        assert!(Matrix::from_rows(&[vec![1.0], vec![]]).is_err());
        let e = Matrix::from_rows(&[]).unwrap();
        assert_eq!((e.rows(), e.cols()), (0, 0));
    }

    #[test]
    fn table_labels_must_match() {
        let m = Matrix::zeros(2, 1);
        assert!(Table::new("t", vec!["a".into()], vec!["x".into()], m.clone()).is_err());
        assert!(Table::new("t", vec!["a".into(), "b".into()], vec!["x".into()], m).is_ok());
    }

    #[test]
    fn artifacts_are_unique_and_stamped() {
        let mut r = AnalysisResult::new("t");
        r.created_at = Utc.with_ymd_and_hms(2024, 3, 5, 7, 8, 9).unwrap();
        r.add_artifact("a.csv", b"x".to_vec()).unwrap();
        assert!(matches!(r.add_artifact("a.csv", vec![]), Err(AnalysisError::Conflict(_))));
        assert!(r.add_artifact("../a", vec![]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let paths = r.write_artifacts(dir.path()).unwrap();
        assert_eq!(paths[0].file_name().unwrap(), "20240305T070809Z_a.csv");
        assert_eq!(std::fs::read(&paths[0]).unwrap(), b"x");
    }
}
