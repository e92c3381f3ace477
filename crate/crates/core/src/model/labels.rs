use std::collections::HashSet;

use super::{ModelError, Result};

/// Largest grid that the default label scheme can name (`ZZ` is row 702).
pub const MAX_DEFAULT_LABELS: usize = 702;

/// Row and column labels for a square grid.
///
/// Rows and columns are labelled independently; a cell is named by
/// concatenating its row and column labels (`"B2"`, `"H7"`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLabels {
    rows: Vec<String>,
    cols: Vec<String>,
}

impl GridLabels {
    pub fn new(rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(ModelError::InvalidArgument(format!(
                "label axes differ in length ({} rows, {} columns)",
                rows.len(),
                cols.len()
            )));
        }
        check_unique("row", &rows)?;
        check_unique("column", &cols)?;
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    /// Grid dimension these labels describe.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cell_label(&self, row: usize, col: usize) -> String {
        format!("{}{}", self.rows[row], self.cols[col])
    }

    /// Resolves a cell label such as `"E4"` back to `(row, col)`.
    ///
    /// The first row-major match wins if custom labels make the
    /// concatenation ambiguous.
    pub fn find_cell(&self, label: &str) -> Option<(usize, usize)> {
        for (r, row) in self.rows.iter().enumerate() {
            let Some(rest) = label.strip_prefix(row.as_str()) else {
                continue;
            };
            if let Some(c) = self.cols.iter().position(|col| col == rest) {
                return Some((r, c));
            }
        }
        None
    }
}

fn check_unique(axis: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(ModelError::InvalidArgument(format!(
                "duplicate {axis} label {label:?}"
            )));
        }
    }
    Ok(())
}

/// Spreadsheet-style row letters (`A`..`Z`, `AA`, ...) and 1-based column
/// numbers for a `size`×`size` grid.
pub fn make_default_labels(size: usize) -> Result<GridLabels> {
    if size == 0 || size > MAX_DEFAULT_LABELS {
        return Err(ModelError::InvalidArgument(format!(
            "grid size {size} outside 1..={MAX_DEFAULT_LABELS}"
        )));
    }
    let rows = (1..=size).map(column_letters).collect();
    let cols = (1..=size).map(|n| n.to_string()).collect();
    Ok(GridLabels { rows, cols })
}

// bijective base-26, 1 -> "A", 26 -> "Z", 27 -> "AA"
fn column_letters(mut n: usize) -> String {
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii letters")
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent enumeration: all one-letter names, then all two-letter
    // names in lexicographic order.
    fn enumerate_letters(count: usize) -> Vec<String> {
        let singles: Vec<String> = ('A'..='Z').map(String::from).collect();
        let mut out = singles.clone();
        for a in &singles {
            for b in &singles {
                out.push(format!("{a}{b}"));
            }
        }
        out.truncate(count);
        out
    }

    #[test]
    fn smallest_grid() {
        let labels = make_default_labels(1).unwrap();
        assert_eq!(labels.rows(), ["A"]);
        assert_eq!(labels.cols(), ["1"]);
    }

    #[test]
    fn seventeen_by_seventeen() {
        let labels = make_default_labels(17).unwrap();
        let expected: Vec<String> = "ABCDEFGHIJKLMNOPQ".chars().map(String::from).collect();
        assert_eq!(labels.rows(), expected.as_slice());
        assert_eq!(labels.cols().first().unwrap(), "1");
        assert_eq!(labels.cols().last().unwrap(), "17");
    }

    #[test]
    fn row_27_is_aa() {
        let labels = make_default_labels(27).unwrap();
        assert_eq!(labels.rows()[26], "AA");
    }

    #[test]
    fn matches_enumeration_up_to_max() {
        let labels = make_default_labels(MAX_DEFAULT_LABELS).unwrap();
        assert_eq!(labels.rows(), enumerate_letters(MAX_DEFAULT_LABELS).as_slice());
        assert_eq!(labels.rows().last().unwrap(), "ZZ");
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(make_default_labels(0), Err(ModelError::InvalidArgument(_))));
        assert!(matches!(make_default_labels(703), Err(ModelError::InvalidArgument(_))));
    }

    #[test]
    fn cell_lookup() {
        let labels = make_default_labels(17).unwrap();
        assert_eq!(labels.find_cell("B2"), Some((1, 1)));
        assert_eq!(labels.find_cell("H7"), Some((7, 6)));
        assert_eq!(labels.find_cell("Q17"), Some((16, 16)));
        assert_eq!(labels.find_cell("R1"), None);
        assert_eq!(labels.cell_label(4, 3), "E4");
    }

    #[test]
    fn rejects_duplicates() {
        let err = GridLabels::new(vec!["A".into(), "A".into()], vec!["1".into(), "2".into()]);
        assert!(err.is_err());
    }
}
