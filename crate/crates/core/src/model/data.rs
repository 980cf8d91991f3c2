use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `N` samples of `d` named real variables, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl DataMatrix {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidData(alloc::format!("{} names for {} columns", names.len(), columns.len())));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidData(alloc::format!("duplicate variable `{name}`")));
            }
        }
        if let Some(first) = columns.first() {
            let n = first.len();
            if columns.iter().any(|c| c.len() != n) {
                return Err(Error::InvalidData("columns differ in length".into()));
            }
        }
        for (name, col) in names.iter().zip(&columns) {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidData(alloc::format!("non-finite value in `{name}` at row {row}")));
            }
        }
        Ok(DataMatrix { names, columns })
    }

    /// Builds from row-major samples.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = names.len();
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidData(alloc::format!("row {i} has {} values, expected {d}", rows[i].len())));
        }
        let columns = (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        DataMatrix::new(names, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Column index of each requested name.
    pub fn align(&self, names: &[String]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n).ok_or_else(|| Error::MissingVariable(n.clone()))).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> DataMatrix {
        DataMatrix {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> DataMatrix {
        DataMatrix {
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> DataMatrix {
        DataMatrix {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect(),
        }
    }

    /// Row-wise sum across all columns.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = alloc::vec![0.0; self.n_rows()];
        for col in &self.columns {
            for (s, v) in sums.iter_mut().zip(col) {
                *s += v;
            }
        }
        sums
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn rejects_bad_input() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(DataMatrix::new(names.clone(), vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(DataMatrix::new(names.clone(), vec![vec![1.0], vec![f64::NAN]]).is_err());
        assert!(DataMatrix::new(names.clone(), vec![vec![1.0]]).is_err());
        assert!(DataMatrix::from_rows(names, &[vec![1.0]]).is_err());
    }

    #[test]
    fn rows_and_columns_agree() {
        let names = vec!["a".to_string(), "b".to_string()];
        let m = DataMatrix::from_rows(names, &[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.column(1), &[2.0, 4.0, 6.0]);
        assert_eq!(m.row(2), vec![5.0, 6.0]);
        assert_eq!(m.select_rows(&[2, 0]).column(0), &[5.0, 1.0]);
        assert_eq!(m.select_columns(&[1]).names(), &["b".to_string()]);
        assert_eq!(m.align(&["b".to_string(), "a".to_string()]).unwrap(), vec![1, 0]);
        assert!(m.align(&["c".to_string()]).is_err());
        assert_eq!(m.row_sums(), vec![3.0, 7.0, 11.0]);
    }
}
