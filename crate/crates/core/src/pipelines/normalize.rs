//! Expression preprocessing: median-center log intensities, keep the most
//! variable probes, return to the intensity scale.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{median, variance};
use crate::model::DataMatrix;

/// Centers every column on its median, keeps the `top_k` columns of largest
/// variance (ties keep input order) and maps each entry to `2^value`.
/// Columns come out in decreasing order of variance.
pub fn normalize_expression(log_intensities: &DataMatrix, top_k: usize) -> Result<DataMatrix> {
    let d = log_intensities.n_cols();
    if top_k > d {
        return Err(Error::InvalidConfig(alloc::format!("top_k = {top_k} exceeds {d} columns")));
    }
    if log_intensities.n_rows() == 0 {
        return Err(Error::InvalidData("no rows".into()));
    }
    let centered: Vec<Vec<f64>> = log_intensities
        .columns()
        .iter()
        .map(|c| {
            let m = median(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let spread: Vec<f64> = centered.iter().map(|c| if c.len() < 2 { 0.0 } else { variance(c) }).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| spread[b].total_cmp(&spread[a]));
    order.truncate(top_k);
    DataMatrix::new(
        order.iter().map(|&j| log_intensities.names()[j].clone()).collect(),
        order.iter().map(|&j| centered[j].iter().map(|v| v.exp2()).collect()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn toy_matrix() {
        // centered: a = [-3, -1, 1, 3] (var 20/3), b = [-1.5, -0.5, 0.5, 1.5] (var 5/3)
        let data =
            DataMatrix::new(names(&["b", "a"]), vec![vec![0.5, 1.5, 2.5, 3.5], vec![7.0, 9.0, 11.0, 13.0]]).unwrap();
        let out = normalize_expression(&data, 1).unwrap();
        assert_eq!(out.names(), ["a"]);
        assert_eq!(out.column(0), [0.125, 0.5, 2.0, 8.0]);
    }

    #[test]
    fn centered_column_unchanged_and_constant_last() {
        let data = DataMatrix::new(
            names(&["flat", "centered", "wide"]),
            vec![vec![4.0, 4.0, 4.0], vec![-1.0, 0.0, 1.0], vec![10.0, 0.0, 20.0]],
        )
        .unwrap();
        let out = normalize_expression(&data, 3).unwrap();
        assert_eq!(out.names(), ["wide", "centered", "flat"]);
        assert_eq!(out.column(1), [0.5, 1.0, 2.0]);
        assert_eq!(out.column(2), [1.0, 1.0, 1.0]);
        assert!(normalize_expression(&data, 4).is_err());
    }
}
