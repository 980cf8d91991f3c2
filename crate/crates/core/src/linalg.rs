//! Dense least squares by Householder QR.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Ratio of smallest to largest `|R_ii|` below which the design is treated
/// as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Solves `min_w sum_i weight_i (y_i - (X w)_i)^2` for a design given as
/// columns. `weights = None` is ordinary least squares.
pub fn least_squares(columns: &[&[f64]], response: &[f64], weights: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = response.len();
    let m = columns.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidProblem("design columns and response differ in length".into()));
    }
    if n < m {
        return Err(Error::InvalidProblem(alloc::format!("{n} rows cannot determine {m} coefficients")));
    }

    let mut a = vec![0.0; n * m];
    let mut b = vec![0.0; n];
    match weights {
        Some(w) => {
            let root: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
            for (j, col) in columns.iter().enumerate() {
                for i in 0..n {
                    a[j * n + i] = col[i] * root[i];
                }
            }
            for i in 0..n {
                b[i] = response[i] * root[i];
            }
        }
        None => {
            for (j, col) in columns.iter().enumerate() {
                a[j * n..(j + 1) * n].copy_from_slice(col);
            }
            b.copy_from_slice(response);
        }
    }

    let mut diag = vec![0.0; m];
    for k in 0..m {
        let (_, tail) = a.split_at_mut(k * n);
        let col = &mut tail[..n];
        let norm = col[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if col[k] > 0.0 { -norm } else { norm };
        col[k] -= alpha;
        let vnorm2: f64 = col[k..].iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        // reflect the remaining columns and the response
        let v: Vec<f64> = col[k..].to_vec();
        for j in (k + 1)..m {
            let other = &mut tail[(j - k) * n..(j - k + 1) * n];
            let s: f64 = v.iter().zip(&other[k..]).map(|(x, y)| x * y).sum::<f64>() * 2.0 / vnorm2;
            for (o, vi) in other[k..].iter_mut().zip(&v) {
                *o -= s * vi;
            }
        }
        let s: f64 = v.iter().zip(&b[k..]).map(|(x, y)| x * y).sum::<f64>() * 2.0 / vnorm2;
        for (o, vi) in b[k..].iter_mut().zip(&v) {
            *o -= s * vi;
        }
    }

    let largest = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let smallest = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    if largest == 0.0 || smallest.is_nan() || smallest <= RANK_TOLERANCE * largest {
        let condition = if smallest == 0.0 { f64::INFINITY } else { largest / smallest };
        return Err(Error::RankDeficient { condition });
    }

    // back substitution on R w = Q^T b
    let mut w = vec![0.0; m];
    for k in (0..m).rev() {
        let mut acc = b[k];
        for j in (k + 1)..m {
            acc -= a[j * n + k] * w[j];
        }
        w[k] = acc / diag[k];
    }
    Ok(w)
}
