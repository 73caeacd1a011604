//! Small dense helpers for the boundary pencil: Cholesky of the boundary
//! mass and triangular solves for the symmetric-definite whitening.

use crate::error::{Error, Result};
use faer::Mat;

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky_lower(a: &Mat<f64>) -> Result<Mat<f64>> {
    let n = a.nrows();
    let mut l = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 {
            return Err(Error::Solver(format!("matrix not positive definite at pivot {j}")));
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

/// X <- L^{-1} X.
pub fn solve_lower_in_place(l: &Mat<f64>, x: &mut Mat<f64>) {
    let n = l.nrows();
    for col in 0..x.ncols() {
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
}

/// X <- L^{-T} X.
pub fn solve_lower_transpose_in_place(l: &Mat<f64>, x: &mut Mat<f64>) {
    let n = l.nrows();
    for col in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_round_trip() {
        let n = 8;
        let mut a = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = if i == j { 4.0 } else { 1.0 / (1.0 + (i as f64 - j as f64).abs()) };
            }
        }
        let l = cholesky_lower(&a).unwrap();
        let back = &l * l.transpose();
        for i in 0..n {
            for j in 0..n {
                assert!((back[(i, j)] - a[(i, j)]).abs() < 1e-12);
            }
        }
        // L^{-1} (L x) = x
        let mut x = Mat::<f64>::from_fn(n, 2, |i, c| (i + c) as f64 * 0.3 - 1.0);
        let want = x.clone();
        let mut lx = &l * &x;
        solve_lower_in_place(&l, &mut lx);
        for i in 0..n {
            for c in 0..2 {
                assert!((lx[(i, c)] - want[(i, c)]).abs() < 1e-12);
            }
        }
        let mut ltx = l.transpose() * &x;
        solve_lower_transpose_in_place(&l, &mut ltx);
        for i in 0..n {
            for c in 0..2 {
                assert!((ltx[(i, c)] - x[(i, c)]).abs() < 1e-12);
            }
        }
    }
}
