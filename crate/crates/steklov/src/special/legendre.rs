//! Legendre polynomials and Gauss-Legendre quadrature rules.

use crate::error::{Error, Result};

pub const LEGENDRE_N_MAX: usize = 256;

/// P_n(x) by the three-term recurrence, |x| <= 1, n <= LEGENDRE_N_MAX.
pub fn legendre_p(n: usize, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("legendre_p requires |x| <= 1, got {x}")));
    }
    if n > LEGENDRE_N_MAX {
        return Err(Error::domain(format!("legendre_p supports n <= {LEGENDRE_N_MAX}, got {n}")));
    }
    Ok(legendre_p_unchecked(n, x))
}

pub(crate) fn legendre_p_unchecked(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut pm1 = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * pm1) / (kf + 1.0);
        pm1 = p;
        p = next;
    }
    p
}

/// P_0..P_n at x in one sweep.
pub fn legendre_p_all(n: usize, x: f64) -> Result<Vec<f64>> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("legendre_p_all requires |x| <= 1, got {x}")));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return Ok(out);
    }
    out.push(x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Associated Legendre functions P_m^m(x) .. P_{n_max}^m(x) (no Condon phase
/// applied beyond the standard (-1)^m convention).
pub fn assoc_legendre_all(n_max: usize, m: usize, x: f64) -> Result<Vec<f64>> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("assoc_legendre requires |x| <= 1, got {x}")));
    }
    if n_max < m {
        return Ok(Vec::new());
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_m^m = (-1)^m (2m-1)!! s^m
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    let mut out = Vec::with_capacity(n_max - m + 1);
    out.push(pmm);
    if n_max == m {
        return Ok(out);
    }
    let mut p_prev = pmm;
    let mut p = x * (2 * m + 1) as f64 * pmm;
    out.push(p);
    for n in m + 1..n_max {
        let nf = n as f64;
        let mf = m as f64;
        let next = ((2.0 * nf + 1.0) * x * p - (nf + mf) * p_prev) / (nf - mf + 1.0);
        p_prev = p;
        p = next;
        out.push(p);
    }
    Ok(out)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on P_n from the Chebyshev-like initial guesses; weights
/// w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_p_and_deriv(n, x);
                x -= p2 / d2;
                dp = d2;
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_p_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut pm1 = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * pm1) / (kf + 1.0);
        pm1 = p;
        p = next;
    }
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}
