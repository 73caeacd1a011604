//! Exact Steklov spectrum for the exterior (and interior) of a ball in
//! d = 2..5 dimensions.
//!
//! For the exterior of a ball of radius L the eigenvalues and radial
//! eigenfunction profiles are known in closed form through the kernels
//! k_{n,d}; this module is both a feature (fast exact answers) and the
//! reference oracle for the finite-element solver. Everything is a pure
//! function of its arguments.

use crate::error::{Error, Result};
use crate::special::bessel::scaled_exp;
use crate::special::kernels::{check_dimension, i_nd_ratio_down, k_nd_ratio_down, k_nd_scaled_ext};
use crate::special::legendre::{gauss_legendre, legendre_p_all};
use crate::special::EULER_GAMMA;
use std::f64::consts::PI;

/// Ball obstacle: dimension d in {2,3,4,5} and radius L > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallSpec {
    pub d: u32,
    pub l: f64,
}

impl BallSpec {
    pub fn new(d: u32, l: f64) -> Result<BallSpec> {
        check_dimension(d)?;
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::domain(format!("ball radius must be positive, got {l}")));
        }
        Ok(BallSpec { d, l })
    }

    /// Surface area of the sphere of radius L in R^d.
    pub fn surface_area(&self) -> f64 {
        let d = self.d as f64;
        let s_unit = 2.0 * PI.powf(d / 2.0) / crate::special::gamma(d / 2.0);
        s_unit * self.l.powf(d - 1.0)
    }
}

/// Angular mode index (n, m). Eigenvalues depend on n only; m enumerates the
/// degenerate eigenfunctions (2D: m = +-1 distinguishing cos/sin at n > 0,
/// 3D: m in [-n, n]; axisymmetric evaluation uses m = 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallMode {
    pub n: usize,
    pub m: i32,
}

impl BallMode {
    pub fn validate(&self, d: u32) -> Result<()> {
        match d {
            2 => {
                if self.n == 0 && self.m != 1 && self.m != 0 {
                    return Err(Error::domain("2D n=0 mode has a single member"));
                }
                if self.m.abs() > 1 {
                    return Err(Error::domain("2D modes use m in {-1, +1}"));
                }
            }
            3 if self.m.unsigned_abs() as usize > self.n => {
                return Err(Error::domain(format!("3D requires |m| <= n, got m={} n={}", self.m, self.n)));
            }
            _ => {}
        }
        Ok(())
    }
}

fn check_rate(p: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::domain(format!("rate p must be nonnegative, got {p}")));
    }
    Ok(())
}

/// Exterior Steklov eigenvalue mu_n^{(p,L)}; exact for all p >= 0.
///
/// mu_n = (n+d-2)/L + sqrt(p) K_{n-2+d/2}(sqrt(p) L) / K_{n-1+d/2}(sqrt(p) L),
/// with the p = 0 limit (n+d-2)/L taken in closed form.
pub fn mu_exterior(ball: BallSpec, n: usize, p: f64) -> Result<f64> {
    check_rate(p)?;
    let base = (n as f64 + ball.d as f64 - 2.0) / ball.l;
    if p == 0.0 {
        return Ok(base);
    }
    let alpha = p.sqrt();
    let ratio = k_nd_ratio_down(n as i64, ball.d, alpha * ball.l)?;
    Ok(base + alpha * ratio)
}

/// The p-dependent part mu_n^{(p,L)} - mu_n^{(0,L)} = sqrt(p) K_{nu-1}/K_nu,
/// computed without the cancellation that differencing two mu_exterior
/// values suffers when (n+d-2)/L dominates.
pub fn mu_exterior_gap(ball: BallSpec, n: usize, p: f64) -> Result<f64> {
    check_rate(p)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    let alpha = p.sqrt();
    Ok(alpha * k_nd_ratio_down(n as i64, ball.d, alpha * ball.l)?)
}

/// Radial profile g_n^{(p,L)}(r) = k_{n,d}(sqrt(p) r) / k_{n,d}(sqrt(p) L),
/// normalized to 1 at r = L; at p = 0 the limit (L/r)^{n+d-2}.
pub fn radial_profile(ball: BallSpec, n: usize, p: f64, r: f64) -> Result<f64> {
    check_rate(p)?;
    if r < ball.l * (1.0 - 1e-12) {
        return Err(Error::domain(format!("radial_profile requires r >= L, got r={r}, L={}", ball.l)));
    }
    let r = r.max(ball.l);
    let expo = n as f64 + ball.d as f64 - 2.0;
    if p == 0.0 {
        return Ok((ball.l / r).powf(expo));
    }
    let alpha = p.sqrt();
    let num = k_nd_scaled_ext(n as i64, ball.d, alpha * r)?;
    let den = k_nd_scaled_ext(n as i64, ball.d, alpha * ball.l)?;
    // k(ar)/k(aL) = [e^{ar} k(ar)] / [e^{aL} k(aL)] * e^{-a (r-L)}
    Ok(num.ratio(den) * (-alpha * (r - ball.l)).exp())
}

/// Squared L2 norm of the exterior eigenfunction, Q_n^{(p,L)}.
///
/// Finite closed form for p > 0; at p = 0 equals L/(2n+d-4) when 2n+d > 4 and
/// +infinity otherwise (infinity is an in-band value, not an error).
pub fn q_norm(ball: BallSpec, n: usize, p: f64) -> Result<f64> {
    check_rate(p)?;
    let d = ball.d as f64;
    let nn = n as f64;
    if p == 0.0 {
        let denom = 2.0 * nn + d - 4.0;
        return Ok(if denom > 0.0 { ball.l / denom } else { f64::INFINITY });
    }
    let alpha = p.sqrt();
    let z = alpha * ball.l;
    let rho = k_nd_ratio_down(n as i64, ball.d, z)?;
    Ok(((2.0 * nn + d - 2.0) * rho + z * (rho * rho - 1.0)) / (2.0 * alpha))
}

/// Interior-ball Steklov eigenvalue
/// mu_hat_n = sqrt(p) I_{n-2+d/2}(sqrt(p) L)/I_{n-1+d/2}(sqrt(p) L) - (n+d-2)/L,
/// with the p = 0 limit n/L.
pub fn mu_interior(ball: BallSpec, n: usize, p: f64) -> Result<f64> {
    check_rate(p)?;
    if p == 0.0 {
        return Ok(n as f64 / ball.l);
    }
    let alpha = p.sqrt();
    let ratio = i_nd_ratio_down(n as i64, ball.d, alpha * ball.l)?;
    Ok(alpha * ratio - (n as f64 + ball.d as f64 - 2.0) / ball.l)
}

/// Small-p regime of mu_n^{(p,L)}, determined by (n, d) alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallRegime {
    /// d=2, n=0: mu ~ -1/(L (ln(sqrt(p) L / 2) + gamma))
    Log2dN0,
    /// d=2, n=1: mu ~ 1/L - L p (gamma + ln(sqrt(p) L / 2))
    Log2dN1,
    /// d=3, n=0: mu = 1/L + sqrt(p), exact
    Sqrt3d,
    /// d=4, n=0: mu ~ 2/L - L p (gamma + ln(sqrt(p) L / 2))
    PLogP4d,
    /// everything else: mu ~ mu0 + p L/(2n+d-4)
    Linear,
}

/// Leading small-p law of an exterior ball eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallPLaw {
    pub regime: BallRegime,
    /// limit eigenvalue mu_n^{(0,L)}
    pub mu0: f64,
    /// leading coefficient; units depend on the regime
    pub coefficient: f64,
    l: f64,
}

impl SmallPLaw {
    /// Evaluate the predicted eigenvalue at rate p.
    pub fn predict(&self, p: f64) -> f64 {
        let logterm = (p.sqrt() * self.l / 2.0).ln() + EULER_GAMMA;
        match self.regime {
            BallRegime::Log2dN0 => -self.coefficient / logterm,
            BallRegime::Log2dN1 | BallRegime::PLogP4d => self.mu0 - self.coefficient * p * logterm,
            BallRegime::Sqrt3d => self.mu0 + self.coefficient * p.sqrt(),
            BallRegime::Linear => self.mu0 + self.coefficient * p,
        }
    }
}

/// Classify the small-p behavior of mu_n^{(p,L)}.
pub fn small_p_law(ball: BallSpec, n: usize) -> SmallPLaw {
    let d = ball.d;
    let l = ball.l;
    let mu0 = (n as f64 + d as f64 - 2.0) / l;
    let (regime, coefficient) = match (d, n) {
        (2, 0) => (BallRegime::Log2dN0, 1.0 / l),
        (2, 1) => (BallRegime::Log2dN1, l),
        (3, 0) => (BallRegime::Sqrt3d, 1.0),
        (4, 0) => (BallRegime::PLogP4d, l),
        _ => (BallRegime::Linear, l / (2.0 * n as f64 + d as f64 - 4.0)),
    };
    SmallPLaw { regime, mu0, coefficient, l }
}

/// Boundary samples for the ball Dirichlet-to-Neumann operator.
///
/// 2D: values on the uniform angular grid theta_i = -pi + 2 pi i / N.
/// 3D axisymmetric: values at the Gauss-Legendre nodes in x = cos(theta),
/// ordered by ascending x (south pole first).
#[derive(Clone, Debug)]
pub enum DtnGrid {
    Uniform2d(Vec<f64>),
    GaussLegendre3d(Vec<f64>),
}

/// Apply the ball DtN operator M_p^L to boundary samples:
/// returns sum_{n <= n_max, m} mu_n^{(p,L)} psi_{n,m} <psi_{n,m}, f> at the
/// sample points. Exact on band-limited inputs with bandwidth <= n_max.
pub fn dtn_apply_ball(ball: BallSpec, p: f64, samples: &DtnGrid, n_max: usize) -> Result<Vec<f64>> {
    check_rate(p)?;
    let mu: Vec<f64> = (0..=n_max).map(|n| mu_exterior(ball, n, p)).collect::<Result<_>>()?;
    match samples {
        DtnGrid::Uniform2d(f) => {
            if ball.d != 2 {
                return Err(Error::domain("Uniform2d grid requires d = 2"));
            }
            let n_pts = f.len();
            if n_pts <= 2 * n_max {
                return Err(Error::Truncation(format!(
                    "2D grid with {n_pts} points cannot resolve n_max = {n_max} (need > 2 n_max)"
                )));
            }
            let l = ball.l;
            let ds = 2.0 * PI * l / n_pts as f64;
            let theta: Vec<f64> = (0..n_pts).map(|i| -PI + 2.0 * PI * i as f64 / n_pts as f64).collect();
            let mut out = vec![0.0; n_pts];
            // n = 0 mode
            let psi0 = 1.0 / (2.0 * PI * l).sqrt();
            let c0: f64 = f.iter().map(|v| v * psi0 * ds).sum();
            for g in out.iter_mut() {
                *g += mu[0] * psi0 * c0;
            }
            let norm = 1.0 / (PI * l).sqrt();
            for n in 1..=n_max {
                let mut cc = 0.0;
                let mut cs = 0.0;
                for (i, v) in f.iter().enumerate() {
                    let a = n as f64 * theta[i];
                    cc += v * a.cos() * norm * ds;
                    cs += v * a.sin() * norm * ds;
                }
                for (i, g) in out.iter_mut().enumerate() {
                    let a = n as f64 * theta[i];
                    *g += mu[n] * norm * (cc * a.cos() + cs * a.sin());
                }
            }
            Ok(out)
        }
        DtnGrid::GaussLegendre3d(f) => {
            if ball.d != 3 {
                return Err(Error::domain("GaussLegendre3d grid requires d = 3"));
            }
            let n_pts = f.len();
            if n_pts < n_max + 1 {
                return Err(Error::Truncation(format!(
                    "3D grid with {n_pts} points cannot resolve n_max = {n_max} (need >= n_max + 1)"
                )));
            }
            let l = ball.l;
            let (x, w) = gauss_legendre(n_pts);
            // surface element: 2 pi L^2 w_q in x = cos(theta)
            let mut coeffs = vec![0.0; n_max + 1];
            let mut ptab = Vec::with_capacity(n_pts);
            for q in 0..n_pts {
                ptab.push(legendre_p_all(n_max, x[q])?);
            }
            for n in 0..=n_max {
                let norm = ((2.0 * n as f64 + 1.0) / (4.0 * PI * l * l)).sqrt();
                let mut c = 0.0;
                for q in 0..n_pts {
                    c += f[q] * norm * ptab[q][n] * 2.0 * PI * l * l * w[q];
                }
                coeffs[n] = c;
            }
            let mut out = vec![0.0; n_pts];
            for n in 0..=n_max {
                let norm = ((2.0 * n as f64 + 1.0) / (4.0 * PI * l * l)).sqrt();
                for (q, g) in out.iter_mut().enumerate() {
                    *g += mu[n] * norm * ptab[q][n] * coeffs[n];
                }
            }
            Ok(out)
        }
    }
}

/// V_{n,m}^{(p,L)} radial part times the boundary normalization, used by the
/// exterior extension: the full eigenfunction is psi_{n,m}(angles) * g_n(r).
/// Exposed for the FEM extension and envelope checks.
pub fn envelope_h_star(ball: BallSpec, p: f64, r: f64) -> Result<f64> {
    check_rate(p)?;
    if r < ball.l {
        return Err(Error::domain("envelope requires r >= L"));
    }
    let d = ball.d as f64;
    if p == 0.0 {
        return Ok(if ball.d == 2 { 1.0 } else { (r / ball.l).powf(2.0 - d) });
    }
    // (r/L)^{1-d/2} K_{d/2-1}(r sqrt(p)) / K_{d/2-1}(L sqrt(p))
    let alpha = p.sqrt();
    let order = crate::special::BesselOrder::from_twice(ball.d as i32 - 2);
    let num = crate::special::bessel_k_scaled_ext(order, alpha * r)?;
    let den = crate::special::bessel_k_scaled_ext(order, alpha * ball.l)?;
    let ratio = num.mul(scaled_exp(-alpha * r)).ratio(den.mul(scaled_exp(-alpha * ball.l)));
    Ok((r / ball.l).powf(1.0 - d / 2.0) * ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn exterior_eigenvalues_exact_cases() {
        // d=3: mu_0 = 1/L + sqrt(p), exact
        let b3 = BallSpec::new(3, 1.0).unwrap();
        assert!(rel(mu_exterior(b3, 0, 4.0).unwrap(), 3.0) < 1e-13);
        // d=2, p=0: mu_n = n/L
        let b2 = BallSpec::new(2, 1.0).unwrap();
        assert!(rel(mu_exterior(b2, 5, 0.0).unwrap(), 5.0) < 1e-15);
        // d=5: mu_0 = 3/L + pL/(1 + sqrt(p) L)
        let b5 = BallSpec::new(5, 1.0).unwrap();
        assert!(rel(mu_exterior(b5, 0, 0.25).unwrap(), 3.0 + 0.25 / 1.5) < 1e-13);
        // Table I: d=2, L=R=1, p=1: mu_0 = K_1(1)/K_0(1)
        assert!((mu_exterior(b2, 0, 1.0).unwrap() - 1.4296).abs() < 1e-4);
    }

    #[test]
    fn profile_normalization_and_decay() {
        let b3 = BallSpec::new(3, 1.0).unwrap();
        assert!(rel(radial_profile(b3, 2, 0.7, 1.0).unwrap(), 1.0) < 1e-14);
        // d=3, n=0, p=1, L=1, r=2: (1/2) e^{-1}
        let g = radial_profile(b3, 0, 1.0, 2.0).unwrap();
        assert!(rel(g, 0.5 * (-1.0_f64).exp()) < 1e-13);
        // d=2, n=1, p=0, r=4: (L/r)^{n+d-2} = 1/4
        let b2 = BallSpec::new(2, 1.0).unwrap();
        assert!(rel(radial_profile(b2, 1, 0.0, 4.0).unwrap(), 0.25) < 1e-15);
        // strictly decreasing in r
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let r = 1.0 + i as f64 * 0.25;
            let v = radial_profile(b3, 1, 0.3, r).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(radial_profile(b3, 0, 1.0, 0.5).is_err());
    }

    #[test]
    fn q_norm_closed_forms() {
        let b3 = BallSpec::new(3, 1.0).unwrap();
        assert!(rel(q_norm(b3, 1, 0.0).unwrap(), 1.0) < 1e-15);
        assert!(q_norm(b3, 0, 0.0).unwrap().is_infinite());
        // d=3 n=0: Q = d/dp (1/L + sqrt(p)) = 1/(2 sqrt(p))
        let q = q_norm(b3, 0, 0.09).unwrap();
        assert!(rel(q, 1.0 / 0.6) < 1e-12);
        // 2D: divergence at n = 0 and n = 1
        let b2 = BallSpec::new(2, 2.0).unwrap();
        assert!(q_norm(b2, 0, 0.0).unwrap().is_infinite());
        assert!(q_norm(b2, 1, 0.0).unwrap().is_infinite());
        assert!(rel(q_norm(b2, 3, 0.0).unwrap(), 2.0 / 4.0) < 1e-15);
    }

    #[test]
    fn q_norm_equals_dp_mu_by_finite_difference() {
        for &(d, n, p) in &[
            (2u32, 0usize, 0.5),
            (2, 1, 0.02),
            (2, 4, 1.3),
            (3, 0, 0.09),
            (3, 2, 0.4),
            (4, 1, 0.8),
            (5, 0, 0.05),
            (5, 3, 2.0),
        ] {
            let ball = BallSpec::new(d, 1.3).unwrap();
            let h = 1e-6 * p;
            // difference the p-dependent gap so the constant (n+d-2)/L part
            // cannot poison the quotient with its ULP noise
            let fd = (mu_exterior_gap(ball, n, p + h).unwrap()
                - mu_exterior_gap(ball, n, p - h).unwrap())
                / (2.0 * h);
            let q = q_norm(ball, n, p).unwrap();
            assert!(rel(fd, q) < 1e-6, "d={d} n={n} p={p}: fd={fd} q={q}");
            // consistency of the gap with the full eigenvalue
            let gap = mu_exterior_gap(ball, n, p).unwrap();
            let full = mu_exterior(ball, n, p).unwrap() - mu_exterior(ball, n, 0.0).unwrap();
            assert!((gap - full).abs() < 1e-16 + 1e-16 * mu_exterior(ball, n, p).unwrap(),
                "gap {gap} vs {full}");
        }
    }

    #[test]
    fn interior_eigenvalues() {
        let b = BallSpec::new(3, 2.0).unwrap();
        assert!(rel(mu_interior(b, 3, 0.0).unwrap(), 1.5) < 1e-15);
        // d=3, L=1, n=0, p=1: coth(1) - 1
        let b1 = BallSpec::new(3, 1.0).unwrap();
        let want = 1.0 / 1.0_f64.tanh() - 1.0;
        assert!(rel(mu_interior(b1, 0, 1.0).unwrap(), want) < 1e-12);
        // sqrt(p) bound, d=2, n=2
        let b2 = BallSpec::new(2, 1.0).unwrap();
        for &p in &[1e-4, 0.01, 0.3, 2.0, 9.0] {
            let gap = mu_interior(b2, 2, p).unwrap() - mu_interior(b2, 2, 0.0).unwrap();
            assert!(gap >= -1e-12 && gap <= p.sqrt() + 1e-12, "p={p} gap={gap}");
        }
    }

    #[test]
    fn exterior_sqrt_p_bound_d_ge_3() {
        for d in [3u32, 4, 5] {
            let ball = BallSpec::new(d, 0.8).unwrap();
            for n in [0usize, 1, 3, 8] {
                for &p in &[1e-6, 1e-3, 0.1, 1.0, 16.0] {
                    let gap = mu_exterior(ball, n, p).unwrap() - mu_exterior(ball, n, 0.0).unwrap();
                    assert!(gap >= -1e-12, "d={d} n={n} p={p}");
                    assert!(gap <= p.sqrt() + 1e-10, "d={d} n={n} p={p} gap={gap}");
                }
            }
        }
    }

    #[test]
    fn ordering_in_n() {
        for d in [2u32, 3, 4, 5] {
            let ball = BallSpec::new(d, 1.7).unwrap();
            for &p in &[0.0, 0.04, 1.0, 25.0] {
                let mut prev = -1.0;
                for n in 0..12 {
                    let mu = mu_exterior(ball, n, p).unwrap();
                    assert!(mu >= prev - 1e-12, "d={d} p={p} n={n}");
                    prev = mu;
                }
            }
        }
    }

    #[test]
    fn small_p_laws_match_mu_exterior() {
        // |mu(p) - law(p)| = o(law(p) - mu0) along p -> 0
        let cases = [
            (2u32, 0usize),
            (2, 1),
            (2, 3),
            (3, 0),
            (3, 2),
            (4, 0),
            (4, 1),
            (5, 0),
        ];
        for &(d, n) in &cases {
            let ball = BallSpec::new(d, 1.0).unwrap();
            let law = small_p_law(ball, n);
            let mut prev_ratio = f64::INFINITY;
            for k in 1..=4 {
                let p = 10.0_f64.powi(-2 * k); // 1e-2 .. 1e-8
                let mu = mu_exterior(ball, n, p).unwrap();
                let pred = law.predict(p);
                let lead = (pred - law.mu0).abs().max(1e-300);
                let ratio = (mu - pred).abs() / lead;
                assert!(
                    ratio < prev_ratio.max(1e-9) * 1.001 || ratio < 0.05,
                    "d={d} n={n} p={p}: remainder/leading = {ratio} (prev {prev_ratio})"
                );
                prev_ratio = ratio;
            }
            // at the smallest p the law must be a good approximation
            let p = 1e-8;
            let mu = mu_exterior(ball, n, p).unwrap();
            let pred = law.predict(p);
            let lead = (pred - law.mu0).abs().max(1e-300);
            assert!((mu - pred).abs() / lead < 0.02, "d={d} n={n}: law not reached at p=1e-8");
        }
    }

    #[test]
    fn dtn_ball_2d_and_3d() {
        // f = const, d=3, p=1, L=1: M f = (1/L + 1) f
        let b3 = BallSpec::new(3, 1.0).unwrap();
        let f = DtnGrid::GaussLegendre3d(vec![1.0; 24]);
        let g = dtn_apply_ball(b3, 1.0, &f, 8).unwrap();
        for v in &g {
            assert!(rel(*v, 2.0) < 1e-12, "got {v}");
        }
        // f = cos(theta) on the circle, d=2, p=0: eigenvalue 1
        let b2 = BallSpec::new(2, 1.0).unwrap();
        let n_pts = 64;
        let f: Vec<f64> = (0..n_pts).map(|i| (-PI + 2.0 * PI * i as f64 / n_pts as f64).cos()).collect();
        let g = dtn_apply_ball(b2, 0.0, &DtnGrid::Uniform2d(f.clone()), 8).unwrap();
        for (gi, fi) in g.iter().zip(&f) {
            assert!((gi - fi).abs() < 1e-12);
        }
        // truncation mismatch
        assert!(dtn_apply_ball(b2, 0.0, &DtnGrid::Uniform2d(vec![0.0; 16]), 8).is_err());
    }

    #[test]
    fn dtn_self_adjoint_on_band_limited_inputs() {
        let b2 = BallSpec::new(2, 1.5).unwrap();
        let n_pts = 96;
        let n_max = 10;
        let l = 1.5;
        let ds = 2.0 * PI * l / n_pts as f64;
        // pseudo-random band-limited f, g
        let mut f = vec![0.0; n_pts];
        let mut g = vec![0.0; n_pts];
        for i in 0..n_pts {
            let th = -PI + 2.0 * PI * i as f64 / n_pts as f64;
            for n in 0..=n_max {
                let cn = ((n * 2654435761 + 12345) % 1000) as f64 / 1000.0 - 0.5;
                let sn = ((n * 2246822519 + 54321) % 1000) as f64 / 1000.0 - 0.5;
                f[i] += cn * (n as f64 * th).cos() + sn * (n as f64 * th).sin();
                let cn2 = ((n * 3266489917 + 777) % 1000) as f64 / 1000.0 - 0.5;
                g[i] += cn2 * (n as f64 * th).cos() - sn * (n as f64 * th).sin();
            }
        }
        let mf = dtn_apply_ball(b2, 0.7, &DtnGrid::Uniform2d(f.clone()), n_max).unwrap();
        let mg = dtn_apply_ball(b2, 0.7, &DtnGrid::Uniform2d(g.clone()), n_max).unwrap();
        let a: f64 = mf.iter().zip(&g).map(|(x, y)| x * y * ds).sum();
        let b: f64 = mg.iter().zip(&f).map(|(x, y)| x * y * ds).sum();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "<Mf,g>={a} <f,Mg>={b}");
    }

    #[test]
    fn envelope_matches_explicit_mode() {
        // d=3 sphere, k=0, p=0: V_0 ~ 1/|x| meets the bound exactly
        let b = BallSpec::new(3, 1.0).unwrap();
        for &r in &[1.0, 2.0, 7.0] {
            let h = envelope_h_star(b, 0.0, r).unwrap();
            assert!(rel(h, 1.0 / r) < 1e-14);
        }
        // 2D p=0 envelope is the constant 1 (recurrent diffusion)
        let b2 = BallSpec::new(2, 1.0).unwrap();
        assert_eq!(envelope_h_star(b2, 0.0, 5.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_negative_rate() {
        let b = BallSpec::new(3, 1.0).unwrap();
        assert!(mu_exterior(b, 0, -0.1).is_err());
        assert!(mu_interior(b, 0, -0.1).is_err());
    }
}
