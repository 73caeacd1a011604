//! Small-p classification of Steklov eigenvalues: the far-field coefficients
//! c_k and d_k (2D), the boundary-integral coefficient a_k (2D/3D/4D), the
//! squared L2 norm b_k with its exterior tail sum, regime classification with
//! predicted mu_k(p) laws, p-sweeps with eigenvalue branch tracking, identity
//! verification, and decay-envelope checks.

use crate::ball::{envelope_h_star, mu_exterior, mu_interior, q_norm, BallSpec};
use crate::error::{Error, Result};
use crate::fem::extend::extend_exterior;
use crate::fem::solve::{FemProblem, SteklovSpectrum};
use crate::fem::AngularFn;
use crate::geometry::{Ambient, BoundaryTag};
use crate::special::kernels::{i_nd_ratio_down, i_nd_scaled};
use crate::special::EULER_GAMMA;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Leading small-p regime of one eigenvalue branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// 2D, c_k != 0: mu_k(p) - mu_k(0) ~ -a_k / ln(sqrt(p))
    Log2d,
    /// 2D, c_k = 0, d_k != 0: ~ -p ln(sqrt(p)) d_k
    PLogP2d,
    /// 3D, boundary integral != 0: ~ a_k sqrt(p)
    Sqrt3d,
    /// 4D, boundary integral != 0: ~ -p ln(sqrt(p)) [mu_k^2/(8 pi^2)] (int v)^2
    PLogP4d,
    /// finite-norm eigenfunction: ~ b_k p
    Linear,
}

/// Closed predicted law mu_k(p) for one branch.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PredictedLaw {
    pub regime: Regime,
    pub mu0: f64,
    pub coefficient: f64,
    /// logarithmic capacity used for the refined 2D principal law, if known
    pub capacity: Option<f64>,
    /// boundary measure (used by the bare principal law)
    pub surface: f64,
}

impl PredictedLaw {
    pub fn predict(&self, p: f64) -> f64 {
        self.mu0 + self.predict_delta(p)
    }

    /// Predicted mu_k(p) - mu_k(0).
    pub fn predict_delta(&self, p: f64) -> f64 {
        match self.regime {
            Regime::Log2d => match self.capacity {
                Some(rc) => -2.0 * PI / (self.surface * ((rc * p.sqrt() / 2.0).ln() + EULER_GAMMA)),
                None => -self.coefficient / p.sqrt().ln(),
            },
            Regime::PLogP2d | Regime::PLogP4d => -p * p.sqrt().ln() * self.coefficient,
            Regime::Sqrt3d => self.coefficient * p.sqrt(),
            Regime::Linear => self.coefficient * p,
        }
    }
}

/// Per-eigenvalue coefficient bundle and classification.
#[derive(Clone, Debug, Serialize)]
pub struct SmallPReport {
    pub k: usize,
    pub d: u32,
    pub regime: Regime,
    /// secondary candidate when the discriminating statistic sits near the
    /// classification threshold
    pub ambiguous_with: Option<Regime>,
    /// angular mean of V_k at infinity (2D; real for real eigenfunctions)
    pub c: f64,
    /// p ln p coefficient via circle moments (2D)
    pub d_coeff: f64,
    /// the same coefficient via the fourth-identity boundary route (2D)
    pub d_coeff_identity: f64,
    pub a: f64,
    /// squared L2(Omega) norm; infinite outside the Linear regime
    pub b: f64,
    /// last-included-order contribution of the b tail (truncation estimate)
    pub b_tail_remainder: f64,
    pub mu0: f64,
    pub boundary_integral: f64,
    pub law: PredictedLaw,
    /// coefficient recovered by regressing a sweep onto the law, if requested
    pub fit: Option<f64>,
}

const TOL_C: f64 = 1e-3;
const TOL_D: f64 = 1e-3;
const TOL_A: f64 = 1e-3;
const AMBIGUITY_BAND: f64 = 3.0;

/// Angular mean of V_k on the circle of radius `l_eval` >= L (2D).
///
/// Trapezoid rule on 8 n_max points; equals the n = 0 outer coefficient and
/// is independent of the choice of radius.
pub fn coeff_c(spectrum: &SteklovSpectrum, k: usize, l_eval: f64) -> Result<f64> {
    require_planar(spectrum)?;
    let m = (8 * spectrum.n_max).max(64);
    let pts: Vec<[f64; 2]> = (0..m)
        .map(|i| {
            let th = -PI + 2.0 * PI * i as f64 / m as f64;
            [l_eval * th.cos(), l_eval * th.sin()]
        })
        .collect();
    let vals = extend_exterior(spectrum, k, &pts)?;
    Ok(vals.iter().sum::<f64>() / m as f64)
}

/// The p ln p coefficient d_k by the circle-moment route (2D), evaluated at
/// radius `l_eval` >= L.
pub fn coeff_d(spectrum: &SteklovSpectrum, k: usize, l_eval: f64) -> Result<f64> {
    require_planar(spectrum)?;
    let m = (8 * spectrum.n_max).max(64);
    let dtheta = 2.0 * PI / m as f64;
    let pts: Vec<[f64; 2]> = (0..m)
        .map(|i| {
            let th = -PI + 2.0 * PI * i as f64 / m as f64;
            [l_eval * th.cos(), l_eval * th.sin()]
        })
        .collect();
    let vals = extend_exterior(spectrum, k, &pts)?;
    let mut mc = 0.0;
    let mut ms = 0.0;
    for (i, v) in vals.iter().enumerate() {
        let th = -PI + 2.0 * PI * i as f64 / m as f64;
        mc += v * th.cos() * dtheta;
        ms += v * th.sin() * dtheta;
    }
    // |int V e^{i theta}|^2 + |int V e^{-i theta}|^2 = 2 (mc^2 + ms^2)
    Ok(l_eval * l_eval / (2.0 * PI) * 2.0 * (mc * mc + ms * ms))
}

/// d_k via the fourth identity: the circle moment expressed as a boundary
/// integral over the obstacle, which is manifestly L-independent.
pub fn coeff_d_identity(spectrum: &SteklovSpectrum, k: usize) -> Result<f64> {
    require_planar(spectrum)?;
    let mu = spectrum.eigenvalues[k];
    let (zr, zi) = fourth_identity_rhs_2d(spectrum, k, mu, 1, spectrum.p)?;
    // d_k = (1/2pi) (|Z_+|^2 + |Z_-|^2) = (1/pi) |Z|^2 for real traces
    Ok((zr * zr + zi * zi) / PI)
}

/// Boundary-integral coefficient a_k: 2 pi |c_k|^2 in 2D,
/// [mu_k^(0)]^2/(4 pi) |int v_k|^2 in 3D.
pub fn coeff_a(spectrum: &SteklovSpectrum, k: usize) -> Result<f64> {
    match spectrum.problem.mesh.ambient {
        Ambient::Planar2d => {
            let c = coeff_c(spectrum, k, spectrum.problem.mesh.l)?;
            Ok(2.0 * PI * c * c)
        }
        Ambient::Axisym3d => {
            let mu = spectrum.eigenvalues[k];
            let s = spectrum.boundary_integrals[k];
            let a = mu * mu / (4.0 * PI) * s * s;
            let cap = mu * mu * spectrum.problem.b_inner(
                &vec![1.0; spectrum.problem.mesh.nodes.len()],
                &vec![1.0; spectrum.problem.mesh.nodes.len()],
            ) / (4.0 * PI);
            if a > cap * (1.0 + 1e-9) {
                return Err(Error::Solver(format!(
                    "a_{k} = {a} violates its Cauchy-Schwarz cap {cap}"
                )));
            }
            Ok(a)
        }
    }
}

/// Squared L2(Omega) norm of V_k^(0): FEM quadrature over Omega_L plus the
/// exterior modal tail. Returns (+inf, 0) outside the Linear regime.
pub fn coeff_b(spectrum: &SteklovSpectrum, k: usize) -> Result<(f64, f64)> {
    let problem = &spectrum.problem;
    let l = problem.mesh.l;
    let d = match problem.mesh.ambient {
        Ambient::Planar2d => 2,
        Ambient::Axisym3d => 3,
    };
    // regime gating: infinite norm when the slow modes are populated
    match d {
        2 => {
            let c = coeff_c(spectrum, k, l)?;
            let surface = spectrum.problem.boundary_measure();
            if c.abs() * surface.sqrt() > TOL_C {
                return Ok((f64::INFINITY, 0.0));
            }
            let dk = coeff_d(spectrum, k, l)?;
            if dk * 2.0 * PI / surface > TOL_D {
                return Ok((f64::INFINITY, 0.0));
            }
        }
        _ => {
            let surface = spectrum.problem.boundary_measure();
            let mu = spectrum.eigenvalues[k];
            let a = coeff_a(spectrum, k)?;
            let cap = mu * mu * surface / (4.0 * PI);
            if cap > 0.0 && a / cap > TOL_A {
                return Ok((f64::INFINITY, 0.0));
            }
        }
    }
    let interior = problem.volume_inner(&spectrum.fields[k], &spectrum.fields[k]);
    let ball = BallSpec::new(d, l)?;
    let mut tail = 0.0;
    let mut last_order_contrib = 0.0;
    let mut max_order = 0;
    for (j, ang) in spectrum.outer_angular.iter().enumerate() {
        let n = ang.degree();
        let min_n = if d == 2 { 2 } else { 1 };
        if n < min_n {
            continue;
        }
        let q = q_norm(ball, n, 0.0)?;
        let contrib = spectrum.outer_coeffs[k][j].powi(2) * q;
        tail += contrib;
        if n > max_order {
            max_order = n;
            last_order_contrib = contrib;
        } else if n == max_order {
            last_order_contrib += contrib;
        }
    }
    Ok((interior + tail, last_order_contrib))
}

impl FemProblem {
    /// Perimeter (2D) or surface area (axisym) of the Steklov boundary,
    /// measured on the discrete mesh through the boundary mass matrix.
    pub fn boundary_measure(&self) -> f64 {
        let ones = vec![1.0; self.mesh.nodes.len()];
        self.b_inner(&ones, &ones)
    }
}

fn require_planar(spectrum: &SteklovSpectrum) -> Result<()> {
    if spectrum.problem.mesh.ambient != Ambient::Planar2d {
        return Err(Error::domain("this coefficient is defined for planar (2D) spectra"));
    }
    Ok(())
}

/// Options for [analyze_small_p].
#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyzeOptions {
    /// logarithmic capacity of the obstacle when analytically known;
    /// refines the 2D principal-eigenvalue law
    pub capacity: Option<f64>,
}

/// Compute all coefficients and classify every eigenvalue of a p = 0 spectrum.
///
/// Degenerate clusters (eigenvalue gaps below 1e-8 relative) are rotated to an
/// orthonormal basis diagonalizing the rank-one a-type form before
/// coefficients are computed, so reported values do not depend on the
/// arbitrary eigenvector rotation returned by the eigensolver.
pub fn analyze_small_p(
    spectrum: &SteklovSpectrum,
    opts: AnalyzeOptions,
) -> Result<Vec<SmallPReport>> {
    if spectrum.p != 0.0 {
        return Err(Error::domain("small-p analysis requires the p = 0 spectrum"));
    }
    let d = match spectrum.problem.mesh.ambient {
        Ambient::Planar2d => 2,
        Ambient::Axisym3d => 3,
    };
    let surface = spectrum.problem.boundary_measure();
    let k_max = spectrum.k_max();

    // rotate degenerate clusters to diagonalize the a-type rank-one form
    let rotated = rotate_degenerate_clusters(spectrum, d)?;

    let mut out = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let mu0 = spectrum.eigenvalues[k];
        let (c, d_m, d_id) = if d == 2 {
            let c = rotated.coeff_c(k)?;
            let dm = rotated.coeff_d(k)?;
            let did = rotated.coeff_d_identity(k)?;
            (c, dm, did)
        } else {
            (0.0, 0.0, 0.0)
        };
        let s = rotated.boundary_integral(k);
        let a = if d == 2 { 2.0 * PI * c * c } else { mu0 * mu0 / (4.0 * PI) * s * s };
        let (regime, ambiguous_with) = classify_regime(d, mu0, c, d_m, s, surface);
        let (b, b_rem) = if regime == Regime::Linear {
            rotated.coeff_b(k)?
        } else {
            (f64::INFINITY, 0.0)
        };
        let coefficient = match regime {
            Regime::Log2d => {
                if k == 0 {
                    2.0 * PI / surface
                } else {
                    a
                }
            }
            Regime::PLogP2d => d_m,
            Regime::Sqrt3d => a,
            Regime::PLogP4d => mu0 * mu0 / (8.0 * PI * PI) * s * s,
            Regime::Linear => b,
        };
        let law = PredictedLaw {
            regime,
            mu0,
            coefficient,
            capacity: if k == 0 && regime == Regime::Log2d { opts.capacity } else { None },
            surface,
        };
        out.push(SmallPReport {
            k,
            d,
            regime,
            ambiguous_with,
            c,
            d_coeff: d_m,
            d_coeff_identity: d_id,
            a,
            b,
            b_tail_remainder: b_rem,
            mu0,
            boundary_integral: s,
            law,
            fit: None,
        });
    }
    Ok(out)
}

/// Regime table: normalized statistics against the fixed tolerances.
fn classify_regime(
    d: u32,
    mu0: f64,
    c: f64,
    d_coeff: f64,
    boundary_integral: f64,
    surface: f64,
) -> (Regime, Option<Regime>) {
    let band = |x: f64, tol: f64| x > tol / AMBIGUITY_BAND && x < tol * AMBIGUITY_BAND;
    match d {
        2 => {
            let c_hat = c.abs() * surface.sqrt();
            if c_hat > TOL_C {
                let amb = band(c_hat, TOL_C).then_some(Regime::PLogP2d);
                return (Regime::Log2d, amb);
            }
            let d_hat = d_coeff * 2.0 * PI / surface;
            if d_hat > TOL_D {
                let amb = band(d_hat, TOL_D).then_some(Regime::Linear);
                return (Regime::PLogP2d, amb);
            }
            let amb = band(d_hat, TOL_D).then_some(Regime::PLogP2d);
            (Regime::Linear, amb)
        }
        3 | 4 => {
            let cap = mu0 * mu0 * surface / (4.0 * PI);
            let a = mu0 * mu0 / (4.0 * PI) * boundary_integral * boundary_integral;
            let a_hat = if cap > 0.0 { a / cap } else { 0.0 };
            let primary = if d == 3 { Regime::Sqrt3d } else { Regime::PLogP4d };
            if a_hat > TOL_A {
                let amb = band(a_hat, TOL_A).then_some(Regime::Linear);
                (primary, amb)
            } else {
                let amb = band(a_hat, TOL_A).then_some(primary);
                (Regime::Linear, amb)
            }
        }
        _ => (Regime::Linear, None),
    }
}

/// View of a spectrum with degenerate clusters re-mixed.
struct RotatedSpectrum<'a> {
    spectrum: &'a SteklovSpectrum,
    /// mix[k]: (indices, weights) combining original eigenvectors
    mix: Vec<Vec<(usize, f64)>>,
}

impl<'a> RotatedSpectrum<'a> {
    fn field(&self, k: usize) -> Vec<f64> {
        let n = self.spectrum.fields[0].len();
        let mut f = vec![0.0; n];
        for &(j, w) in &self.mix[k] {
            for (fi, vi) in f.iter_mut().zip(&self.spectrum.fields[j]) {
                *fi += w * vi;
            }
        }
        f
    }

    fn outer_coeffs(&self, k: usize) -> Vec<f64> {
        let m = self.spectrum.outer_coeffs[0].len();
        let mut c = vec![0.0; m];
        for &(j, w) in &self.mix[k] {
            for (ci, vi) in c.iter_mut().zip(&self.spectrum.outer_coeffs[j]) {
                *ci += w * vi;
            }
        }
        c
    }

    fn boundary_integral(&self, k: usize) -> f64 {
        self.mix[k].iter().map(|&(j, w)| w * self.spectrum.boundary_integrals[j]).sum()
    }

    fn coeff_c(&self, k: usize) -> Result<f64> {
        // angular mean = <V, psi_0> psi_0 * 2 pi L / (2 pi) = coeff_0 / sqrt(2 pi L)
        let l = self.spectrum.problem.mesh.l;
        let coeffs = self.outer_coeffs(k);
        let mut c = 0.0;
        for (j, ang) in self.spectrum.outer_angular.iter().enumerate() {
            if matches!(ang, AngularFn::Const2d) {
                c += coeffs[j] / (2.0 * PI * l).sqrt();
            }
        }
        Ok(c)
    }

    fn coeff_d(&self, k: usize) -> Result<f64> {
        let l = self.spectrum.problem.mesh.l;
        let coeffs = self.outer_coeffs(k);
        // the degree-1 cos/sin outer coefficients give the circle moments:
        // int V cos(theta) L dtheta = coeff_cos * sqrt(pi L)
        let mut mc = 0.0;
        let mut ms = 0.0;
        for (j, ang) in self.spectrum.outer_angular.iter().enumerate() {
            match ang {
                AngularFn::Cos2d(1) => mc = coeffs[j] * (PI * l).sqrt() / l,
                AngularFn::Sin2d(1) => ms = coeffs[j] * (PI * l).sqrt() / l,
                _ => {}
            }
        }
        Ok(l * l / (2.0 * PI) * 2.0 * (mc * mc + ms * ms))
    }

    fn coeff_d_identity(&self, k: usize) -> Result<f64> {
        let mu = self.spectrum.eigenvalues[k];
        let field = self.field(k);
        let (zr, zi) =
            fourth_identity_rhs_2d_field(self.spectrum, &field, mu, 1, self.spectrum.p)?;
        Ok((zr * zr + zi * zi) / PI)
    }

    fn coeff_b(&self, k: usize) -> Result<(f64, f64)> {
        let problem = &self.spectrum.problem;
        let l = problem.mesh.l;
        let d = if problem.mesh.ambient == Ambient::Planar2d { 2 } else { 3 };
        let field = self.field(k);
        let interior = problem.volume_inner(&field, &field);
        let ball = BallSpec::new(d, l)?;
        let coeffs = self.outer_coeffs(k);
        let mut tail = 0.0;
        let mut last = 0.0;
        let mut max_order = 0;
        for (j, ang) in self.spectrum.outer_angular.iter().enumerate() {
            let n = ang.degree();
            let min_n = if d == 2 { 2 } else { 1 };
            if n < min_n {
                continue;
            }
            let contrib = coeffs[j].powi(2) * q_norm(ball, n, 0.0)?;
            tail += contrib;
            if n > max_order {
                max_order = n;
                last = contrib;
            } else if n == max_order {
                last += contrib;
            }
        }
        Ok((interior + tail, last))
    }
}

fn rotate_degenerate_clusters<'a>(
    spectrum: &'a SteklovSpectrum,
    d: u32,
) -> Result<RotatedSpectrum<'a>> {
    let k_max = spectrum.k_max();
    let mut mix: Vec<Vec<(usize, f64)>> = (0..k_max).map(|k| vec![(k, 1.0)]).collect();
    let scale = spectrum.eigenvalues.last().copied().unwrap_or(1.0).abs().max(1.0);
    let mut k = 0;
    while k < k_max {
        let mut j = k + 1;
        while j < k_max && (spectrum.eigenvalues[j] - spectrum.eigenvalues[k]).abs() < 1e-8 * scale {
            j += 1;
        }
        if j - k >= 2 {
            // rank-one a-form: s_i = int v_i (3D) or the angular mean (2D);
            // rotate so a single member carries the whole form
            let members: Vec<usize> = (k..j).collect();
            let mut s: Vec<f64> = Vec::with_capacity(members.len());
            for &i in &members {
                let v = if d == 2 {
                    let l = spectrum.problem.mesh.l;
                    let mut c = 0.0;
                    for (jj, ang) in spectrum.outer_angular.iter().enumerate() {
                        if matches!(ang, AngularFn::Const2d) {
                            c += spectrum.outer_coeffs[i][jj] / (2.0 * PI * l).sqrt();
                        }
                    }
                    c
                } else {
                    spectrum.boundary_integrals[i]
                };
                s.push(v);
            }
            let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                // first member: s-weighted combination; the rest orthogonal
                // (Householder complement of the unit s vector)
                let u: Vec<f64> = s.iter().map(|x| x / norm).collect();
                let m = members.len();
                // orthonormal basis with first row u (Gram-Schmidt on e_i)
                let mut basis: Vec<Vec<f64>> = vec![u.clone()];
                for e in 0..m {
                    if basis.len() == m {
                        break;
                    }
                    let mut v = vec![0.0; m];
                    v[e] = 1.0;
                    for b in &basis {
                        let dot: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                        for (vi, bi) in v.iter_mut().zip(b) {
                            *vi -= dot * bi;
                        }
                    }
                    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if nv > 1e-9 {
                        for vi in v.iter_mut() {
                            *vi /= nv;
                        }
                        basis.push(v);
                    }
                }
                for (row, orig_k) in basis.iter().zip(k..j) {
                    mix[orig_k] = members.iter().copied().zip(row.iter().copied()).collect();
                }
            }
        }
        k = j;
    }
    Ok(RotatedSpectrum { spectrum, mix })
}

// ---------------------------------------------------------------------------
// Fourth identity (2D, degree n, m = +1)
// ---------------------------------------------------------------------------

/// RHS of the fourth identity for 2D degree-n harmonics:
///   (1/2) int_dOmega v (mu_k Vhat_{n,+} - d_n Vhat_{n,+})
/// returned as (Re, Im). Vhat is the interior-ball Steklov eigenfunction
/// e^{i n theta} g(r) / sqrt(2 pi L) with g the i_{n,2} radial profile.
fn fourth_identity_rhs_2d(
    spectrum: &SteklovSpectrum,
    k: usize,
    mu_k: f64,
    n: usize,
    p: f64,
) -> Result<(f64, f64)> {
    fourth_identity_rhs_2d_field(spectrum, &spectrum.fields[k], mu_k, n, p)
}

fn fourth_identity_rhs_2d_field(
    spectrum: &SteklovSpectrum,
    field: &[f64],
    mu_k: f64,
    n: usize,
    p: f64,
) -> Result<(f64, f64)> {
    let mesh = &spectrum.problem.mesh;
    let l = mesh.l;
    let alpha = p.sqrt();
    let norm = 1.0 / (2.0 * PI * l).sqrt();
    // radial profile g(r) = i_{n,2}(alpha r)/i_{n,2}(alpha L), or (r/L)^n at p=0
    let radial = |r: f64| -> Result<(f64, f64)> {
        if p == 0.0 {
            let g = (r / l).powi(n as i32);
            let gp = n as f64 * r.powi(n as i32 - 1) / l.powi(n as i32);
            Ok((g, gp))
        } else {
            let den = i_nd_scaled(n as i64, 2, alpha * l)?;
            let num = i_nd_scaled(n as i64, 2, alpha * r)?;
            let g = num / den * (alpha * (r - l)).exp();
            // i'_{n,d}(z) = i_{n-1,d}(z) - (n+d-2)/z i_{n,d}(z)
            let ratio_down = i_nd_ratio_down(n as i64, 2, alpha * r)?;
            let gp = alpha * g * (ratio_down - n as f64 / (alpha * r));
            Ok((g, gp))
        }
    };
    let mut zr = 0.0;
    let mut zi = 0.0;
    let walk = mesh.boundary_arclength(BoundaryTag::Inner)?;
    let order_nodes = &walk.nodes;
    // traverse the walk edges with 2-point Gauss; tangent along the CCW walk,
    // domain-side normal = (t_y, -t_x); the Steklov normal derivative points
    // the other way (out of the unbounded domain, i.e. into the obstacle)
    let node_value: Vec<f64> = field.to_vec();
    let m_nodes = order_nodes.len();
    let edges = if walk.closed { m_nodes } else { m_nodes.saturating_sub(1) };
    for e in 0..edges {
        let a = order_nodes[e];
        let b = order_nodes[(e + 1) % m_nodes];
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        if len == 0.0 {
            continue;
        }
        let tan = [(pb[0] - pa[0]) / len, (pb[1] - pa[1]) / len];
        let n_dom = [tan[1], -tan[0]];
        for (t, w) in [(0.211324865405187, 0.5), (0.788675134594813, 0.5)] {
            let x = pa[0] + t * (pb[0] - pa[0]);
            let y = pa[1] + t * (pb[1] - pa[1]);
            let v = node_value[a] * (1.0 - t) + node_value[b] * t;
            let r = x.hypot(y);
            let theta = y.atan2(x);
            let (g, gp) = radial(r)?;
            let (cn, sn) = ((n as f64 * theta).cos(), (n as f64 * theta).sin());
            // Vhat = norm g(r) e^{in theta}
            let vr = norm * g * cn;
            let vi = norm * g * sn;
            // grad Vhat = norm e^{in theta} (g' rhat + i n g / r thetahat)
            let rhat = [x / r, y / r];
            let thhat = [-y / r, x / r];
            let gr_re = [
                norm * (gp * cn * rhat[0] - n as f64 * g / r * sn * thhat[0]),
                norm * (gp * cn * rhat[1] - n as f64 * g / r * sn * thhat[1]),
            ];
            let gr_im = [
                norm * (gp * sn * rhat[0] + n as f64 * g / r * cn * thhat[0]),
                norm * (gp * sn * rhat[1] + n as f64 * g / r * cn * thhat[1]),
            ];
            // Steklov-convention normal: into the obstacle = -n_dom
            let dn_re = -(n_dom[0] * gr_re[0] + n_dom[1] * gr_re[1]);
            let dn_im = -(n_dom[0] * gr_im[0] + n_dom[1] * gr_im[1]);
            zr += w * len * v * (mu_k * vr - dn_re);
            zi += w * len * v * (mu_k * vi - dn_im);
        }
    }
    // the identity gives int_{dB_L} psi_n V = Z / (mu_n + mu_hat_n) with
    // psi_n = e^{in theta}/sqrt(2 pi L); convert to the circle moment
    // M = L int V e^{in theta} dtheta = sqrt(2 pi L) int_{dB_L} psi_n V
    let ball = BallSpec::new(2, l)?;
    let mu_sum = mu_exterior(ball, n, p)? + mu_interior(ball, n, p)?;
    let factor = (2.0 * PI * l).sqrt() / mu_sum;
    Ok((zr * factor, zi * factor))
}

// ---------------------------------------------------------------------------
// p sweep with branch tracking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: f64,
    /// tracked eigenvalues, aligned with the p = 0 labels
    pub mu: Vec<f64>,
    /// minimal matched overlap against the previous sweep point
    pub min_overlap: f64,
}

pub struct SweepResult {
    /// rows ordered by ascending p, excluding p = 0
    pub rows: Vec<SweepRow>,
    /// the p = 0 reference spectrum
    pub spectrum0: SteklovSpectrum,
    /// true when any tracking overlap dropped below 0.9
    pub ambiguous_tracking: bool,
}

/// Solve the spectrum on a grid of rates and track eigenvalue branches by
/// boundary-trace overlap, so the per-label curves follow analytic branches
/// through near-crossings. The p = 0 endpoint anchors the labels.
pub fn p_sweep(
    problem: &std::sync::Arc<FemProblem>,
    p_grid: &[f64],
    n_max: usize,
    k_max: usize,
) -> Result<SweepResult> {
    if p_grid.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::domain("p grid must be strictly positive (p = 0 is solved separately)"));
    }
    let mut grid: Vec<f64> = p_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // track a few extra modes so that branches crossing out of the window do
    // not corrupt the labels of interest
    let k_track = (k_max + 3).min(problem.gamma_nodes().len());
    let spectrum0 = problem.solve(0.0, n_max, k_track)?;
    let spectra: Vec<SteklovSpectrum> = grid
        .par_iter()
        .map(|&p| problem.solve(p, n_max, k_track))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(grid.len());
    let mut prev: &SteklovSpectrum = &spectrum0;
    // labels[j] = index into prev's modes carrying label j
    let mut labels: Vec<usize> = (0..k_track).collect();
    let mut ambiguous = false;
    for sp in &spectra {
        // overlap matrix between prev (tracked) and current modes
        let mut min_overlap = 1.0_f64;
        let mut new_labels = vec![usize::MAX; k_track];
        let mut taken = vec![false; k_track];
        for (label, &prev_idx) in labels.iter().enumerate() {
            let mut best = (0.0_f64, usize::MAX);
            for cand in 0..k_track {
                if taken[cand] {
                    continue;
                }
                let ov = problem.b_inner(&prev.fields[prev_idx], &sp.fields[cand]).abs();
                if ov > best.0 {
                    best = (ov, cand);
                }
            }
            if best.1 == usize::MAX {
                return Err(Error::Solver("branch tracking ran out of candidates".into()));
            }
            taken[best.1] = true;
            new_labels[label] = best.1;
            min_overlap = min_overlap.min(best.0);
        }
        if min_overlap < 0.9 {
            ambiguous = true;
        }
        let mu = new_labels.iter().take(k_max).map(|&i| sp.eigenvalues[i]).collect();
        rows.push(SweepRow { p: sp.p, mu, min_overlap });
        labels = new_labels;
        prev = sp;
    }
    Ok(SweepResult { rows, spectrum0, ambiguous_tracking: ambiguous })
}

/// Least-squares fit of mu_k(p) - mu_k(0) against the law's p-shape over the
/// sweep rows; returns the recovered coefficient.
pub fn fit_law_coefficient(law: &PredictedLaw, rows: &[SweepRow], k: usize, mu0: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for row in rows {
        let shape = match law.regime {
            Regime::Log2d => -1.0 / row.p.sqrt().ln(),
            Regime::PLogP2d | Regime::PLogP4d => -row.p * row.p.sqrt().ln(),
            Regime::Sqrt3d => row.p.sqrt(),
            Regime::Linear => row.p,
        };
        let delta = row.mu[k] - mu0;
        num += delta * shape;
        den += shape * shape;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// identities between spectra
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub p: f64,
    /// per-k residual of mu_k int v_k = p int V_k + mu_0^{(p,L)} int_{dB_L} V_k
    pub identity1: Vec<f64>,
    /// per-k residual of the Rayleigh representation of mu_k
    pub rayleigh: Vec<f64>,
    /// per-k residual of the third identity between p and 0
    pub identity3: Vec<f64>,
    /// per-k residual of the fourth identity (2D), or empty (axisym)
    pub identity4: Vec<f64>,
    /// per-k residual of dp mu = |V|^2 (finite difference against quadrature)
    pub dmu: Vec<f64>,
}

/// Residuals of the exact relations evaluated on FEM spectra; each residual
/// is normalized by the dominant term of its identity.
pub fn check_identities(
    problem: &std::sync::Arc<FemProblem>,
    p: f64,
    n_max: usize,
    k_max: usize,
) -> Result<IdentityReport> {
    if !(p > 0.0) {
        return Err(Error::domain("identity check requires p > 0"));
    }
    let sp = problem.solve(p, n_max, k_max)?;
    let sp0 = problem.solve(0.0, n_max, k_max)?;
    let h = 1e-4 * p;
    let sp_plus = problem.solve(p + h, n_max, k_max)?;
    let sp_minus = problem.solve(p - h, n_max, k_max)?;

    let mesh = &problem.mesh;
    let d = if mesh.ambient == Ambient::Planar2d { 2 } else { 3 };
    let l = mesh.l;
    let ball = BallSpec::new(d, l)?;
    let surface_bl = if d == 2 { 2.0 * PI * l } else { 4.0 * PI * l * l };
    let ones = vec![1.0; mesh.nodes.len()];

    let mut identity1 = Vec::with_capacity(k_max);
    let mut rayleigh = Vec::with_capacity(k_max);
    let mut identity3 = Vec::with_capacity(k_max);
    let mut identity4 = Vec::new();
    let mut dmu = Vec::with_capacity(k_max);

    let mu0_pl = mu_exterior(ball, 0, p)?;
    for k in 0..k_max {
        let mu = sp.eigenvalues[k];
        // identity 1
        let lhs = mu * sp.boundary_integrals[k];
        let vol = problem.volume_inner(&ones, &sp.fields[k]);
        // int_{dB_L} V = <V, psi_0> sqrt(|dB_L|)
        let int_bl = sp.outer_coeffs[k][0] * surface_bl.sqrt();
        let rhs = p * vol + mu0_pl * int_bl;
        let scale = lhs.abs().max(rhs.abs()).max(1e-12);
        identity1.push((lhs - rhs).abs() / scale);

        // Rayleigh representation
        let dirichlet = problem.stiffness_inner(&sp.fields[k], &sp.fields[k])
            + p * problem.volume_inner(&sp.fields[k], &sp.fields[k]);
        let mut modal = 0.0;
        for (j, &mu_n) in sp.outer_mu.iter().enumerate() {
            modal += mu_n * sp.outer_coeffs[k][j].powi(2);
        }
        rayleigh.push(((dirichlet + modal) - mu).abs() / mu.abs().max(1e-12));

        // third identity against p' = 0
        let tr = problem.b_inner(&sp.fields[k], &sp0.fields[k]);
        let lhs3 = (mu - sp0.eigenvalues[k]) * tr;
        let volx = problem.volume_inner(&sp.fields[k], &sp0.fields[k]);
        let mut w = 0.0;
        for (j, ang) in sp.outer_angular.iter().enumerate() {
            let n = ang.degree();
            let dmu_n = mu_exterior(ball, n, p)? - mu_exterior(ball, n, 0.0)?;
            w += sp0.outer_coeffs[k][j] * sp.outer_coeffs[k][j] * dmu_n;
        }
        let rhs3 = p * volx + w;
        let scale3 = lhs3.abs().max(rhs3.abs()).max(1e-12);
        identity3.push((lhs3 - rhs3).abs() / scale3);

        // derivative identity: centered FD of mu vs the quadrature + tail
        let fd = (sp_plus.eigenvalues[k] - sp_minus.eigenvalues[k]) / (2.0 * h);
        let mut norm2 = problem.volume_inner(&sp.fields[k], &sp.fields[k]);
        for (j, ang) in sp.outer_angular.iter().enumerate() {
            norm2 += sp.outer_coeffs[k][j].powi(2) * q_norm(ball, ang.degree(), p)?;
        }
        dmu.push((fd - norm2).abs() / norm2.abs().max(1e-12));

        // fourth identity (2D): moment from outer coefficients vs boundary form
        if d == 2 {
            let (zr, zi) = fourth_identity_rhs_2d(&sp, k, mu, 1, p)?;
            // moment L int V e^{i theta} dtheta from outer cos/sin coefficients
            let mut mc = 0.0;
            let mut ms = 0.0;
            for (j, ang) in sp.outer_angular.iter().enumerate() {
                match ang {
                    AngularFn::Cos2d(1) => mc = sp.outer_coeffs[k][j] * (PI * l).sqrt(),
                    AngularFn::Sin2d(1) => ms = sp.outer_coeffs[k][j] * (PI * l).sqrt(),
                    _ => {}
                }
            }
            let scale4 = (mc * mc + ms * ms).sqrt().max((zr * zr + zi * zi).sqrt()).max(1e-10);
            let resid = ((mc - zr).powi(2) + (ms - zi).powi(2)).sqrt() / scale4;
            identity4.push(resid);
        }
    }
    Ok(IdentityReport { p, identity1, rayleigh, identity3, identity4, dmu })
}

// ---------------------------------------------------------------------------
// decay envelope
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    pub pass: bool,
    /// minimal (bound - |V|)/bound over the ray
    pub margin: f64,
    /// fitted prefactor (2D fits the non-universal constant at the first point)
    pub prefactor: f64,
}

/// Check |V_k(x)| against the first-passage envelope along a ray of radii.
pub fn decay_envelope_check(
    spectrum: &SteklovSpectrum,
    k: usize,
    ray: &[[f64; 2]],
) -> Result<EnvelopeReport> {
    if ray.is_empty() {
        return Err(Error::domain("empty ray"));
    }
    let mesh = &spectrum.problem.mesh;
    let d = if mesh.ambient == Ambient::Planar2d { 2 } else { 3 };
    let ball = BallSpec::new(d, mesh.l)?;
    let values = extend_exterior(spectrum, k, ray)?;
    let sup_v = spectrum.traces[k].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let radii: Vec<f64> = ray.iter().map(|p| p[0].hypot(p[1])).collect();
    // 2D constant is non-universal: calibrate on the first ray point
    let prefactor = if d == 2 {
        let h0 = envelope_h_star(ball, spectrum.p, radii[0])?;
        (values[0].abs() / h0).max(sup_v)
    } else {
        sup_v
    };
    let mut margin = f64::INFINITY;
    let mut pass = true;
    for (i, &r) in radii.iter().enumerate() {
        let bound = prefactor * envelope_h_star(ball, spectrum.p, r)?;
        let m = (bound - values[i].abs()) / bound.abs().max(1e-300);
        margin = margin.min(m);
        if values[i].abs() > bound * (1.0 + 1e-6) {
            pass = false;
        }
    }
    Ok(EnvelopeReport { pass, margin, prefactor })
}
