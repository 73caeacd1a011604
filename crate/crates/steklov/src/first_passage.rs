//! First-passage-time statistics for diffusion in 3D exterior domains from
//! the small-p Steklov data: the moment-generating function of the
//! boundary-local-time crossing time, the long-time densities U(l, t) and
//! H_q(t), the survival probability S_q(t) with its t -> infinity limit, the
//! sphere closed forms, and a reflected-Brownian-motion Monte Carlo oracle.

use crate::asymptotics::SmallPReport;
use crate::error::{Error, Result};
use crate::fem::solve::SteklovSpectrum;
use crate::geometry::Ambient;
use crate::special::erfcx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Per-mode Steklov data entering the spectral FPT formulas (p = 0 values).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FptMode {
    pub mu0: f64,
    pub a: f64,
    /// v_k at the starting point
    pub v_x0: f64,
    /// int_dOmega v_k
    pub boundary_integral: f64,
}

/// Inputs for the spectral evaluators.
#[derive(Clone, Debug, Serialize)]
pub struct FptInputs {
    pub modes: Vec<FptMode>,
    /// diffusion coefficient (length^2 / time)
    pub diffusivity: f64,
    /// reactivity (1 / length)
    pub q: f64,
    /// distance between the requested start point and the boundary node it
    /// was snapped to
    pub x0_snap_distance: f64,
    /// contribution ratio of the last retained mode in the S(infinity) sum
    pub truncation_ratio: f64,
}

const A_TOL: f64 = 1e-9;

impl FptInputs {
    /// Exact inputs for the exterior of a sphere: only the principal mode has
    /// a nonzero boundary integral (a_0 = 1, mu_0 = 1/R).
    pub fn sphere(radius: f64, diffusivity: f64, q: f64) -> Result<FptInputs> {
        check_params(diffusivity, q)?;
        if !(radius > 0.0) {
            return Err(Error::domain("sphere radius must be positive"));
        }
        let surf = 4.0 * PI * radius * radius;
        Ok(FptInputs {
            modes: vec![FptMode {
                mu0: 1.0 / radius,
                a: 1.0,
                v_x0: 1.0 / surf.sqrt(),
                boundary_integral: surf.sqrt(),
            }],
            diffusivity,
            q,
            x0_snap_distance: 0.0,
            truncation_ratio: 0.0,
        })
    }

    /// Build inputs from a solved p = 0 axisymmetric spectrum and its small-p
    /// reports. `x0` is snapped to the nearest Steklov boundary node; modes
    /// are truncated at mu_k <= 3 (mu_0 + q) by default.
    pub fn from_spectrum(
        spectrum: &SteklovSpectrum,
        reports: &[SmallPReport],
        x0: [f64; 2],
        diffusivity: f64,
        q: f64,
    ) -> Result<FptInputs> {
        check_params(diffusivity, q)?;
        if spectrum.problem.mesh.ambient != Ambient::Axisym3d {
            return Err(Error::domain(
                "first-passage expansions are derived for 3D exterior domains; 2D inputs are not supported",
            ));
        }
        if spectrum.p != 0.0 {
            return Err(Error::domain("FPT inputs require the p = 0 spectrum"));
        }
        // snap to nearest Steklov boundary node
        let mesh = &spectrum.problem.mesh;
        let (mut best, mut best_d) = (usize::MAX, f64::INFINITY);
        for (g, &n) in spectrum.inner_nodes.iter().enumerate() {
            let p = mesh.nodes[n];
            let dist = (p[0] - x0[0]).hypot(p[1] - x0[1]);
            if dist < best_d {
                best = g;
                best_d = dist;
            }
        }
        if best_d > 2.0 * mesh.h_max {
            return Err(Error::domain(format!(
                "start point ({}, {}) is {best_d:.4} away from the boundary; starts must lie on dOmega",
                x0[0], x0[1]
            )));
        }
        let mu0 = spectrum.eigenvalues[0];
        let cutoff = 3.0 * (mu0 + q);
        let mut modes = Vec::new();
        for (k, rep) in reports.iter().enumerate() {
            if k >= spectrum.k_max() {
                break;
            }
            if spectrum.eigenvalues[k] > cutoff && k > 0 {
                break;
            }
            modes.push(FptMode {
                mu0: spectrum.eigenvalues[k],
                a: rep.a,
                v_x0: spectrum.traces[k][best],
                boundary_integral: spectrum.boundary_integrals[k],
            });
        }
        // truncation diagnostic: last contributing term of the S(inf) sum
        let weight = |m: &FptMode| (m.v_x0 * m.boundary_integral / (m.mu0 + q + 1e-300)).abs();
        let total: f64 = modes.iter().map(&weight).sum();
        let last = modes.last().map(weight).unwrap_or(0.0);
        Ok(FptInputs {
            modes,
            diffusivity,
            q,
            x0_snap_distance: best_d,
            truncation_ratio: if total > 0.0 { last / total } else { 0.0 },
        })
    }

    fn contributing(&self) -> impl Iterator<Item = &FptMode> {
        self.modes.iter().filter(|m| m.a > A_TOL)
    }
}

fn check_params(diffusivity: f64, q: f64) -> Result<()> {
    if !(diffusivity > 0.0) {
        return Err(Error::domain("diffusivity must be positive"));
    }
    if !(q >= 0.0) {
        return Err(Error::domain("reactivity must be nonnegative"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    U,
    Hq,
    Sq,
    Mgf,
}

/// A sampled curve with its truncation diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct FptCurve {
    pub kind: CurveKind,
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    /// largest single-mode contribution ratio of the last retained mode
    pub truncation_ratio: f64,
    /// set when truncation noise produced values outside the allowed range
    pub flagged: bool,
}

/// Moment-generating function of the first-crossing time evaluated from a
/// spectrum solved at the matching rate: sum_k V_k(x0) e^{-mu_k l} int v_k.
///
/// The spectrum must be solved at p_tilde = p / D when D != 1.
pub fn mgf_u_from_spectrum(spectrum: &SteklovSpectrum, x0: [f64; 2], ell: f64) -> Result<f64> {
    if !(ell >= 0.0) {
        return Err(Error::domain("local-time threshold must be nonnegative"));
    }
    let mesh = &spectrum.problem.mesh;
    let (mut best, mut best_d) = (usize::MAX, f64::INFINITY);
    for (g, &n) in spectrum.inner_nodes.iter().enumerate() {
        let p = mesh.nodes[n];
        let dist = (p[0] - x0[0]).hypot(p[1] - x0[1]);
        if dist < best_d {
            best = g;
            best_d = dist;
        }
    }
    let mut total = 0.0;
    let mut last = 0.0;
    for k in 0..spectrum.k_max() {
        let term = spectrum.traces[k][best]
            * (-spectrum.eigenvalues[k] * ell).exp()
            * spectrum.boundary_integrals[k];
        total += term;
        last = term.abs();
    }
    if total != 0.0 && last > 1e-6 * total.abs() {
        // truncation warning is in-band: the caller sees it through the error
        // channel only when the tail is clearly unresolved
        if last > 1e-2 * total.abs() {
            return Err(Error::Truncation(format!(
                "last spectral term is {:.2e} of the sum; increase k_max",
                last / total.abs()
            )));
        }
    }
    Ok(total)
}

/// Exact sphere moment-generating function e^{-l (1/R + sqrt(p/D))}.
pub fn mgf_u_sphere(radius: f64, diffusivity: f64, p: f64, ell: f64) -> f64 {
    (-ell * (1.0 / radius + (p / diffusivity).sqrt())).exp()
}

/// Long-time density of the first-crossing time T_l (3D):
/// U(l, t) ~ sum_k a_k l / sqrt(4 pi D t^3) e^{-mu_k l - a_k^2 l^2/(4 D t)}
///           v_k(x0) int v_k.
pub fn pdf_u_longtime(inputs: &FptInputs, ell: f64, t_grid: &[f64]) -> Result<FptCurve> {
    if !(ell >= 0.0) {
        return Err(Error::domain("local-time threshold must be nonnegative"));
    }
    if inputs.contributing().next().is_none() {
        return Err(Error::domain(
            "no mode has a_k > 0: the long-time law is outside the derived regime",
        ));
    }
    let d = inputs.diffusivity;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut flagged = false;
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::domain("time grid must be positive"));
        }
        let mut u = 0.0;
        for m in inputs.contributing() {
            u += m.a * ell / (4.0 * PI * d * t.powi(3)).sqrt()
                * (-m.mu0 * ell - m.a * m.a * ell * ell / (4.0 * d * t)).exp()
                * m.v_x0
                * m.boundary_integral;
        }
        if u < -1e-12 {
            flagged = true;
        }
        values.push(u);
    }
    Ok(FptCurve {
        kind: CurveKind::U,
        abscissa: t_grid.to_vec(),
        values,
        truncation_ratio: inputs.truncation_ratio,
        flagged,
    })
}

/// Long-time density of the first-reaction time:
/// H_q(t) ~ q D sum_k {1/sqrt(pi D t) - ((mu_k+q)/a_k) erfcx(sqrt(Dt)(mu_k+q)/a_k)}
///          (v_k(x0)/a_k) int v_k.
pub fn pdf_hq_longtime(inputs: &FptInputs, t_grid: &[f64]) -> Result<FptCurve> {
    let d = inputs.diffusivity;
    let q = inputs.q;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut flagged = false;
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::domain("time grid must be positive"));
        }
        let mut h = 0.0;
        if q > 0.0 {
            for m in inputs.contributing() {
                let z = (d * t).sqrt() * (m.mu0 + q) / m.a;
                h += q * d
                    * (1.0 / (PI * d * t).sqrt() - (m.mu0 + q) / m.a * erfcx(z)?)
                    * (m.v_x0 / m.a)
                    * m.boundary_integral;
            }
        }
        if h < -1e-12 {
            flagged = true;
        }
        values.push(h);
    }
    Ok(FptCurve {
        kind: CurveKind::Hq,
        abscissa: t_grid.to_vec(),
        values,
        truncation_ratio: inputs.truncation_ratio,
        flagged,
    })
}

/// Long-time survival probability
/// S_q(t) ~ 1 - q sum_k [1 - erfcx(sqrt(Dt)(mu_k+q)/a_k)] v_k(x0) int v_k/(mu_k+q).
pub fn survival_sq(inputs: &FptInputs, t_grid: &[f64]) -> Result<FptCurve> {
    let d = inputs.diffusivity;
    let q = inputs.q;
    let s_inf = survival_sq_infinity(inputs)?;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut flagged = false;
    let mut prev = f64::INFINITY;
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::domain("time grid must be positive"));
        }
        let mut s = 1.0;
        for m in inputs.contributing() {
            let z = (d * t).sqrt() * (m.mu0 + q) / m.a;
            s -= q * (1.0 - erfcx(z)?) * m.v_x0 * m.boundary_integral / (m.mu0 + q);
        }
        if !(-1e-9..=1.0 + 1e-9).contains(&s) || s > prev + 1e-9 {
            flagged = true;
        }
        prev = s;
        values.push(s);
    }
    let _ = s_inf;
    Ok(FptCurve {
        kind: CurveKind::Sq,
        abscissa: t_grid.to_vec(),
        values,
        truncation_ratio: inputs.truncation_ratio,
        flagged,
    })
}

/// Exact limiting survival probability S_q(inf) = 1 - q sum_k v_k(x0) int v_k/(mu_k+q).
pub fn survival_sq_infinity(inputs: &FptInputs) -> Result<f64> {
    let q = inputs.q;
    let mut s = 1.0;
    // modes with int v_k = 0 contribute nothing; only a_k > 0 modes enter
    for m in inputs.contributing() {
        s -= q * m.v_x0 * m.boundary_integral / (m.mu0 + q);
    }
    if !(-(1e-3)..=1.0 + 1e-3).contains(&s) {
        return Err(Error::Truncation(format!(
            "S(inf) = {s} outside [0, 1]: spectral truncation insufficient"
        )));
    }
    Ok(s.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// sphere closed forms
// ---------------------------------------------------------------------------

pub fn u_sphere(radius: f64, diffusivity: f64, ell: f64, t: f64) -> f64 {
    ell * (-ell / radius - ell * ell / (4.0 * diffusivity * t)).exp()
        / (4.0 * PI * diffusivity * t.powi(3)).sqrt()
}

pub fn hq_sphere(radius: f64, diffusivity: f64, q: f64, t: f64) -> Result<f64> {
    let z = (diffusivity * t).sqrt() * (1.0 / radius + q);
    Ok(q * diffusivity * (1.0 / (PI * diffusivity * t).sqrt() - (1.0 / radius + q) * erfcx(z)?))
}

pub fn sq_sphere(radius: f64, diffusivity: f64, q: f64, t: f64) -> Result<f64> {
    let mu_q = 1.0 / radius + q;
    let z = (diffusivity * t).sqrt() * mu_q;
    Ok(1.0 - q / mu_q * (1.0 - erfcx(z)?))
}

/// CDF of T_l for the sphere: e^{-l/R} erfc(l / sqrt(4 D t)).
pub fn u_sphere_cdf(radius: f64, diffusivity: f64, ell: f64, t: f64) -> Result<f64> {
    let z = ell / (4.0 * diffusivity * t).sqrt();
    // erfc(z) = erfcx(z) e^{-z^2}
    Ok((-ell / radius).exp() * erfcx(z)? * (-z * z).exp())
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle (sphere geometry)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct McParams {
    pub walkers: u64,
    /// base time step near the boundary (in units of R^2/D)
    pub dt: f64,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        McParams { walkers: 100_000, dt: 1e-5, seed: 7 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct McSurvival {
    pub survived: u64,
    pub walkers: u64,
    pub fraction: f64,
    /// binomial standard deviation of `fraction`
    pub sigma: f64,
}

/// Reflected Brownian motion outside the sphere of radius `radius` with
/// exponential killing at reactivity q per unit boundary local time; returns
/// the escape fraction, which estimates S_q(infinity) for boundary starts.
///
/// Skorokhod projection accumulates the local time; far walkers take
/// distance-scaled steps and escape/return is resolved exactly through the
/// radial hitting probability (the return position is uniform by symmetry).
pub fn mc_survival_sphere(
    radius: f64,
    diffusivity: f64,
    q: f64,
    params: McParams,
) -> Result<McSurvival> {
    check_params(diffusivity, q)?;
    let r_far = 8.0 * radius;
    let survived: u64 = (0..params.walkers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha12Rng::seed_from_u64(params.seed ^ (w.wrapping_mul(0x9E3779B97F4A7C15)));
            let ell_hat = if q > 0.0 {
                -(1.0 - rng.random::<f64>()).ln() / q
            } else {
                f64::INFINITY
            };
            let mut ell = 0.0_f64;
            let mut x = [0.0_f64, 0.0, radius];
            loop {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r >= r_far {
                    // exact escape test: return probability radius/r
                    if rng.random::<f64>() < radius / r {
                        // uniform re-entry on the sphere
                        let dir = sample_unit(&mut rng);
                        x = [radius * dir[0], radius * dir[1], radius * dir[2]];
                        continue;
                    }
                    return 1u64;
                }
                // distance-adaptive step
                let gap = (r - radius).max(0.0);
                let base = params.dt * radius * radius / diffusivity;
                let dt_eff = base * (1.0 + (gap / (5.0 * (2.0 * diffusivity * base).sqrt())).powi(2));
                let sigma = (2.0 * diffusivity * dt_eff).sqrt();
                for xi in x.iter_mut() {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    *xi += sigma * n;
                }
                let r_new = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r_new < radius {
                    ell += radius - r_new;
                    let scale = radius / r_new;
                    for xi in x.iter_mut() {
                        *xi *= scale;
                    }
                    if ell >= ell_hat {
                        return 0u64; // reacted
                    }
                }
            }
        })
        .sum();
    let fraction = survived as f64 / params.walkers as f64;
    let sigma = (fraction * (1.0 - fraction) / params.walkers as f64).sqrt();
    Ok(McSurvival { survived, walkers: params.walkers, fraction, sigma })
}

/// First-crossing times of the boundary local time threshold `ell`, capped at
/// `t_max` (None = not crossed by t_max). Far-field excursion returns within
/// t_max are negligible for t_max << (r_far/R)^2 R^2/D.
pub fn mc_crossing_times_sphere(
    radius: f64,
    diffusivity: f64,
    ell: f64,
    t_max: f64,
    params: McParams,
) -> Result<Vec<Option<f64>>> {
    check_params(diffusivity, 0.0)?;
    let r_far = 16.0 * radius;
    Ok((0..params.walkers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha12Rng::seed_from_u64(params.seed ^ (w.wrapping_mul(0x9E3779B97F4A7C15)));
            let mut acc = 0.0_f64;
            let mut t = 0.0_f64;
            let mut x = [0.0_f64, 0.0, radius];
            while t < t_max {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r >= r_far {
                    return None; // cannot return within t_max
                }
                let gap = (r - radius).max(0.0);
                let base = params.dt * radius * radius / diffusivity;
                let dt_eff = base * (1.0 + (gap / (5.0 * (2.0 * diffusivity * base).sqrt())).powi(2));
                let sigma = (2.0 * diffusivity * dt_eff).sqrt();
                for xi in x.iter_mut() {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    *xi += sigma * n;
                }
                t += dt_eff;
                let r_new = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r_new < radius {
                    acc += radius - r_new;
                    let scale = radius / r_new;
                    for xi in x.iter_mut() {
                        *xi *= scale;
                    }
                    if acc >= ell {
                        return Some(t);
                    }
                }
            }
            None
        })
        .collect())
}

fn sample_unit(rng: &mut ChaCha12Rng) -> [f64; 3] {
    loop {
        let v = [
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        ];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-12 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
