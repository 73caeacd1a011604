//! Validation of the FEM pipeline against the exact ball spectrum,
//! reproducing the disk/sphere protocol with per-mode eigenvalue errors and
//! eigenfunction RMSEs (degenerate pairs compared as subspaces).

use crate::ball::{mu_exterior, BallSpec};
use crate::error::Result;
use crate::fem::assemble::FemMode;
use crate::fem::dense::cholesky_lower;
use crate::fem::solve::{FemProblem, SteklovSpectrum};
use crate::geometry::{build_mesh, DomainSpec, Obstacle};
use faer::Mat;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct BallModeReport {
    pub k: usize,
    pub degree: usize,
    pub mu_fem: f64,
    pub mu_exact: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// L2(dOmega) distance between the computed trace and its projection on
    /// the exact eigenspace of the same degree.
    pub rmse: f64,
}

pub struct BallValidationReport {
    pub p: f64,
    pub h_max: f64,
    pub n_max: usize,
    pub modes: Vec<BallModeReport>,
    pub spectrum: SteklovSpectrum,
}

/// Solve the exterior of a ball/disk of radius `r` (optionally offset) with
/// the FEM and compare against the closed forms.
#[allow(clippy::too_many_arguments)]
pub fn validate_against_ball(
    d: u32,
    r: f64,
    center_offset: [f64; 2],
    l: f64,
    h_max: f64,
    n_max: usize,
    p: f64,
    k_count: usize,
) -> Result<BallValidationReport> {
    let (spec, mode) = match d {
        2 => (
            DomainSpec::planar_offset(Obstacle::Disk { radius: r }, l, center_offset)?,
            FemMode::Planar,
        ),
        3 => (
            DomainSpec::axisym(Obstacle::Spheroid { r_eq: r, z_pole: r }, l, center_offset[1])?,
            FemMode::Axisym { m: 0 },
        ),
        _ => {
            return Err(crate::error::Error::domain(
                "ball validation supports d = 2 (disk) and d = 3 (axisym sphere)",
            ))
        }
    };
    let mesh = build_mesh(&spec, h_max)?;
    let problem = FemProblem::new(mesh, mode)?;
    let spectrum = problem.solve(p, n_max, k_count)?;
    let ball = BallSpec::new(d, r)?;

    let modes = (0..k_count)
        .map(|k| {
            let degree = match d {
                2 => k.div_ceil(2),
                _ => k,
            };
            let mu_exact = mu_exterior(ball, degree, p)?;
            let mu_fem = spectrum.eigenvalues[k];
            let abs_err = (mu_fem - mu_exact).abs();
            let rel_err = if mu_exact.abs() > 0.0 { abs_err / mu_exact.abs() } else { abs_err };
            let rmse = trace_rmse(&spectrum, k, degree, d, r, center_offset)?;
            Ok(BallModeReport { k, degree, mu_fem, mu_exact, abs_err, rel_err, rmse })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BallValidationReport { p, h_max, n_max, modes, spectrum })
}

/// Distance (in the discrete B-norm) from the computed trace to the exact
/// degenerate eigenspace of the given angular degree.
fn trace_rmse(
    spectrum: &SteklovSpectrum,
    k: usize,
    degree: usize,
    d: u32,
    r: f64,
    offset: [f64; 2],
) -> Result<f64> {
    let problem = &spectrum.problem;
    let n_nodes = problem.mesh.nodes.len();
    // exact eigenspace basis sampled at the mesh nodes (full-length fields,
    // nonzero only on the Steklov boundary for B-products)
    let mut basis: Vec<Vec<f64>> = Vec::new();
    match d {
        2 => {
            let norm0 = 1.0 / (2.0 * PI * r).sqrt();
            let norm = 1.0 / (PI * r).sqrt();
            if degree == 0 {
                let mut b = vec![0.0; n_nodes];
                for &n in &spectrum.inner_nodes {
                    b[n] = norm0;
                }
                basis.push(b);
            } else {
                let mut bc = vec![0.0; n_nodes];
                let mut bs = vec![0.0; n_nodes];
                for &n in &spectrum.inner_nodes {
                    let p = problem.mesh.nodes[n];
                    let theta = (p[1] - offset[1]).atan2(p[0] - offset[0]);
                    bc[n] = norm * (degree as f64 * theta).cos();
                    bs[n] = norm * (degree as f64 * theta).sin();
                }
                basis.push(bc);
                basis.push(bs);
            }
        }
        _ => {
            // axisymmetric sphere modes: normalized Legendre in cos(theta)
            let norm = ((2.0 * degree as f64 + 1.0) / (4.0 * PI * r * r)).sqrt();
            let mut b = vec![0.0; n_nodes];
            for &n in &spectrum.inner_nodes {
                let p = problem.mesh.nodes[n];
                let ct = ((p[1] - offset[1]) / r).clamp(-1.0, 1.0);
                b[n] = norm * crate::special::legendre_p(degree, ct)?;
            }
            basis.push(b);
        }
    }
    // B-orthogonal projection: coefficients solve (G)c = g with
    // G_ij = <b_i, b_j>_B, g_i = <b_i, v>_B
    let m = basis.len();
    let mut gram = Mat::<f64>::zeros(m, m);
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = problem.b_inner(&basis[i], &basis[j]);
        }
        rhs[i] = problem.b_inner(&basis[i], &spectrum.fields[k]);
    }
    let lc = cholesky_lower(&gram)?;
    let mut c = Mat::<f64>::from_fn(m, 1, |i, _| rhs[i]);
    crate::fem::dense::solve_lower_in_place(&lc, &mut c);
    crate::fem::dense::solve_lower_transpose_in_place(&lc, &mut c);
    // residual norm^2 = <v,v> - 2 c.g + c G c = <v,v> - c.g (normal equations)
    let vv = problem.b_inner(&spectrum.fields[k], &spectrum.fields[k]);
    let mut cg = 0.0;
    for i in 0..m {
        cg += c[(i, 0)] * rhs[i];
    }
    Ok((vv - cg).max(0.0).sqrt())
}
