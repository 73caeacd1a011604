//! Exterior extension of solved eigenfunctions beyond the truncation radius
//! through the truncated modal expansion on the outer circle/sphere.

use crate::ball::{radial_profile, BallSpec};
use crate::error::{Error, Result};
use crate::fem::assemble::FemMode;
use crate::fem::solve::SteklovSpectrum;
use crate::geometry::Ambient;

/// Evaluate V_k at points outside the truncation ball. Points are (x, y) in
/// 2D or (r, z) in the axisymmetric half-plane.
pub fn extend_exterior(spectrum: &SteklovSpectrum, k: usize, points: &[[f64; 2]]) -> Result<Vec<f64>> {
    if k >= spectrum.k_max() {
        return Err(Error::domain(format!("eigenfunction index {k} out of range")));
    }
    let mesh = &spectrum.problem.mesh;
    let l = mesh.l;
    let d = if mesh.ambient == Ambient::Planar2d { 2 } else { 3 };
    let ball = BallSpec::new(d, l)?;
    let coeffs = &spectrum.outer_coeffs[k];
    let mut out = Vec::with_capacity(points.len());
    for pt in points {
        let radius = pt[0].hypot(pt[1]);
        if radius < l * (1.0 - 1e-9) {
            return Err(Error::domain(format!(
                "extension point ({}, {}) lies inside the truncation ball", pt[0], pt[1]
            )));
        }
        let radius = radius.max(l);
        let arg = match spectrum.problem.mode {
            FemMode::Planar => pt[1].atan2(pt[0]),
            FemMode::Axisym { .. } => (pt[1] / radius).clamp(-1.0, 1.0),
        };
        let mut v = 0.0;
        for (j, ang) in spectrum.outer_angular.iter().enumerate() {
            if coeffs[j] == 0.0 {
                continue;
            }
            let g = radial_profile(ball, ang.degree(), spectrum.p, radius)?;
            v += coeffs[j] * ang.eval(l, arg) * g;
        }
        out.push(v);
    }
    Ok(out)
}

/// Max relative mismatch between the interior field and its modal expansion
/// at the outer nodes (a consistency check of the truncation order).
pub fn outer_mismatch(spectrum: &SteklovSpectrum, k: usize) -> Result<f64> {
    let mesh = &spectrum.problem.mesh;
    let walk = mesh.boundary_arclength(crate::geometry::BoundaryTag::Outer)?;
    let pts: Vec<[f64; 2]> = walk.nodes.iter().map(|&n| mesh.nodes[n]).collect();
    let modal = extend_exterior(spectrum, k, &pts)?;
    let mut num = 0.0_f64;
    let mut den = 0.0_f64;
    for (i, &n) in walk.nodes.iter().enumerate() {
        num = num.max((spectrum.fields[k][n] - modal[i]).abs());
        den = den.max(spectrum.fields[k][n].abs());
    }
    Ok(if den > 0.0 { num / den } else { num })
}
