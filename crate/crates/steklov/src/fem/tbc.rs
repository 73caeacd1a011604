//! Transparent boundary condition on the truncation circle/sphere.
//!
//! The exterior beyond B_L is replaced by the exact Dirichlet-to-Neumann
//! operator of the ball, truncated to the first J angular modes and sampled
//! at the OUTER mesh nodes: T = Psi diag(mu) Psi^T diag(ds), then
//! symmetrized. mu are the exact exterior ball eigenvalues, so T is positive
//! semidefinite up to quadrature error.

use crate::ball::{mu_exterior, BallSpec};
use crate::error::{Error, Result};
use crate::fem::assemble::FemMode;
use crate::geometry::{Ambient, BoundaryTag, Mesh};
use crate::special::legendre::assoc_legendre_all;
use faer::Mat;
use std::f64::consts::PI;

/// Angular factor of one TBC basis column, evaluable at arbitrary directions.
#[derive(Clone, Copy, Debug)]
pub enum AngularFn {
    /// 1/sqrt(2 pi L)
    Const2d,
    /// cos(n theta)/sqrt(pi L)
    Cos2d(usize),
    /// sin(n theta)/sqrt(pi L)
    Sin2d(usize),
    /// normalized associated Legendre sqrt((2n+1)(n-m)!/((n+m)! 4 pi L^2)) P_n^m(cos theta)
    Axi { n: usize, m: u32 },
}

impl AngularFn {
    pub fn degree(&self) -> usize {
        match self {
            AngularFn::Const2d => 0,
            AngularFn::Cos2d(n) | AngularFn::Sin2d(n) => *n,
            AngularFn::Axi { n, .. } => *n,
        }
    }

    /// Evaluate at a direction given by the planar angle theta = atan2(y, x)
    /// (2D) or the colatitude cosine z/|y| (axisym), with boundary radius l.
    pub fn eval(&self, l: f64, theta_or_cos: f64) -> f64 {
        match self {
            AngularFn::Const2d => 1.0 / (2.0 * PI * l).sqrt(),
            AngularFn::Cos2d(n) => (*n as f64 * theta_or_cos).cos() / (PI * l).sqrt(),
            AngularFn::Sin2d(n) => (*n as f64 * theta_or_cos).sin() / (PI * l).sqrt(),
            AngularFn::Axi { n, m } => {
                let m = *m as usize;
                let x = theta_or_cos.clamp(-1.0, 1.0);
                let pv = assoc_legendre_all(*n, m, x).expect("|cos| <= 1");
                let mut log_ratio = 0.0;
                for q in (*n - m + 1)..=(*n + m) {
                    log_ratio -= (q as f64).ln();
                }
                ((2.0 * *n as f64 + 1.0) / (4.0 * PI * l * l)).sqrt()
                    * (0.5 * log_ratio).exp()
                    * pv[*n - m]
            }
        }
    }
}

pub struct TbcData {
    /// OUTER node ids in walk order.
    pub outer_nodes: Vec<usize>,
    /// Surface weight per outer node (trapezoid along the walk; times 2 pi r
    /// for axisym).
    pub ds: Vec<f64>,
    /// Angular degree n_j of each basis column.
    pub orders: Vec<usize>,
    /// Angular factor of each basis column.
    pub angular: Vec<AngularFn>,
    /// Ball DtN eigenvalue mu_{n_j}^{(p,L)} per column.
    pub mu: Vec<f64>,
    /// Basis values Psi[i][j] = psi_j(x_i) (outer node i, column j).
    pub psi: Mat<f64>,
    /// Symmetrized TBC block on the outer nodes.
    pub t: Mat<f64>,
    /// max |T - T^T| before symmetrization, relative to max |T|.
    pub asymmetry: f64,
}

pub fn tbc_matrix(mesh: &Mesh, mode: FemMode, p: f64, n_max: usize) -> Result<TbcData> {
    if n_max < 1 {
        return Err(Error::Truncation("n_max must be at least 1".into()));
    }
    let walk = mesh.boundary_arclength(BoundaryTag::Outer)?;
    let outer_nodes = walk.nodes.clone();
    let n_pts = outer_nodes.len();
    let l = mesh.l;

    // trapezoid surface weights along the walk
    let mut ds = vec![0.0; n_pts];
    for i in 0..n_pts {
        let len_to = |a: usize, b: usize| -> f64 {
            let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
            (pa[0] - pb[0]).hypot(pa[1] - pb[1])
        };
        let mut w = 0.0;
        if i + 1 < n_pts {
            w += 0.5 * len_to(outer_nodes[i], outer_nodes[i + 1]);
        } else if walk.closed {
            w += 0.5 * len_to(outer_nodes[i], outer_nodes[0]);
        }
        if i > 0 {
            w += 0.5 * len_to(outer_nodes[i], outer_nodes[i - 1]);
        } else if walk.closed {
            w += 0.5 * len_to(outer_nodes[0], outer_nodes[n_pts - 1]);
        }
        ds[i] = w;
        if mesh.ambient == Ambient::Axisym3d {
            ds[i] *= 2.0 * PI * mesh.nodes[outer_nodes[i]][0];
        }
    }

    let angular: Vec<AngularFn> = match mode {
        FemMode::Planar => {
            let j_count = 2 * n_max + 1;
            if j_count > n_pts {
                return Err(Error::Truncation(format!(
                    "J = {j_count} TBC modes exceed {n_pts} outer nodes (aliasing)"
                )));
            }
            let mut a = vec![AngularFn::Const2d];
            for n in 1..=n_max {
                a.push(AngularFn::Cos2d(n));
                a.push(AngularFn::Sin2d(n));
            }
            a
        }
        FemMode::Axisym { m } => {
            if n_max < m as usize {
                return Err(Error::Truncation(format!("n_max = {n_max} below azimuthal number m = {m}")));
            }
            let j_count = n_max - m as usize + 1;
            if j_count > n_pts {
                return Err(Error::Truncation(format!(
                    "J = {j_count} TBC modes exceed {n_pts} outer nodes (aliasing)"
                )));
            }
            (m as usize..=n_max).map(|n| AngularFn::Axi { n, m }).collect()
        }
    };
    let orders: Vec<usize> = angular.iter().map(|a| a.degree()).collect();
    let mut psi = Mat::<f64>::zeros(n_pts, angular.len());
    for (i, &node) in outer_nodes.iter().enumerate() {
        let pnode = mesh.nodes[node];
        let arg = match mode {
            FemMode::Planar => pnode[1].atan2(pnode[0]),
            FemMode::Axisym { .. } => (pnode[1] / l).clamp(-1.0, 1.0),
        };
        for (j, a) in angular.iter().enumerate() {
            psi[(i, j)] = a.eval(l, arg);
        }
    }

    let ball = BallSpec::new(if mesh.ambient == Ambient::Planar2d { 2 } else { 3 }, l)?;
    let mu: Vec<f64> = orders.iter().map(|&n| mu_exterior(ball, n, p)).collect::<Result<_>>()?;

    // Operator kernel G = Psi diag(mu) Psi^T; the normal-derivative operator
    // is G diag(ds) and the Galerkin block (test-function integration adds the
    // left surface weight) is diag(ds) G diag(ds) - symmetric and PSD since
    // the mu are nonnegative.
    let j_count = orders.len();
    let mut w = Mat::<f64>::zeros(n_pts, j_count);
    for j in 0..j_count {
        for i in 0..n_pts {
            w[(i, j)] = psi[(i, j)] * mu[j];
        }
    }
    let g = &w * psi.transpose();
    // asymmetry of the one-sided operator form G diag(ds); vanishes on a
    // uniform grid where the quadrature weights are equal
    let mut asym = 0.0_f64;
    let mut tmax = 0.0_f64;
    for r in 0..n_pts {
        for c in 0..n_pts {
            let t_rc = g[(r, c)] * ds[c];
            let t_cr = g[(c, r)] * ds[r];
            asym = asym.max((t_rc - t_cr).abs());
            tmax = tmax.max(t_rc.abs());
        }
    }
    let mut t = Mat::<f64>::zeros(n_pts, n_pts);
    for r in 0..n_pts {
        for c in 0..n_pts {
            t[(r, c)] = ds[r] * g[(r, c)] * ds[c];
        }
    }

    Ok(TbcData {
        outer_nodes,
        ds,
        orders,
        angular,
        mu,
        psi,
        t,
        asymmetry: if tmax > 0.0 { asym / tmax } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, DomainSpec, Obstacle};

    #[test]
    fn constant_vector_2d_p0_is_annihilated() {
        // mu_0^{(0,L)} = 0 in 2D and higher modes are orthogonal to constants
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap();
        let mesh = build_mesh(&spec, 0.1).unwrap();
        let tbc = tbc_matrix(&mesh, FemMode::Planar, 0.0, 12).unwrap();
        let n = tbc.outer_nodes.len();
        let mut max_row = 0.0_f64;
        for r in 0..n {
            let s: f64 = (0..n).map(|c| tbc.t[(r, c)]).sum();
            max_row = max_row.max(s.abs());
        }
        assert!(max_row < 1e-10, "T 1 = {max_row}");
    }

    #[test]
    fn constant_vector_3d_p0_gives_principal_eigenvalue() {
        // (T 1)_i ~ mu_0^{(0,L)} psi_0 <psi_0, 1> with mu_0 = 1/L
        let spec = DomainSpec::axisym(Obstacle::Spheroid { r_eq: 0.5, z_pole: 1.0 }, 2.0, 0.0).unwrap();
        let mesh = build_mesh(&spec, 0.1).unwrap();
        let tbc = tbc_matrix(&mesh, FemMode::Axisym { m: 0 }, 0.0, 16).unwrap();
        let n = tbc.outer_nodes.len();
        let l = 2.0;
        // quadratic form 1' T 1 = sum_n mu_n |<psi_n, 1>|^2 ~ mu_0 |sphere|
        // since <psi_0, 1> = sqrt(4 pi L^2) and higher moments nearly vanish
        let mut total = 0.0;
        for r in 0..n {
            for c in 0..n {
                total += tbc.t[(r, c)];
            }
        }
        let want = (1.0 / l) * 4.0 * PI * l * l;
        assert!((total - want).abs() / want < 2e-3, "1'T1 = {total} vs {want}");
    }

    #[test]
    fn asymmetry_tiny_on_equiangular_grid() {
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap();
        let mesh = build_mesh(&spec, 0.1).unwrap();
        let tbc = tbc_matrix(&mesh, FemMode::Planar, 0.5, 10).unwrap();
        assert!(tbc.asymmetry < 1e-10, "asymmetry {}", tbc.asymmetry);
    }

    #[test]
    fn aliasing_rejected() {
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap();
        let mesh = build_mesh(&spec, 0.4).unwrap();
        // very coarse outer circle cannot carry n_max = 64
        assert!(matches!(tbc_matrix(&mesh, FemMode::Planar, 0.0, 64), Err(Error::Truncation(_))));
    }

    #[test]
    fn psd_quadratic_form() {
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap();
        let mesh = build_mesh(&spec, 0.15).unwrap();
        let tbc = tbc_matrix(&mesh, FemMode::Planar, 0.3, 8).unwrap();
        let n = tbc.outer_nodes.len();
        // pseudo-random vectors
        let mut state = 0x12345678u64;
        for _ in 0..10 {
            let v: Vec<f64> = (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect();
            let mut q = 0.0;
            for r in 0..n {
                for c in 0..n {
                    q += v[r] * tbc.t[(r, c)] * v[c];
                }
            }
            assert!(q > -1e-9, "v'Tv = {q}");
        }
    }
}
