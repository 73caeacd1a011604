//! P1 finite-element assembly on the annular mesh.
//!
//! Planar mode assembles the usual stiffness/mass pair; axisymmetric mode
//! weighs both by 2 pi r (the azimuthal factor is kept so that quadratic
//! forms equal true 3D integrals), and for azimuthal number m >= 1 adds the
//! singular mass M_hat = int (2 pi / r) phi_i phi_j with homogeneous
//! Dirichlet conditions on the axis.

use crate::error::{Error, Result};
use crate::geometry::{Ambient, BoundaryTag, Mesh};
use faer::sparse::{SparseColMat, Triplet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FemMode {
    Planar,
    /// Axisymmetric reduction with azimuthal number m.
    Axisym { m: u32 },
}

impl FemMode {
    pub fn azimuthal(&self) -> u32 {
        match self {
            FemMode::Planar => 0,
            FemMode::Axisym { m } => *m,
        }
    }
}

/// Degree-2 rule: 3 interior points, weights 1/3 (times area).
const QUAD3: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

/// Degree-4 rule: 6 points (times area); used for the r and 1/r weights.
const QUAD6: [([f64; 3], f64); 6] = [
    ([0.108103018168070, 0.445948490915965, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.108103018168070, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.445948490915965, 0.108103018168070], 0.223381589678011),
    ([0.816847572980459, 0.091576213509771, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.816847572980459, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.091576213509771, 0.816847572980459], 0.109951743655322),
];

/// Two-point Gauss rule on [0, 1] (exact for cubics).
const EDGE_GAUSS2: [(f64, f64); 2] = [
    (0.211324865405187, 0.5), // (1 - 1/sqrt(3)) / 2
    (0.788675134594813, 0.5),
];

pub struct AssembledSystem {
    pub mode: FemMode,
    /// stiffness: int grad phi_i . grad phi_j (times 2 pi r for axisym)
    pub k: SparseColMat<usize, f64>,
    /// mass: int phi_i phi_j (times 2 pi r for axisym)
    pub m: SparseColMat<usize, f64>,
    /// axis-weighted mass int (2 pi / r) phi_i phi_j; present only for m >= 1
    pub m_hat: Option<SparseColMat<usize, f64>>,
    /// boundary mass on the INNER boundary (times 2 pi r for axisym)
    pub b: SparseColMat<usize, f64>,
    /// nodes with homogeneous Dirichlet treatment (axis nodes when m >= 1)
    pub dirichlet: Vec<bool>,
}

pub fn assemble(mesh: &Mesh, mode: FemMode, _p_hint: f64) -> Result<AssembledSystem> {
    let axisym = matches!(mode, FemMode::Axisym { .. });
    if axisym != (mesh.ambient == Ambient::Axisym3d) {
        return Err(Error::Solver("assembly mode does not match mesh ambient".into()));
    }
    let m_azim = mode.azimuthal();
    let n = mesh.nodes.len();
    let mut kt: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mt: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mh: Vec<Triplet<usize, usize, f64>> = Vec::new();
    let two_pi = 2.0 * std::f64::consts::PI;

    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let area = mesh.triangle_area(t);
        if area <= 0.0 {
            return Err(Error::Solver(format!("degenerate triangle {t}")));
        }
        // constant P1 gradients: grad lambda_i
        let grads = [
            [(p[1][1] - p[2][1]) / (2.0 * area), (p[2][0] - p[1][0]) / (2.0 * area)],
            [(p[2][1] - p[0][1]) / (2.0 * area), (p[0][0] - p[2][0]) / (2.0 * area)],
            [(p[0][1] - p[1][1]) / (2.0 * area), (p[1][0] - p[0][0]) / (2.0 * area)],
        ];
        if !axisym {
            for i in 0..3 {
                for j in 0..3 {
                    let kij = (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]) * area;
                    kt.push(Triplet::new(tri[i], tri[j], kij));
                    let mut mij = 0.0;
                    for (bary, w) in QUAD3 {
                        mij += w * bary[i] * bary[j];
                    }
                    mt.push(Triplet::new(tri[i], tri[j], mij * area));
                }
            }
        } else {
            // r-weighted forms with the 2 pi azimuthal factor
            for i in 0..3 {
                for j in 0..3 {
                    let mut kij = 0.0;
                    let mut mij = 0.0;
                    let mut mhij = 0.0;
                    for (bary, w) in QUAD6 {
                        let r = bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0];
                        let gg = grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1];
                        kij += w * r * gg;
                        mij += w * r * bary[i] * bary[j];
                        if m_azim >= 1 {
                            // phi_i phi_j / r; the Dirichlet axis constraint keeps
                            // retained basis products O(r^2) near the axis
                            if r > 1e-300 {
                                mhij += w * bary[i] * bary[j] / r;
                            }
                        }
                    }
                    kt.push(Triplet::new(tri[i], tri[j], two_pi * kij * area));
                    mt.push(Triplet::new(tri[i], tri[j], two_pi * mij * area));
                    if m_azim >= 1 {
                        mh.push(Triplet::new(tri[i], tri[j], two_pi * mhij * area));
                    }
                }
            }
        }
    }

    // INNER boundary mass with 2-point edge quadrature
    let mut bt: Vec<Triplet<usize, usize, f64>> = Vec::new();
    for &(a, b, tag) in &mesh.boundary_edges {
        if tag != BoundaryTag::Inner {
            continue;
        }
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
        let mut e = [[0.0; 2]; 2]; // local 2x2 edge mass
        for (t, w) in EDGE_GAUSS2 {
            let phi = [1.0 - t, t];
            let weight = if axisym {
                let r = pa[0] + t * (pb[0] - pa[0]);
                two_pi * r
            } else {
                1.0
            };
            for i in 0..2 {
                for j in 0..2 {
                    e[i][j] += w * weight * phi[i] * phi[j] * len;
                }
            }
        }
        let idx = [a, b];
        for i in 0..2 {
            for j in 0..2 {
                bt.push(Triplet::new(idx[i], idx[j], e[i][j]));
            }
        }
    }

    let build = |trips: &[Triplet<usize, usize, f64>]| -> Result<SparseColMat<usize, f64>> {
        SparseColMat::try_new_from_triplets(n, n, trips)
            .map_err(|e| Error::Solver(format!("sparse assembly failed: {e:?}")))
    };
    let k = build(&kt)?;
    let m = build(&mt)?;
    let m_hat = if m_azim >= 1 { Some(build(&mh)?) } else { None };
    let b = build(&bt)?;

    let mut dirichlet = vec![false; n];
    if m_azim >= 1 {
        for (i, p) in mesh.nodes.iter().enumerate() {
            if p[0].abs() <= 1e-10 * mesh.l {
                dirichlet[i] = true;
            }
        }
    }

    Ok(AssembledSystem { mode, k, m, m_hat, b, dirichlet })
}

/// y += A x for faer sparse (column-major) matrices.
pub fn spmv_add(a: &SparseColMat<usize, f64>, x: &[f64], y: &mut [f64]) {
    let sym = a.symbolic();
    for col in 0..a.ncols() {
        let xv = x[col];
        if xv == 0.0 {
            continue;
        }
        let rng = sym.col_range(col);
        let rows = &sym.row_idx()[rng.clone()];
        let vals = &a.val()[rng];
        for (r, v) in rows.iter().zip(vals) {
            y[*r] += v * xv;
        }
    }
}

/// x' A y for faer sparse matrices.
pub fn quad_form(a: &SparseColMat<usize, f64>, x: &[f64], y: &[f64]) -> f64 {
    let mut ay = vec![0.0; x.len()];
    spmv_add(a, y, &mut ay);
    x.iter().zip(&ay).map(|(xi, ai)| xi * ai).sum()
}
