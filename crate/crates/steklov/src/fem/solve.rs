//! Steklov eigensolve: Schur-complement reduction of the FEM system onto the
//! Steklov boundary and a dense symmetric-definite pencil solve.
//!
//! The discrete problem is (K + pM + m^2 M_hat + T) U = mu B U with T the
//! transparent-boundary block. Interior and outer degrees of freedom are
//! eliminated through a sparse Cholesky factorization (the symbolic pattern
//! is computed once and reused across p), leaving the discrete
//! Dirichlet-to-Neumann matrix D on the Steklov boundary; the pencil
//! (D, B_Gamma) is solved densely.

use crate::error::{Error, Result};
use crate::fem::assemble::{assemble, AssembledSystem, FemMode};
use crate::fem::dense::{cholesky_lower, solve_lower_in_place, solve_lower_transpose_in_place};
use crate::fem::tbc::{tbc_matrix, AngularFn};
use crate::geometry::{BoundaryTag, BoundaryWalk, Mesh};
use faer::prelude::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use std::sync::{Arc, Mutex};

/// Immutable per-(mesh, mode) context: assembled matrices and boundary walks.
pub struct FemProblem {
    pub mesh: Mesh,
    pub mode: FemMode,
    pub sys: AssembledSystem,
    pub inner_walk: BoundaryWalk,
    symbolic: Mutex<Option<SymbolicLlt<usize>>>,
}

impl FemProblem {
    pub fn new(mesh: Mesh, mode: FemMode) -> Result<Arc<FemProblem>> {
        faer::set_global_parallelism(faer::Par::Seq);
        let sys = assemble(&mesh, mode, 0.0)?;
        let inner_walk = mesh.boundary_arclength(BoundaryTag::Inner)?;
        Ok(Arc::new(FemProblem { mesh, mode, sys, inner_walk, symbolic: Mutex::new(None) }))
    }

    /// Steklov boundary dof nodes in walk order (axis-Dirichlet nodes dropped).
    pub fn gamma_nodes(&self) -> Vec<usize> {
        self.inner_walk
            .nodes
            .iter()
            .copied()
            .filter(|&n| !self.sys.dirichlet[n])
            .collect()
    }

    /// B-weighted inner product of two full-length nodal fields
    /// (equals the L2(dOmega) product of their boundary traces).
    pub fn b_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        crate::fem::assemble::quad_form(&self.sys.b, u, v)
    }

    /// int_Omega u v (with the axisym 2 pi r weight).
    pub fn volume_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        crate::fem::assemble::quad_form(&self.sys.m, u, v)
    }

    /// int_Omega grad u . grad v.
    pub fn stiffness_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        crate::fem::assemble::quad_form(&self.sys.k, u, v)
    }

    /// int_dOmega v (the boundary integral of a trace given as a full field).
    pub fn boundary_integral(&self, u: &[f64]) -> f64 {
        let ones = vec![1.0; u.len()];
        self.b_inner(&ones, u)
    }

    pub fn solve(self: &Arc<Self>, p: f64, n_max: usize, k_max: usize) -> Result<SteklovSpectrum> {
        if !(p >= 0.0) {
            return Err(Error::domain(format!("rate p must be nonnegative, got {p}")));
        }
        let tbc = tbc_matrix(&self.mesh, self.mode, p, n_max)?;
        let n_nodes = self.mesh.nodes.len();
        let gamma_nodes = self.gamma_nodes();
        let n_gamma = gamma_nodes.len();
        if k_max > n_gamma {
            return Err(Error::Solver(format!(
                "requested {k_max} eigenpairs but only {n_gamma} Steklov dofs exist"
            )));
        }
        // dof partition: gamma (walk order) then the remaining active dofs
        let mut gamma_of = vec![usize::MAX; n_nodes];
        for (g, &n) in gamma_nodes.iter().enumerate() {
            gamma_of[n] = g;
        }
        let mut i_of = vec![usize::MAX; n_nodes];
        let mut n_i = 0;
        for n in 0..n_nodes {
            if !self.sys.dirichlet[n] && gamma_of[n] == usize::MAX {
                i_of[n] = n_i;
                n_i += 1;
            }
        }

        let m_sq = (self.mode.azimuthal() as f64).powi(2);
        let mut ii_trips: Vec<Triplet<usize, usize, f64>> = Vec::new();
        let mut ig_trips: Vec<Triplet<usize, usize, f64>> = Vec::new();
        let mut d_gg = Mat::<f64>::zeros(n_gamma, n_gamma);
        {
            let mut route = |r: usize, c: usize, v: f64| {
                if self.sys.dirichlet[r] || self.sys.dirichlet[c] {
                    return;
                }
                match (i_of[r] != usize::MAX, i_of[c] != usize::MAX) {
                    (true, true) => ii_trips.push(Triplet::new(i_of[r], i_of[c], v)),
                    (true, false) => ig_trips.push(Triplet::new(i_of[r], gamma_of[c], v)),
                    (false, true) => {} // symmetric counterpart covered
                    (false, false) => d_gg[(gamma_of[r], gamma_of[c])] += v,
                }
            };
            let mut scatter = |mat: &SparseColMat<usize, f64>, scale: f64| {
                if scale == 0.0 && !std::ptr::eq(mat, &self.sys.m) {
                    return;
                }
                let sym = mat.symbolic();
                for col in 0..mat.ncols() {
                    let rng = sym.col_range(col);
                    for (r, v) in sym.row_idx()[rng.clone()].iter().zip(&mat.val()[rng]) {
                        route(*r, col, v * scale);
                    }
                }
            };
            scatter(&self.sys.k, 1.0);
            // mass entries are kept even at p = 0 so the sparsity pattern (and
            // hence the cached symbolic factorization) is p-independent
            scatter(&self.sys.m, p);
            if let Some(mh) = &self.sys.m_hat {
                scatter(mh, m_sq);
            }
            for (i, &ni) in tbc.outer_nodes.iter().enumerate() {
                for (j, &nj) in tbc.outer_nodes.iter().enumerate() {
                    route(ni, nj, tbc.t[(i, j)]);
                }
            }
        }
        let a_ii = SparseColMat::<usize, f64>::try_new_from_triplets(n_i, n_i, &ii_trips)
            .map_err(|e| Error::Solver(format!("A_II assembly failed: {e:?}")))?;
        let a_ig = SparseColMat::<usize, f64>::try_new_from_triplets(n_i, n_gamma, &ig_trips)
            .map_err(|e| Error::Solver(format!("A_IG assembly failed: {e:?}")))?;
        drop(ii_trips);
        drop(ig_trips);

        let symbolic = {
            let mut guard = self.symbolic.lock().unwrap();
            if guard.is_none() {
                *guard = Some(
                    SymbolicLlt::try_new(a_ii.symbolic(), Side::Lower)
                        .map_err(|e| Error::Solver(format!("symbolic factorization failed: {e:?}")))?,
                );
            }
            guard.clone().unwrap()
        };
        let llt = Llt::try_new_with_symbolic(symbolic, a_ii.as_ref(), Side::Lower).map_err(|e| {
            Error::Solver(format!("A_II Cholesky failed (matrix not positive definite?): {e:?}"))
        })?;

        // Schur complement D = A_GG - A_GI A_II^{-1} A_IG, in column chunks
        let ig_sym = a_ig.symbolic();
        let chunk = 64usize;
        let mut col0 = 0;
        while col0 < n_gamma {
            let cols = chunk.min(n_gamma - col0);
            let mut rhs = Mat::<f64>::zeros(n_i, cols);
            for j in 0..cols {
                let rng = ig_sym.col_range(col0 + j);
                for (r, v) in ig_sym.row_idx()[rng.clone()].iter().zip(&a_ig.val()[rng]) {
                    rhs[(*r, j)] = *v;
                }
            }
            let x = llt.solve(&rhs);
            for g in 0..n_gamma {
                let rng = ig_sym.col_range(g);
                let rows = &ig_sym.row_idx()[rng.clone()];
                let vals = &a_ig.val()[rng];
                for j in 0..cols {
                    let mut dot = 0.0;
                    for (r, v) in rows.iter().zip(vals) {
                        dot += v * x[(*r, j)];
                    }
                    d_gg[(g, col0 + j)] -= dot;
                }
            }
            col0 += cols;
        }
        // clean up roundoff asymmetry
        for r in 0..n_gamma {
            for c in 0..r {
                let s = 0.5 * (d_gg[(r, c)] + d_gg[(c, r)]);
                d_gg[(r, c)] = s;
                d_gg[(c, r)] = s;
            }
        }

        // boundary mass restricted to gamma
        let mut b_gg = Mat::<f64>::zeros(n_gamma, n_gamma);
        {
            let sym = self.sys.b.symbolic();
            for col in 0..n_nodes {
                if gamma_of[col] == usize::MAX {
                    continue;
                }
                let rng = sym.col_range(col);
                for (r, v) in sym.row_idx()[rng.clone()].iter().zip(&self.sys.b.val()[rng]) {
                    if gamma_of[*r] != usize::MAX {
                        b_gg[(gamma_of[*r], gamma_of[col])] += *v;
                    }
                }
            }
        }

        // whiten: C = Lb^{-1} D Lb^{-T}
        let lb = cholesky_lower(&b_gg)
            .map_err(|_| Error::Solver("boundary mass not positive definite".into()))?;
        let mut c = d_gg.clone();
        solve_lower_in_place(&lb, &mut c);
        let mut ct = c.transpose().to_owned();
        solve_lower_in_place(&lb, &mut ct);
        for r in 0..n_gamma {
            for q in 0..r {
                let s = 0.5 * (ct[(r, q)] + ct[(q, r)]);
                ct[(r, q)] = s;
                ct[(q, r)] = s;
            }
        }
        let evd = ct
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Solver(format!("eigensolve failed: {e:?}")))?;

        // smallest k_max pairs; eigenvalues come sorted ascending
        let mut eigenvalues = Vec::with_capacity(k_max);
        let mut u_gamma = Mat::<f64>::zeros(n_gamma, k_max);
        for k in 0..k_max {
            eigenvalues.push(evd.S()[k]);
            for g in 0..n_gamma {
                u_gamma[(g, k)] = evd.U()[(g, k)];
            }
        }
        solve_lower_transpose_in_place(&lb, &mut u_gamma);

        // sign convention: boundary integral nonnegative, tie-break on the
        // first component of nontrivial magnitude
        let ones_b: Vec<f64> = (0..n_gamma).map(|g| (0..n_gamma).map(|h| b_gg[(g, h)]).sum()).collect();
        let mut boundary_integrals = Vec::with_capacity(k_max);
        for k in 0..k_max {
            let mut s = 0.0;
            for g in 0..n_gamma {
                s += ones_b[g] * u_gamma[(g, k)];
            }
            let flip = if s.abs() > 1e-9 {
                s < 0.0
            } else {
                let mut f = false;
                for g in 0..n_gamma {
                    if u_gamma[(g, k)].abs() > 1e-9 {
                        f = u_gamma[(g, k)] < 0.0;
                        break;
                    }
                }
                f
            };
            if flip {
                for g in 0..n_gamma {
                    u_gamma[(g, k)] = -u_gamma[(g, k)];
                }
                s = -s;
            }
            boundary_integrals.push(s);
        }

        // interior reconstruction U_I = -A_II^{-1} A_IG U_G
        let mut rhs = Mat::<f64>::zeros(n_i, k_max);
        for g in 0..n_gamma {
            let rng = ig_sym.col_range(g);
            for (r, v) in ig_sym.row_idx()[rng.clone()].iter().zip(&a_ig.val()[rng]) {
                for k in 0..k_max {
                    rhs[(*r, k)] += v * u_gamma[(g, k)];
                }
            }
        }
        let u_i = llt.solve(&rhs);
        let mut fields = vec![vec![0.0; n_nodes]; k_max];
        for n in 0..n_nodes {
            if gamma_of[n] != usize::MAX {
                for k in 0..k_max {
                    fields[k][n] = u_gamma[(gamma_of[n], k)];
                }
            } else if i_of[n] != usize::MAX {
                for k in 0..k_max {
                    fields[k][n] = -u_i[(i_of[n], k)];
                }
            }
        }
        let traces: Vec<Vec<f64>> =
            (0..k_max).map(|k| (0..n_gamma).map(|g| u_gamma[(g, k)]).collect()).collect();

        // outer modal coefficients <V_k, psi_j>
        let j_count = tbc.orders.len();
        let mut outer_coeffs = vec![vec![0.0; j_count]; k_max];
        for (i, &node) in tbc.outer_nodes.iter().enumerate() {
            for k in 0..k_max {
                let v = fields[k][node] * tbc.ds[i];
                for j in 0..j_count {
                    outer_coeffs[k][j] += tbc.psi[(i, j)] * v;
                }
            }
        }

        let inner_arclength = {
            let mut arc = Vec::with_capacity(n_gamma);
            for (pos, &n) in self.inner_walk.nodes.iter().enumerate() {
                if !self.sys.dirichlet[n] {
                    arc.push(self.inner_walk.arclength[pos]);
                }
            }
            arc
        };

        Ok(SteklovSpectrum {
            p,
            n_max,
            eigenvalues,
            traces,
            inner_nodes: gamma_nodes,
            inner_arclength,
            fields,
            outer_coeffs,
            outer_orders: tbc.orders,
            outer_angular: tbc.angular,
            outer_mu: tbc.mu,
            boundary_integrals,
            tbc_asymmetry: tbc.asymmetry,
            problem: self.clone(),
        })
    }
}

/// Solved Steklov spectrum: ordered eigenvalues, boundary traces normalized
/// to unit L2(dOmega) norm with nonnegative boundary integral, interior nodal
/// fields, and the truncated outer modal expansion.
pub struct SteklovSpectrum {
    pub p: f64,
    pub n_max: usize,
    pub eigenvalues: Vec<f64>,
    /// traces[k][g]: v_k at inner_nodes[g]
    pub traces: Vec<Vec<f64>>,
    /// Steklov-boundary node ids in arclength walk order
    pub inner_nodes: Vec<usize>,
    pub inner_arclength: Vec<f64>,
    /// fields[k][node]: V_k at every mesh node
    pub fields: Vec<Vec<f64>>,
    /// outer_coeffs[k][j] = <V_k, psi_j> on the truncation circle
    pub outer_coeffs: Vec<Vec<f64>>,
    pub outer_orders: Vec<usize>,
    pub outer_angular: Vec<AngularFn>,
    /// ball DtN eigenvalue per outer column
    pub outer_mu: Vec<f64>,
    /// int_dOmega v_k (nonnegative by the sign convention, up to ties)
    pub boundary_integrals: Vec<f64>,
    pub tbc_asymmetry: f64,
    pub problem: Arc<FemProblem>,
}

impl SteklovSpectrum {
    pub fn k_max(&self) -> usize {
        self.eigenvalues.len()
    }

    /// B-inner product of two eigentraces (delta_jk up to discretization).
    pub fn trace_inner(&self, j: usize, k: usize) -> f64 {
        self.problem.b_inner(&self.fields[j], &self.fields[k])
    }
}
