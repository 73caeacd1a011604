//! Spectrum export: JSON documents and CSV eigenvalue tables.

use crate::fem::assemble::FemMode;
use crate::fem::solve::SteklovSpectrum;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Serialize, Deserialize)]
pub struct SpectrumExport {
    pub p: f64,
    pub mode: String,
    pub n_max: usize,
    pub eigenvalues: Vec<f64>,
    /// cumulative arclength of the trace sample points along the boundary
    pub arclength: Vec<f64>,
    /// traces[k] aligned with `arclength`
    pub traces: Vec<Vec<f64>>,
    pub outer_orders: Vec<usize>,
    pub outer_coeffs: Vec<Vec<f64>>,
    pub boundary_integrals: Vec<f64>,
}

pub fn spectrum_to_export(sp: &SteklovSpectrum) -> SpectrumExport {
    let mode = match sp.problem.mode {
        FemMode::Planar => "planar2d".to_string(),
        FemMode::Axisym { m } => format!("axisym3d-m{m}"),
    };
    SpectrumExport {
        p: sp.p,
        mode,
        n_max: sp.n_max,
        eigenvalues: sp.eigenvalues.clone(),
        arclength: sp.inner_arclength.clone(),
        traces: sp.traces.clone(),
        outer_orders: sp.outer_orders.clone(),
        outer_coeffs: sp.outer_coeffs.clone(),
        boundary_integrals: sp.boundary_integrals.clone(),
    }
}

pub fn spectrum_csv(sp: &SteklovSpectrum) -> String {
    let mut out = String::from("k,mu\n");
    for (k, mu) in sp.eigenvalues.iter().enumerate() {
        let _ = writeln!(out, "{k},{mu:.17e}");
    }
    out
}
