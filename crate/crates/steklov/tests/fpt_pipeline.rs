//! First-passage statistics driven by FEM spectra (not just the analytic
//! sphere): mode filtering, the mgf route, and Laplace-transform consistency
//! between the time-domain density and the small-p spectrum.

use std::sync::Arc;
use steklov::asymptotics::{analyze_small_p, AnalyzeOptions};
use steklov::fem::{FemMode, FemProblem};
use steklov::first_passage::{
    mgf_u_from_spectrum, mgf_u_sphere, pdf_u_longtime, survival_sq_infinity, FptInputs,
};
use steklov::geometry::{build_mesh, DomainSpec, Obstacle};

fn axisym(ob: Obstacle, h: f64) -> Arc<FemProblem> {
    let spec = DomainSpec::axisym(ob, 2.0, 0.0).unwrap();
    FemProblem::new(build_mesh(&spec, h).unwrap(), FemMode::Axisym { m: 0 }).unwrap()
}

#[test]
fn fem_sphere_matches_closed_forms() {
    let problem = axisym(Obstacle::Spheroid { r_eq: 1.0, z_pole: 1.0 }, 0.05);
    let sp0 = problem.solve(0.0, 24, 6).unwrap();
    let reports = analyze_small_p(&sp0, AnalyzeOptions::default()).unwrap();
    // a_0 = 1 for the sphere; higher modes have vanishing boundary integrals
    assert!((reports[0].a - 1.0).abs() < 5e-3, "a_0 = {}", reports[0].a);
    for r in &reports[1..] {
        assert!(r.a < 1e-6, "a_{} = {}", r.k, r.a);
    }
    let x0 = [1.0, 0.0];
    let inputs = FptInputs::from_spectrum(&sp0, &reports, x0, 1.0, 1.0).unwrap();
    let s_inf = survival_sq_infinity(&inputs).unwrap();
    assert!((s_inf - 0.5).abs() < 5e-3, "S(inf) = {s_inf}");

    // mgf from a spectrum solved at rate p vs the exact e^{-l (1/R + sqrt p)}
    for p in [0.01, 0.25] {
        let sp = problem.solve(p, 24, 8).unwrap();
        for ell in [0.0, 0.4, 1.5] {
            let got = mgf_u_from_spectrum(&sp, x0, ell).unwrap();
            let want = mgf_u_sphere(1.0, 1.0, p, ell);
            assert!(
                (got - want).abs() < 6e-3 * want.max(0.1),
                "p={p} ell={ell}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn cylinder_mode_filtering_and_laplace_consistency() {
    let problem = axisym(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 0.04);
    let sp0 = problem.solve(0.0, 24, 5).unwrap();
    let reports = analyze_small_p(&sp0, AnalyzeOptions::default()).unwrap();
    // start on the equator of the lateral surface
    let x0 = [1.0, 0.0];
    let inputs = FptInputs::from_spectrum(&sp0, &reports, x0, 1.0, 1.0).unwrap();

    // only the a_k > 0 modes (k = 0, 2, 4 for this symmetric body) enter U;
    // the antisymmetric ones contribute exactly zero
    let ell = 0.5;
    let t_grid: Vec<f64> = (0..24).map(|i| 0.5 * 1.5f64.powi(i)).collect();
    let u_all = pdf_u_longtime(&inputs, ell, &t_grid).unwrap();
    let mut filtered = inputs.clone();
    filtered.modes = inputs
        .modes
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(_, m)| *m)
        .collect();
    let u_even = pdf_u_longtime(&filtered, ell, &t_grid).unwrap();
    for (a, b) in u_all.values.iter().zip(&u_even.values) {
        assert!((a - b).abs() <= 1e-14 + 1e-12 * a.abs(), "odd modes contributed: {a} vs {b}");
    }

    // Laplace consistency: int e^{-pt} U(l, t) dt against the mgf built from
    // the spectrum at the matching rate, for small p
    let p = 1e-4;
    let sp_p = problem.solve(p, 24, 8).unwrap();
    let mgf = mgf_u_from_spectrum(&sp_p, x0, ell).unwrap();
    // quadrature on a log grid; U decays as t^{-3/2} so the upper cutoff tail
    // is completed analytically through the t -> inf limit of the sum
    let grid: Vec<f64> = (0..4000)
        .map(|i| 1e-6 * (1e9f64 / 1e-6).powf(i as f64 / 3999.0))
        .collect();
    let u = pdf_u_longtime(&inputs, ell, &grid).unwrap();
    let mut lt = 0.0;
    for i in 1..grid.len() {
        let f0 = (-p * grid[i - 1]).exp() * u.values[i - 1];
        let f1 = (-p * grid[i]).exp() * u.values[i];
        lt += 0.5 * (f0 + f1) * (grid[i] - grid[i - 1]);
    }
    // analytic tail of sum a_k l e^{-mu_k l} v int v / sqrt(4 pi D t^3)
    let tail_coeff: f64 = inputs
        .modes
        .iter()
        .filter(|m| m.a > 1e-9)
        .map(|m| m.a * ell * (-m.mu0 * ell).exp() * m.v_x0 * m.boundary_integral)
        .sum::<f64>()
        / (4.0 * std::f64::consts::PI).sqrt();
    lt += 2.0 * tail_coeff / grid.last().unwrap().sqrt();
    assert!(
        (lt - mgf).abs() / mgf < 0.01,
        "Laplace transform {lt} vs mgf {mgf} (rel {})",
        (lt - mgf).abs() / mgf
    );
}
