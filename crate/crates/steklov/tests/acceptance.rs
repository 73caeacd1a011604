//! Acceptance suite: one test per criterion, each printing PASS/FAIL lines
//! for its sub-checks (visible with --nocapture; a failed assertion always
//! shows the measured values).

use std::f64::consts::PI;
use std::sync::Arc;
use steklov::asymptotics::{
    analyze_small_p, decay_envelope_check, fit_law_coefficient, p_sweep, AnalyzeOptions, Regime,
};
use steklov::ball::{mu_exterior, mu_exterior_gap, mu_interior, q_norm, small_p_law, BallSpec};
use steklov::fem::{
    extend_exterior, spectrum_csv, validate_against_ball, FemMode, FemProblem,
};
use steklov::first_passage::{
    hq_sphere, mc_survival_sphere, pdf_hq_longtime, pdf_u_longtime, sq_sphere, survival_sq,
    survival_sq_infinity, u_sphere, FptInputs, McParams,
};
use steklov::geometry::{build_mesh, DomainSpec, Obstacle};
use steklov::special::{bessel_i_scaled, bessel_k_scaled_ext, log_capacity, BesselOrder, ShapeForCapacity};

const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

fn check(name: &str, pass: bool) -> bool {
    println!("[{}] {}", if pass { "PASS" } else { "FAIL" }, name);
    pass
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn planar_problem(ob: Obstacle, h: f64) -> Arc<FemProblem> {
    let spec = DomainSpec::planar(ob, 2.0).unwrap();
    FemProblem::new(build_mesh(&spec, h).unwrap(), FemMode::Planar).unwrap()
}

fn axisym_problem(ob: Obstacle, h: f64) -> Arc<FemProblem> {
    let spec = DomainSpec::axisym(ob, 2.0, 0.0).unwrap();
    FemProblem::new(build_mesh(&spec, h).unwrap(), FemMode::Axisym { m: 0 }).unwrap()
}

/// Criterion 1: Table-style validation on the offset disk at h = 0.01.
#[test]
fn criterion_1_table_reproduction() {
    let t0 = std::time::Instant::now();
    let mut ok = true;
    let rep0 = validate_against_ball(2, 1.0, [0.0, 0.25], 2.0, 0.01, 30, 0.0, 11).unwrap();
    ok &= check(
        &format!("c1: p=0 mu_0 = {:.2e} <= 1e-8", rep0.modes[0].mu_fem.abs()),
        rep0.modes[0].mu_fem.abs() <= 1e-8,
    );
    let worst_rel = rep0.modes[1..].iter().map(|m| m.rel_err).fold(0.0, f64::max);
    ok &= check(&format!("c1: p=0 worst rel err {worst_rel:.2e} <= 2e-3"), worst_rel <= 2e-3);
    // exact targets 1,1,2,2,3,3,4,4,5,5 for k = 1..10
    for (k, want) in [(1, 1.0), (3, 2.0), (5, 3.0), (7, 4.0), (9, 5.0)] {
        let got = rep0.modes[k].mu_fem;
        ok &= check(
            &format!("c1: p=0 mu_{k} = {got:.5} vs {want} (rel {:.1e})", (got - want).abs() / want),
            (got - want).abs() / want <= 2e-3,
        );
    }
    let worst_rmse = rep0.modes.iter().map(|m| m.rmse).fold(0.0, f64::max);
    ok &= check(&format!("c1: p=0 worst trace RMSE {worst_rmse:.4} <= 0.012"), worst_rmse <= 0.012);

    let rep1 = validate_against_ball(2, 1.0, [0.0, 0.25], 2.0, 0.01, 30, 1.0, 11).unwrap();
    let mu0_dev = (rep1.modes[0].mu_fem - 1.4296).abs();
    ok &= check(&format!("c1: p=1 |mu_0 - 1.4296| = {mu0_dev:.2e} <= 1e-3"), mu0_dev <= 1e-3);
    let mu9_dev = (rep1.modes[9].mu_fem - 5.1225).abs();
    ok &= check(&format!("c1: p=1 |mu_9 - 5.1225| = {mu9_dev:.2e} <= 3e-3"), mu9_dev <= 3e-3);
    let worst_rmse1 = rep1.modes.iter().map(|m| m.rmse).fold(0.0, f64::max);
    ok &= check(&format!("c1: p=1 worst trace RMSE {worst_rmse1:.4} <= 0.012"), worst_rmse1 <= 0.012);
    let secs = t0.elapsed().as_secs_f64();
    ok &= check(&format!("c1: runtime {secs:.0} s <= 120 s"), secs <= 120.0);
    assert!(ok, "criterion 1 failed");
}

/// Criterion 2: exact-oracle identity suite on the ball, all dimensions.
#[test]
fn criterion_2_ball_identity_suite() {
    let mut ok = true;
    // dp mu = Q_n by centered differences of the p-dependent gap
    let mut worst: f64 = 0.0;
    for d in 2..=5u32 {
        let ball = BallSpec::new(d, 1.0).unwrap();
        for n in [0usize, 1, 2, 5, 9] {
            for p in [1e-3, 0.04, 0.5, 2.0] {
                let h = 1e-6 * p;
                let fd = (mu_exterior_gap(ball, n, p + h).unwrap()
                    - mu_exterior_gap(ball, n, p - h).unwrap())
                    / (2.0 * h);
                let q = q_norm(ball, n, p).unwrap();
                worst = worst.max((fd - q).abs() / q.abs());
            }
        }
    }
    ok &= check(&format!("c2: dp mu = |V|^2, worst rel {worst:.2e} <= 1e-6"), worst <= 1e-6);

    // Wronskian over supported orders and z in [1e-4, 100]
    let mut worst_w: f64 = 0.0;
    for twice in [0, 1, 2, 3, 5, 8, 13] {
        for &z in &[1e-4, 1e-2, 0.3, 2.0, 11.0, 60.0, 100.0] {
            let nu = BesselOrder::from_twice(twice);
            let nup = BesselOrder::from_twice(twice + 2);
            let i0 = bessel_i_scaled(nu, z).unwrap();
            let i1 = bessel_i_scaled(nup, z).unwrap();
            let k0 = bessel_k_scaled_ext(nu, z).unwrap().to_f64();
            let k1 = bessel_k_scaled_ext(nup, z).unwrap().to_f64();
            if let (Some(k0), Some(k1)) = (k0, k1) {
                if k0.is_finite() && k1.is_finite() {
                    worst_w = worst_w.max(((i0 * k1 + i1 * k0) - 1.0 / z).abs() * z);
                }
            }
        }
    }
    ok &= check(&format!("c2: Wronskian worst rel {worst_w:.2e} <= 1e-11"), worst_w <= 1e-11);

    // sqrt(p) bounds: exterior d >= 3 and interior all d
    let mut bounds = true;
    for d in 2..=5u32 {
        let ball = BallSpec::new(d, 0.9).unwrap();
        for n in [0usize, 1, 3, 7] {
            for &p in &[1e-6, 1e-3, 0.2, 4.0, 30.0] {
                if d >= 3 {
                    let gap = mu_exterior_gap(ball, n, p).unwrap();
                    bounds &= gap >= -1e-12 && gap <= p.sqrt() + 1e-10;
                }
                let gap_i =
                    mu_interior(ball, n, p).unwrap() - mu_interior(ball, n, 0.0).unwrap();
                bounds &= gap_i <= p.sqrt() + 1e-10;
            }
        }
    }
    ok &= check("c2: sqrt(p) bounds (exterior d>=3, interior all d)", bounds);

    // small-p laws: remainder is o(leading term) along p = 1e-2 .. 1e-8
    let mut laws = true;
    for (d, n) in [(2u32, 0usize), (2, 1), (2, 4), (3, 0), (3, 1), (4, 0), (4, 2), (5, 0)] {
        let ball = BallSpec::new(d, 1.0).unwrap();
        let law = small_p_law(ball, n);
        let mut prev_ratio = f64::INFINITY;
        for k in 1..=4 {
            let p = 10f64.powi(-2 * k);
            let mu = mu_exterior(ball, n, p).unwrap();
            let pred = law.predict(p);
            let lead = (pred - law.mu0).abs().max(1e-300);
            let ratio = (mu - pred).abs() / lead;
            laws &= ratio < prev_ratio.max(1e-9) * 1.01 || ratio < 0.05;
            prev_ratio = ratio;
        }
        laws &= prev_ratio < 0.02;
    }
    ok &= check("c2: small-p laws verified on p = 1e-2 .. 1e-8 (all d)", laws);
    assert!(ok, "criterion 2 failed");
}

/// Criterion 3: 2D principal-eigenvalue capacity law over p in [1e-5, 1e-2].
#[test]
fn criterion_3_capacity_law() {
    let t0 = std::time::Instant::now();
    let mut ok = true;
    let shapes: [(&str, Obstacle, f64); 4] = [
        (
            "disk",
            Obstacle::Disk { radius: 1.0 },
            log_capacity(ShapeForCapacity::Disk { radius: 1.0 }).unwrap(),
        ),
        (
            "ellipse",
            Obstacle::Ellipse { a: 1.0, b: 0.5 },
            log_capacity(ShapeForCapacity::Ellipse { a: 1.0, b: 0.5 }).unwrap(),
        ),
        (
            "square",
            Obstacle::square(2.0),
            log_capacity(ShapeForCapacity::Square { side: 2.0 }).unwrap(),
        ),
        (
            "triangle",
            Obstacle::equilateral_triangle(2.0),
            log_capacity(ShapeForCapacity::EquilateralTriangle { side: 2.0 }).unwrap(),
        ),
    ];
    for (name, ob, rc) in shapes {
        let problem = planar_problem(ob, 0.02);
        let surface = problem.boundary_measure();
        let grid = logspace(1e-5, 1e-2, 13);
        let sweep = p_sweep(&problem, &grid, 30, 2).unwrap();
        // 2D principal eigenvalue vanishes at p = 0
        ok &= check(
            &format!("c3: {name} mu_0(0) = {:.1e} <= 1e-8", sweep.spectrum0.eigenvalues[0].abs()),
            sweep.spectrum0.eigenvalues[0].abs() <= 1e-8,
        );
        let mut worst = 0.0f64;
        for row in &sweep.rows {
            let law = -2.0 * PI / (surface * ((rc * row.p.sqrt() / 2.0).ln() + EULER_GAMMA));
            worst = worst.max((row.mu[0] - law).abs() / law);
        }
        ok &= check(&format!("c3: {name} capacity-law worst rel {worst:.4} <= 0.03"), worst <= 0.03);
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= check(&format!("c3: runtime {secs:.0} s <= 900 s"), secs <= 900.0);
    // Known red: the square's worst deviation is 3.25% at the p = 1e-2
    // endpoint and is mesh-independent (identical at h = 0.04/0.02/0.01).
    // The same pipeline recovers the disk capacity to 5 digits, and for the
    // disk the measured endpoint deviation (1.81%) matches the closed-form
    // eigenvalue's own distance from the log law, so the excess is the law's
    // intrinsic next-order remainder at a polygon corner, not solver error.
    // The tolerance is asserted as stated rather than loosened.
    assert!(ok, "criterion 3 failed");
}

/// Criterion 4: 2D regime coefficients against the reported values.
#[test]
fn criterion_4_2d_coefficients() {
    let mut ok = true;
    let within = |got: f64, want: f64| (got - want).abs() / want.abs() <= 0.10;

    let sp = planar_problem(Obstacle::Ellipse { a: 1.0, b: 0.5 }, 0.02).solve(0.0, 30, 8).unwrap();
    let rep = analyze_small_p(&sp, AnalyzeOptions::default()).unwrap();
    for (label, got, want) in [
        ("ellipse d_1", rep[1].d_coeff, 0.62),
        ("ellipse d_2", rep[2].d_coeff, 0.82),
        ("ellipse b_3", rep[3].b, 0.36),
        ("ellipse a_4", rep[4].a, 0.062),
    ] {
        ok &= check(&format!("c4: {label} = {got:.4} vs {want} (10%)"), within(got, want));
    }

    let sp = planar_problem(Obstacle::square(2.0), 0.02).solve(0.0, 30, 10).unwrap();
    let rep = analyze_small_p(&sp, AnalyzeOptions::default()).unwrap();
    for (label, got, want) in [
        ("square d_1", rep[1].d_coeff, 1.03),
        ("square b_3", rep[3].b, 0.55),
        ("square b_4", rep[4].b, 0.56),
        ("square a_8", rep[8].a, 0.047),
    ] {
        ok &= check(&format!("c4: {label} = {got:.4} vs {want} (10%)"), within(got, want));
    }

    let sp = planar_problem(Obstacle::equilateral_triangle(2.0), 0.02).solve(0.0, 30, 8).unwrap();
    let rep = analyze_small_p(&sp, AnalyzeOptions::default()).unwrap();
    for (label, got, want) in [
        ("triangle d_1", rep[1].d_coeff, 0.63),
        ("triangle d_3", rep[3].d_coeff, 0.09),
        ("triangle b_5", rep[5].b, 0.21),
        ("triangle a_6", rep[6].a, 0.090),
    ] {
        ok &= check(&format!("c4: {label} = {got:.4} vs {want} (10%)"), within(got, want));
    }
    assert!(ok, "criterion 4 failed");
}

/// Criterion 5: 3D axisymmetric dichotomy and law agreement.
#[test]
fn criterion_5_3d_dichotomy() {
    let mut ok = true;
    let grid = logspace(1e-5, 1e-3, 9);

    for (name, ob) in [
        ("prolate", Obstacle::Spheroid { r_eq: 0.5, z_pole: 1.0 }),
        ("oblate", Obstacle::Spheroid { r_eq: 1.0, z_pole: 0.5 }),
    ] {
        let problem = axisym_problem(ob, 0.02);
        let sweep = p_sweep(&problem, &grid, 30, 5).unwrap();
        let reports = analyze_small_p(&sweep.spectrum0, AnalyzeOptions::default()).unwrap();
        // 3D principal eigenvalue strictly positive at p = 0
        ok &= check(
            &format!("c5: {name} mu_0(0) = {:.4} > 0", sweep.spectrum0.eigenvalues[0]),
            sweep.spectrum0.eigenvalues[0] > 1e-3,
        );
        // odd k: Linear with vanishing boundary integral; even k: sqrt(p)
        // (near-threshold modes carry the ambiguity flag by design)
        for k in 0..5 {
            let r = &reports[k];
            if k % 2 == 1 {
                // the boundary integral of an antisymmetric mode vanishes up to
                // quadrature noise (observed ~1e-6 at h = 0.02, vs >= 0.07 for
                // the symmetric modes); test it through a_k which squares the
                // separation
                ok &= check(
                    &format!(
                        "c5: {name} k={k} Linear with a = {:.1e}, int v = {:.1e}",
                        r.a,
                        r.boundary_integral.abs()
                    ),
                    r.regime == Regime::Linear && r.a < 1e-8,
                );
            } else {
                let sqrtish =
                    r.regime == Regime::Sqrt3d || r.ambiguous_with == Some(Regime::Sqrt3d);
                ok &= check(
                    &format!("c5: {name} k={k} sqrt(p) regime (a = {:.3e}, {:?})", r.a, r.regime),
                    sqrtish && r.a > 1e-3,
                );
            }
            // law agreement: regression over the window recovers the
            // coefficient within 10% for unambiguous modes
            if r.ambiguous_with.is_none() {
                let fit = fit_law_coefficient(&r.law, &sweep.rows, k, sweep.spectrum0.eigenvalues[k]);
                let dev = (fit - r.law.coefficient).abs() / r.law.coefficient.abs();
                ok &= check(
                    &format!("c5: {name} k={k} law coefficient recovered (dev {dev:.3})"),
                    dev <= 0.10,
                );
            }
        }
    }

    let problem = axisym_problem(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 0.02);
    let sweep = p_sweep(&problem, &grid, 30, 5).unwrap();
    let reports = analyze_small_p(&sweep.spectrum0, AnalyzeOptions::default()).unwrap();
    ok &= check(
        &format!("c5: cylinder a_0 = {:.4} vs 0.91 (15%)", reports[0].a),
        (reports[0].a - 0.91).abs() / 0.91 <= 0.15,
    );
    ok &= check(
        &format!("c5: cylinder a_4 = {:.4} vs 0.07 (15%)", reports[4].a),
        (reports[4].a - 0.07).abs() / 0.07 <= 0.15,
    );
    ok &= check(
        &format!(
            "c5: cylinder a_1 = {:.1e}, a_3 = {:.1e} below tolerance",
            reports[1].a, reports[3].a
        ),
        reports[1].a < 1e-8 && reports[3].a < 1e-8,
    );
    for k in 0..5 {
        let r = &reports[k];
        if r.ambiguous_with.is_none() {
            let fit = fit_law_coefficient(&r.law, &sweep.rows, k, sweep.spectrum0.eigenvalues[k]);
            let dev = (fit - r.law.coefficient).abs() / r.law.coefficient.abs();
            ok &= check(&format!("c5: cylinder k={k} law coefficient recovered (dev {dev:.3})"), dev <= 0.10);
        }
    }
    assert!(ok, "criterion 5 failed");
}

/// Criterion 6: eigenvalue spot values for the square and the capped cylinder.
#[test]
fn criterion_6_spot_eigenvalues() {
    let mut ok = true;
    let sp = planar_problem(Obstacle::square(2.0), 0.02).solve(0.0, 30, 10).unwrap();
    for (k, want) in [(1usize, 0.76), (3, 1.30), (8, 3.37)] {
        let got = sp.eigenvalues[k];
        ok &= check(
            &format!("c6: square mu_{k}(0) = {got:.4} vs {want} (2%)"),
            (got - want).abs() / want <= 0.02,
        );
    }
    let problem = axisym_problem(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 0.02);
    let sp0 = problem.solve(0.0, 30, 3).unwrap();
    for (k, want) in [(0usize, 0.78), (1, 1.47), (2, 1.96)] {
        let got = sp0.eigenvalues[k];
        ok &= check(
            &format!("c6: cylinder mu_{k}(0) = {got:.4} vs {want} (2%)"),
            (got - want).abs() / want <= 0.02,
        );
    }
    let sp1 = problem.solve(1.0, 30, 3).unwrap();
    for (k, want) in [(0usize, 1.70), (1, 1.95), (2, 2.27)] {
        let got = sp1.eigenvalues[k];
        ok &= check(
            &format!("c6: cylinder mu_{k}(1) = {got:.4} vs {want} (2%)"),
            (got - want).abs() / want <= 0.02,
        );
    }
    assert!(ok, "criterion 6 failed");
}

/// Criterion 7: far-field decay exponents and exponential envelopes.
#[test]
fn criterion_7_far_field() {
    let mut ok = true;
    let sp = planar_problem(Obstacle::square(2.0), 0.02).solve(0.0, 30, 10).unwrap();
    for (k, want) in [(1usize, -1.0), (3, -2.0), (8, 0.0)] {
        let radii = logspace(8.0, 40.0, 12);
        let pts: Vec<[f64; 2]> = radii.iter().map(|&r| [0.0, -r]).collect();
        let vals = extend_exterior(&sp, k, &pts).unwrap();
        let n = radii.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (r, v) in radii.iter().zip(&vals) {
            let (x, y) = (r.ln(), v.abs().max(1e-300).ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        ok &= check(
            &format!("c7: square k={k} far-field slope {slope:.3} vs {want} (+-0.15)"),
            (slope - want).abs() <= 0.15,
        );
    }
    let problem = axisym_problem(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 0.02);
    let sp = problem.solve(1.0, 30, 3).unwrap();
    let ray: Vec<[f64; 2]> = (0..10).map(|i| [0.0, 2.2 + 0.9 * i as f64]).collect();
    for k in 0..3 {
        let rep = decay_envelope_check(&sp, k, &ray).unwrap();
        ok &= check(
            &format!("c7: cylinder p=1 k={k} envelope respected (margin {:.2})", rep.margin),
            rep.pass,
        );
    }
    assert!(ok, "criterion 7 failed");
}

/// Criterion 8: FPT sphere exactness and the Monte Carlo oracle.
#[test]
fn criterion_8_fpt_sphere() {
    let mut ok = true;
    let inputs = FptInputs::sphere(1.0, 1.0, 1.0).unwrap();
    let t_grid = logspace(1e-3, 1e3, 61);
    let ell = 0.7;
    let u = pdf_u_longtime(&inputs, ell, &t_grid).unwrap();
    let h = pdf_hq_longtime(&inputs, &t_grid).unwrap();
    let s = survival_sq(&inputs, &t_grid).unwrap();
    let mut worst: f64 = 0.0;
    for (i, &t) in t_grid.iter().enumerate() {
        worst = worst.max((u.values[i] - u_sphere(1.0, 1.0, ell, t)).abs());
        worst = worst.max((h.values[i] - hq_sphere(1.0, 1.0, 1.0, t).unwrap()).abs());
        worst = worst.max((s.values[i] - sq_sphere(1.0, 1.0, 1.0, t).unwrap()).abs());
    }
    ok &= check(&format!("c8: sphere closed forms reproduced, worst abs dev {worst:.1e} <= 1e-8"), worst <= 1e-8);

    let s_inf = survival_sq_infinity(&inputs).unwrap();
    // complement: 1 - S(inf) = q/(1/L + q)
    let complement = 1.0 / (1.0 + 1.0);
    ok &= check(
        &format!("c8: S(inf) = {s_inf:.6}, complement q/(1/L+q) = {complement}"),
        (s_inf - (1.0 - complement)).abs() <= 1e-12,
    );

    let mc = mc_survival_sphere(1.0, 1.0, 1.0, McParams { walkers: 100_000, dt: 5e-6, seed: 2024 })
        .unwrap();
    let dev_sigma = (mc.fraction - s_inf).abs() / mc.sigma;
    ok &= check(
        &format!(
            "c8: MC escape {:.5} +- {:.5} vs S(inf) {:.5} ({dev_sigma:.2} sigma <= 3)",
            mc.fraction, mc.sigma, s_inf
        ),
        dev_sigma <= 3.0,
    );
    assert!(ok, "criterion 8 failed");
}

/// Criterion 9: structural invariants - validator, PSD TBC, orthonormality,
/// truncation-radius invariance, tracking overlap, determinism.
#[test]
fn criterion_9_structural_invariants() {
    let mut ok = true;

    // mesh validator invariants across a small family of domains/resolutions
    let cases: Vec<(DomainSpec, f64)> = vec![
        (DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap(), 0.11),
        (DomainSpec::planar_offset(Obstacle::Ellipse { a: 1.0, b: 0.4 }, 2.0, [0.1, 0.2]).unwrap(), 0.09),
        (DomainSpec::planar(Obstacle::square(1.6), 2.0).unwrap(), 0.13),
        (DomainSpec::planar(Obstacle::equilateral_triangle(2.2), 2.0).unwrap(), 0.07),
        (
            DomainSpec::planar(
                Obstacle::Polygon {
                    vertices: vec![[0.9, -0.8], [1.1, 0.3], [0.0, 1.0], [-1.2, 0.4], [-0.7, -0.9]],
                },
                2.0,
            )
            .unwrap(),
            0.1,
        ),
        (DomainSpec::axisym(Obstacle::Spheroid { r_eq: 0.6, z_pole: 1.2 }, 2.0, 0.15).unwrap(), 0.1),
        (DomainSpec::axisym(Obstacle::CappedCylinder { radius: 0.9, height: 1.7 }, 2.0, -0.1).unwrap(), 0.12),
    ];
    let mut mesh_ok = true;
    for (spec, h) in &cases {
        match build_mesh(spec, *h) {
            Ok(mesh) => {
                mesh_ok &= mesh.validate().is_ok();
                let angle = mesh.min_angle_deg();
                mesh_ok &= angle >= 20.0 - 1e-9;
            }
            Err(e) => {
                println!("mesh failure for {spec:?}: {e}");
                mesh_ok = false;
            }
        }
    }
    ok &= check("c9: mesh validator invariants on 7 domains", mesh_ok);

    // TBC positive semidefinite: random quadratic forms
    let problem = planar_problem(Obstacle::Disk { radius: 1.0 }, 0.1);
    let tbc = steklov::fem::tbc_matrix(&problem.mesh, FemMode::Planar, 0.4, 12).unwrap();
    let n = tbc.outer_nodes.len();
    let mut state = 0xABCDEFu64;
    let mut psd = true;
    for _ in 0..32 {
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
        psd &= q > -1e-10;
    }
    ok &= check("c9: TBC block positive semidefinite on random vectors", psd);

    // orthonormality of traces across acceptance domains
    let mut ortho: f64 = 0.0;
    for sp in [
        planar_problem(Obstacle::square(2.0), 0.05).solve(0.0, 24, 6).unwrap(),
        axisym_problem(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 0.05)
            .solve(0.3, 24, 6)
            .unwrap(),
    ] {
        for j in 0..sp.k_max() {
            for k in 0..=j {
                let want = if j == k { 1.0 } else { 0.0 };
                ortho = ortho.max((sp.trace_inner(j, k) - want).abs());
            }
        }
    }
    ok &= check(&format!("c9: trace orthonormality dev {ortho:.1e} <= 1e-8"), ortho <= 1e-8);

    // truncation-radius invariance: square with L = 2 vs 2.5
    let sp_l2 = planar_problem(Obstacle::square(2.0), 0.05).solve(0.0, 30, 9).unwrap();
    let spec25 = DomainSpec::planar(Obstacle::square(2.0), 2.5).unwrap();
    let prob25 = FemProblem::new(build_mesh(&spec25, 0.05).unwrap(), FemMode::Planar).unwrap();
    let sp_l25 = prob25.solve(0.0, 30, 9).unwrap();
    let mut worst_l: f64 = 0.0;
    for k in 1..9 {
        worst_l = worst_l
            .max((sp_l2.eigenvalues[k] - sp_l25.eigenvalues[k]).abs() / sp_l2.eigenvalues[k]);
    }
    ok &= check(&format!("c9: L-invariance worst rel {worst_l:.1e} <= 5e-3"), worst_l <= 5e-3);

    // sweep tracking overlap on the acceptance domains
    let grid = logspace(1e-4, 1e-2, 4);
    let mut overlap_min = 1.0f64;
    for problem in [
        planar_problem(Obstacle::Ellipse { a: 1.0, b: 0.5 }, 0.06),
        axisym_problem(Obstacle::Spheroid { r_eq: 0.5, z_pole: 1.0 }, 0.06),
    ] {
        let sweep = p_sweep(&problem, &grid, 24, 5).unwrap();
        for row in &sweep.rows {
            overlap_min = overlap_min.min(row.min_overlap);
        }
    }
    ok &= check(&format!("c9: sweep tracking overlap {overlap_min:.3} >= 0.9"), overlap_min >= 0.9);

    // determinism: identical solve twice from scratch, bit-identical exports
    let run = || -> (Vec<f64>, String) {
        let spec = DomainSpec::planar_offset(Obstacle::Ellipse { a: 1.0, b: 0.5 }, 2.0, [0.05, 0.1]).unwrap();
        let problem = FemProblem::new(build_mesh(&spec, 0.08).unwrap(), FemMode::Planar).unwrap();
        let sp = problem.solve(0.37, 18, 5).unwrap();
        (sp.eigenvalues.clone(), spectrum_csv(&sp))
    };
    let (e1, c1) = run();
    let (e2, c2) = run();
    ok &= check("c9: bit-identical eigenvalues and CSV on rerun", e1 == e2 && c1 == c2);

    // MC determinism under a fixed seed
    let m1 = mc_survival_sphere(1.0, 1.0, 0.5, McParams { walkers: 4000, dt: 1e-4, seed: 99 }).unwrap();
    let m2 = mc_survival_sphere(1.0, 1.0, 0.5, McParams { walkers: 4000, dt: 1e-4, seed: 99 }).unwrap();
    ok &= check("c9: MC bit-identical under fixed seed", m1.survived == m2.survived);

    assert!(ok, "criterion 9 failed");
}

/// Cross-check used by criterion 5's inputs: spectra behave across p like the
/// ball reference when the obstacle is the sphere (sanity anchor, cheap).
#[test]
fn sphere_anchor_for_3d_pipeline() {
    let problem = axisym_problem(Obstacle::Spheroid { r_eq: 1.0, z_pole: 1.0 }, 0.05);
    let ball = BallSpec::new(3, 1.0).unwrap();
    for p in [0.0, 0.04, 1.0] {
        let sp = problem.solve(p, 24, 4).unwrap();
        for k in 0..4 {
            let want = mu_exterior(ball, k, p).unwrap();
            let got = sp.eigenvalues[k];
            assert!(
                (got - want).abs() / want <= 6e-3,
                "sphere p={p} k={k}: {got} vs {want}"
            );
        }
    }
}

