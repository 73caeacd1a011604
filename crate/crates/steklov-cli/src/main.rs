//! `steklov` - command-line front end for the exterior Steklov toolkit:
//! meshing, eigensolves, p-sweeps, small-p classification, first-passage
//! curves, and the validation harness.
//!
//! Exit codes: 0 ok, 2 usage, 3 geometry, 4 solver, 5 tolerance failure.

// `!(x > 0.0)`-style guards reject NaN along with the sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use clap::{Args, Parser, Subcommand};
use config::{build_run_config, merge, FileConfig, RunConfig};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use steklov::asymptotics::{
    analyze_small_p, check_identities, fit_law_coefficient, p_sweep, AnalyzeOptions,
};
use steklov::fem::{spectrum_csv, spectrum_to_export, FemMode, FemProblem};
use steklov::first_passage::{
    mc_survival_sphere, pdf_hq_longtime, pdf_u_longtime, survival_sq, survival_sq_infinity,
    FptInputs, McParams,
};
use steklov::geometry::{build_mesh, read_mesh, write_mesh, Ambient, Obstacle};
use steklov::{Error, Result};

#[derive(Parser)]
#[command(name = "steklov", version, about = "Generalized exterior Steklov eigenproblem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ShapeArgs {
    /// disk | ellipse | square | triangle | polygon | sphere | spheroid | cylinder | rotated-polygon
    #[arg(long)]
    shape: Option<String>,
    /// radius (disk, sphere, cylinder)
    #[arg(long, visible_alias = "R")]
    radius: Option<f64>,
    /// first semi-axis (ellipse)
    #[arg(long)]
    a: Option<f64>,
    /// second semi-axis (ellipse)
    #[arg(long)]
    b: Option<f64>,
    /// side length (square, triangle)
    #[arg(long)]
    side: Option<f64>,
    /// axial height (cylinder)
    #[arg(long)]
    height: Option<f64>,
    /// equatorial radius (spheroid)
    #[arg(long = "r-eq")]
    r_eq: Option<f64>,
    /// polar semi-axis (spheroid)
    #[arg(long = "z-pole")]
    z_pole: Option<f64>,
    /// "x1,y1;x2,y2;..." (polygon, rotated-polygon profile)
    #[arg(long)]
    vertices: Option<String>,
    #[arg(long = "offset-x")]
    offset_x: Option<f64>,
    #[arg(long = "offset-y")]
    offset_y: Option<f64>,
    #[arg(long = "offset-z")]
    offset_z: Option<f64>,
    /// truncation radius L (default 2)
    #[arg(long = "L", visible_alias = "l")]
    l: Option<f64>,
    /// maximal mesh edge (default 0.02)
    #[arg(long = "h-max")]
    h_max: Option<f64>,
    /// transparent-boundary truncation order (default 30)
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// number of eigenpairs (default 10)
    #[arg(long)]
    k: Option<usize>,
    /// rate parameter p (default 0)
    #[arg(long)]
    p: Option<f64>,
    /// p grid: log:start:end:count | lin:start:end:count | v1,v2,...
    #[arg(long = "p-grid")]
    p_grid: Option<String>,
    /// azimuthal number m (axisymmetric domains; default 0)
    #[arg(long = "mode-m")]
    mode_m: Option<u32>,
    /// reactivity q (fpt; default 1)
    #[arg(long)]
    q: Option<f64>,
    /// boundary local-time threshold (fpt; default 1)
    #[arg(long)]
    ell: Option<f64>,
    /// diffusion coefficient (fpt; default 1)
    #[arg(long)]
    diffusivity: Option<f64>,
    /// RNG seed (fpt --mc; default 1)
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo walkers (default 100000)
    #[arg(long)]
    walkers: Option<u64>,
    /// Monte Carlo base step (default 1e-5)
    #[arg(long)]
    dt: Option<f64>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh and write the steklov-mesh v1 file
    Mesh {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the Steklov spectrum and export JSON (and optional CSV)
    Solve {
        #[command(flatten)]
        shape: ShapeArgs,
        /// read the mesh from a steklov-mesh v1 file instead of meshing
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sweep the rate parameter and emit tracked eigenvalue curves
    Sweep {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Small-p classification: coefficients, regimes, predicted laws
    Asympt {
        #[command(flatten)]
        shape: ShapeArgs,
        /// also sweep and report fitted coefficients
        #[arg(long)]
        fit: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// First-passage curves (3D); sphere Monte Carlo with --mc
    Fpt {
        #[command(flatten)]
        shape: ShapeArgs,
        /// run the Monte Carlo cross-check (sphere only)
        #[arg(long)]
        mc: bool,
        /// time grid, same syntax as --p-grid
        #[arg(long = "t-grid")]
        t_grid: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validation harness; nonzero exit when a tolerance fails
    Validate {
        /// reproduce the offset-disk reference table
        #[arg(long)]
        table1: bool,
        /// exact ball-spectrum identity suite
        #[arg(long)]
        identities: bool,
        #[arg(long = "h-max")]
        h_max: Option<f64>,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("STEKLOV_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Parse { .. } => 2,
        Error::Geometry(_) => 3,
        Error::Mesh(_) | Error::Solver(_) | Error::Truncation(_) | Error::Overflow(_) | Error::Io(_) => 4,
        Error::Tolerance(_) => 5,
    }
}

fn merged_params(args: &ShapeArgs) -> Result<FileConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let parsed: FileConfig = serde_json::from_str(&text)
                .map_err(|e| Error::domain(format!("config file: {e}")))?;
            Some(parsed)
        }
        None => None,
    };
    let flags = FileConfig {
        shape: args.shape.clone(),
        radius: args.radius,
        a: args.a,
        b: args.b,
        side: args.side,
        height: args.height,
        r_eq: args.r_eq,
        z_pole: args.z_pole,
        vertices: args.vertices.clone(),
        offset_x: args.offset_x,
        offset_y: args.offset_y,
        offset_z: args.offset_z,
        l: args.l,
        h_max: args.h_max,
        n_max: args.n_max,
        k: args.k,
        p: args.p,
        p_grid: args.p_grid.clone(),
        mode_m: args.mode_m,
        q: args.q,
        ell: args.ell,
        diffusivity: args.diffusivity,
        seed: args.seed,
        walkers: args.walkers,
        dt: args.dt,
    };
    Ok(merge(flags, file))
}

fn load_config(args: &ShapeArgs) -> Result<RunConfig> {
    build_run_config(&merged_params(args)?)
}

fn provenance(cfg: &RunConfig) -> String {
    format!(
        "# steklov v{}\n# config: {}\n",
        env!("CARGO_PKG_VERSION"),
        serde_json::to_string(cfg).unwrap_or_default()
    )
}

fn fem_mode(cfg: &RunConfig) -> FemMode {
    match cfg.spec.ambient {
        Ambient::Planar2d => FemMode::Planar,
        Ambient::Axisym3d => FemMode::Axisym { m: cfg.mode_m },
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mesh { shape, out } => {
            let cfg = load_config(&shape)?;
            let mesh = build_mesh(&cfg.spec, cfg.h_max)?;
            // the mesh format has no comment syntax; provenance goes to stderr
            std::fs::write(&out, write_mesh(&mesh))?;
            eprintln!(
                "mesh: {} nodes, {} triangles, min angle {:.2} deg -> {}",
                mesh.nodes.len(),
                mesh.triangles.len(),
                mesh.min_angle_deg(),
                out.display()
            );
            Ok(())
        }
        Command::Solve { shape, mesh, out, csv } => {
            // a mesh file is the import path for user geometries; the shape
            // flags are then optional and only the solver knobs apply
            let (m, cfg_json, p, n_max, k, mode_m) = match &mesh {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let m = read_mesh(&text)?;
                    let merged = merged_params(&shape)?;
                    let n_max = merged.n_max.unwrap_or(config::DEFAULT_N_MAX);
                    if !(1..=256).contains(&n_max) {
                        return Err(Error::domain(format!("n_max must lie in [1, 256], got {n_max}")));
                    }
                    let cfg_json = serde_json::json!({
                        "mesh_file": path.display().to_string(),
                        "p": merged.p.unwrap_or(0.0),
                        "n_max": n_max,
                        "k": merged.k.unwrap_or(config::DEFAULT_K),
                        "mode_m": merged.mode_m.unwrap_or(0),
                    });
                    (
                        m,
                        cfg_json,
                        merged.p.unwrap_or(0.0),
                        n_max,
                        merged.k.unwrap_or(config::DEFAULT_K),
                        merged.mode_m.unwrap_or(0),
                    )
                }
                None => {
                    let cfg = load_config(&shape)?;
                    let m = build_mesh(&cfg.spec, cfg.h_max)?;
                    let json = serde_json::to_value(&cfg).unwrap_or_default();
                    (m, json, cfg.p, cfg.n_max, cfg.k, cfg.mode_m)
                }
            };
            let mode = match m.ambient {
                Ambient::Planar2d => FemMode::Planar,
                Ambient::Axisym3d => FemMode::Axisym { m: mode_m },
            };
            let problem = FemProblem::new(m, mode)?;
            let sp = problem.solve(p, n_max, k)?;
            let export = spectrum_to_export(&sp);
            let doc = serde_json::json!({
                "provenance": {"version": env!("CARGO_PKG_VERSION"), "config": cfg_json},
                "spectrum": export,
            });
            std::fs::write(&out, serde_json::to_string_pretty(&doc).unwrap())?;
            if let Some(csv_path) = csv {
                let mut text = format!(
                    "# steklov v{}\n# config: {}\n",
                    env!("CARGO_PKG_VERSION"),
                    serde_json::to_string(&cfg_json).unwrap_or_default()
                );
                text.push_str(&spectrum_csv(&sp));
                std::fs::write(csv_path, text)?;
            }
            for (kk, mu) in sp.eigenvalues.iter().enumerate() {
                println!("mu_{kk} = {mu:.8}");
            }
            Ok(())
        }
        Command::Sweep { shape, out } => {
            let cfg = load_config(&shape)?;
            let grid = cfg
                .p_grid
                .clone()
                .ok_or_else(|| Error::domain("sweep requires --p-grid"))?;
            let mesh = build_mesh(&cfg.spec, cfg.h_max)?;
            let problem = FemProblem::new(mesh, fem_mode(&cfg))?;
            let sweep = p_sweep(&problem, &grid, cfg.n_max, cfg.k)?;
            let reports = analyze_small_p(&sweep.spectrum0, AnalyzeOptions { capacity: cfg.capacity })?;
            let mut text = provenance(&cfg);
            text.push_str("p,k,mu,mu0,delta,predicted_delta,min_overlap\n");
            for row in &sweep.rows {
                for (k, &mu) in row.mu.iter().enumerate() {
                    let mu0 = sweep.spectrum0.eigenvalues[k];
                    let pred = reports[k].law.predict_delta(row.p);
                    let _ = writeln!(
                        text,
                        "{:.10e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.3}",
                        row.p,
                        k,
                        mu,
                        mu0,
                        mu - mu0,
                        pred,
                        row.min_overlap
                    );
                }
            }
            std::fs::write(&out, text)?;
            if sweep.ambiguous_tracking {
                eprintln!("warning: branch tracking overlap dropped below 0.9");
            }
            Ok(())
        }
        Command::Asympt { shape, fit, out } => {
            let cfg = load_config(&shape)?;
            let mesh = build_mesh(&cfg.spec, cfg.h_max)?;
            let problem = FemProblem::new(mesh, fem_mode(&cfg))?;
            let reports = if fit {
                let grid = cfg
                    .p_grid
                    .clone()
                    .unwrap_or_else(|| config::parse_p_grid("log:1e-6:1e-3:12").unwrap());
                let sweep = p_sweep(&problem, &grid, cfg.n_max, cfg.k)?;
                let mut reports =
                    analyze_small_p(&sweep.spectrum0, AnalyzeOptions { capacity: cfg.capacity })?;
                for (k, rep) in reports.iter_mut().enumerate() {
                    rep.fit =
                        Some(fit_law_coefficient(&rep.law, &sweep.rows, k, sweep.spectrum0.eigenvalues[k]));
                }
                reports
            } else {
                let sp = problem.solve(0.0, cfg.n_max, cfg.k)?;
                analyze_small_p(&sp, AnalyzeOptions { capacity: cfg.capacity })?
            };
            let doc = serde_json::json!({
                "provenance": {"version": env!("CARGO_PKG_VERSION"), "config": &cfg},
                "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
            });
            std::fs::write(&out, serde_json::to_string_pretty(&doc).unwrap())?;
            for r in &reports {
                println!(
                    "k={} mu0={:.6} regime={:?} a={:.4e} b={} c={:.4e} d={:.4e}",
                    r.k,
                    r.mu0,
                    r.regime,
                    r.a,
                    if r.b.is_finite() { format!("{:.4e}", r.b) } else { "inf".into() },
                    r.c,
                    r.d_coeff
                );
            }
            Ok(())
        }
        Command::Fpt { shape, mc, t_grid, out } => {
            let cfg = load_config(&shape)?;
            let t_grid = match t_grid {
                Some(g) => config::parse_p_grid(&g)?,
                None => config::parse_p_grid("log:1e-3:1e3:61")?,
            };
            let inputs = match (&cfg.spec.obstacle, cfg.spec.ambient) {
                (Obstacle::Spheroid { r_eq, z_pole }, _) if (r_eq - z_pole).abs() < 1e-14 => {
                    FptInputs::sphere(*r_eq, cfg.diffusivity, cfg.q)?
                }
                (_, Ambient::Axisym3d) => {
                    let mesh = build_mesh(&cfg.spec, cfg.h_max)?;
                    let problem = FemProblem::new(mesh, FemMode::Axisym { m: 0 })?;
                    let sp = problem.solve(0.0, cfg.n_max, cfg.k)?;
                    let reports = analyze_small_p(&sp, AnalyzeOptions::default())?;
                    // start at the "north" end of the Steklov boundary
                    let x0 = sp.problem.mesh.nodes[*sp.inner_nodes.last().unwrap()];
                    FptInputs::from_spectrum(&sp, &reports, x0, cfg.diffusivity, cfg.q)?
                }
                _ => {
                    return Err(Error::domain(
                        "fpt requires a 3D (axisymmetric) shape; 2D expansions are not derived",
                    ))
                }
            };
            let u = pdf_u_longtime(&inputs, cfg.ell, &t_grid)?;
            let h = pdf_hq_longtime(&inputs, &t_grid)?;
            let s = survival_sq(&inputs, &t_grid)?;
            let s_inf = survival_sq_infinity(&inputs)?;
            let mut text = provenance(&cfg);
            let _ = writeln!(text, "# S_infinity = {s_inf:.12}");
            text.push_str("t,U,Hq,Sq\n");
            for (i, &t) in t_grid.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{:.10e},{:.17e},{:.17e},{:.17e}",
                    t, u.values[i], h.values[i], s.values[i]
                );
            }
            std::fs::write(&out, text)?;
            println!("S(infinity) = {s_inf:.6}");
            if mc {
                let (radius, is_sphere) = match &cfg.spec.obstacle {
                    Obstacle::Spheroid { r_eq, z_pole } if (r_eq - z_pole).abs() < 1e-14 => {
                        (*r_eq, true)
                    }
                    _ => (0.0, false),
                };
                if !is_sphere {
                    return Err(Error::domain("--mc is implemented for the sphere geometry only"));
                }
                let res = mc_survival_sphere(
                    radius,
                    cfg.diffusivity,
                    cfg.q,
                    McParams { walkers: cfg.walkers, dt: cfg.dt, seed: cfg.seed },
                )?;
                println!(
                    "MC escape fraction = {:.6} +- {:.6} ({} walkers, dt = {:.1e}, seed = {})",
                    res.fraction, res.sigma, res.walkers, cfg.dt, cfg.seed
                );
                let dev = (res.fraction - s_inf).abs();
                if dev > 4.0 * res.sigma + 1e-3 {
                    return Err(Error::Tolerance(format!(
                        "MC escape fraction {:.5} deviates from S(inf) {:.5} by {dev:.2e}",
                        res.fraction, s_inf
                    )));
                }
            }
            Ok(())
        }
        Command::Validate { table1, identities, h_max, n_max } => {
            let mut failed = false;
            if identities || !table1 {
                failed |= !run_identity_suite()?;
            }
            if table1 {
                failed |= !run_table1(h_max.unwrap_or(0.01), n_max.unwrap_or(30))?;
            }
            if failed {
                return Err(Error::Tolerance("validation failed".into()));
            }
            Ok(())
        }
    }
}

fn report_json(r: &steklov::asymptotics::SmallPReport) -> serde_json::Value {
    serde_json::json!({
        "k": r.k,
        "regime": format!("{:?}", r.regime),
        "ambiguous_with": r.ambiguous_with.map(|a| format!("{a:?}")),
        "mu0": r.mu0,
        "c": r.c,
        "d": r.d_coeff,
        "d_identity": r.d_coeff_identity,
        "a": r.a,
        "b": if r.b.is_finite() { Some(r.b) } else { None },
        "b_tail_remainder": r.b_tail_remainder,
        "boundary_integral": r.boundary_integral,
        "law_coefficient": r.law.coefficient,
        "fit": r.fit,
    })
}

/// Exact-oracle identity suite on the ball spectrum plus a quick FEM
/// identity check (runs in seconds).
fn run_identity_suite() -> Result<bool> {
    use steklov::ball::{mu_exterior, mu_exterior_gap, mu_interior, q_norm, BallSpec};
    use steklov::special::{bessel_i_scaled, bessel_k_scaled_ext, BesselOrder};
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("[{}] {}", if pass { "PASS" } else { "FAIL" }, name);
        ok &= pass;
    };
    // dp mu = Q by finite differences, all d
    let mut worst: f64 = 0.0;
    for d in 2..=5u32 {
        let ball = BallSpec::new(d, 1.0).unwrap();
        for n in [0usize, 1, 2, 5] {
            for p in [1e-3, 0.1, 1.0] {
                let h = 1e-6 * p;
                let fd =
                    (mu_exterior_gap(ball, n, p + h)? - mu_exterior_gap(ball, n, p - h)?) / (2.0 * h);
                let q = q_norm(ball, n, p)?;
                worst = worst.max((fd - q).abs() / q.abs());
            }
        }
    }
    check(&format!("dp mu = |V|^2 (worst rel {worst:.2e})"), worst < 1e-6);
    // Wronskian
    let mut worst_w: f64 = 0.0;
    for twice in [0, 1, 2, 5, 9] {
        for z in [1e-4, 0.1, 3.0, 40.0, 100.0] {
            let nu = BesselOrder::from_twice(twice);
            let nup = BesselOrder::from_twice(twice + 2);
            let i0 = bessel_i_scaled(nu, z)?;
            let i1 = bessel_i_scaled(nup, z)?;
            let k0 = bessel_k_scaled_ext(nu, z)?.to_f64().unwrap_or(f64::INFINITY);
            let k1 = bessel_k_scaled_ext(nup, z)?.to_f64().unwrap_or(f64::INFINITY);
            if k0.is_finite() && k1.is_finite() {
                worst_w = worst_w.max(((i0 * k1 + i1 * k0) - 1.0 / z).abs() * z);
            }
        }
    }
    check(&format!("Wronskian (worst rel {worst_w:.2e})"), worst_w < 1e-11);
    // sqrt(p) bounds
    let mut bound_ok = true;
    for d in 3..=5u32 {
        let ball = BallSpec::new(d, 0.7).unwrap();
        for n in [0usize, 1, 4] {
            for p in [1e-4, 0.01, 1.0, 9.0] {
                let gap = mu_exterior(ball, n, p)? - mu_exterior(ball, n, 0.0)?;
                bound_ok &= gap >= -1e-12 && gap <= p.sqrt() + 1e-10;
                let gap_i = mu_interior(ball, n, p)? - mu_interior(ball, n, 0.0)?;
                bound_ok &= gap_i <= p.sqrt() + 1e-10;
            }
        }
    }
    check("sqrt(p) eigenvalue bounds (d >= 3 exterior, all d interior)", bound_ok);
    // small-p laws
    let mut law_ok = true;
    for (d, n) in [(2u32, 0usize), (2, 1), (2, 3), (3, 0), (3, 2), (4, 0), (5, 0)] {
        let ball = BallSpec::new(d, 1.0).unwrap();
        let law = steklov::ball::small_p_law(ball, n);
        let p = 1e-8;
        let mu = mu_exterior(ball, n, p)?;
        let pred = law.predict(p);
        let lead = (pred - law.mu0).abs().max(1e-300);
        law_ok &= (mu - pred).abs() / lead < 0.02;
    }
    check("small-p asymptotic laws reached at p = 1e-8", law_ok);
    // FEM identities on a coarse disk
    {
        use steklov::geometry::DomainSpec;
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0)?;
        let mesh = build_mesh(&spec, 0.08)?;
        let problem = FemProblem::new(mesh, FemMode::Planar)?;
        let rep = check_identities(&problem, 1e-2, 16, 4)?;
        let worst = rep
            .identity1
            .iter()
            .chain(&rep.rayleigh)
            .chain(&rep.dmu)
            .fold(0.0_f64, |m, &v| m.max(v));
        check(&format!("FEM identities on the disk (worst rel {worst:.2e})"), worst < 1e-3);
    }
    Ok(ok)
}

/// Offset-disk reference table at the requested resolution.
fn run_table1(h_max: f64, n_max: usize) -> Result<bool> {
    use steklov::fem::validate_against_ball;
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("[{}] {}", if pass { "PASS" } else { "FAIL" }, name);
        ok &= pass;
    };
    let rep0 = validate_against_ball(2, 1.0, [0.0, 0.25], 2.0, h_max, n_max, 0.0, 11)?;
    check(
        &format!("p=0: mu_0 = {:.2e} <= 1e-8", rep0.modes[0].mu_fem.abs()),
        rep0.modes[0].mu_fem.abs() <= 1e-8,
    );
    let worst = rep0.modes[1..].iter().map(|m| m.rel_err).fold(0.0, f64::max);
    check(&format!("p=0: worst eigenvalue rel err {worst:.2e} <= 2e-3"), worst <= 2e-3);
    let worst_rmse = rep0.modes.iter().map(|m| m.rmse).fold(0.0, f64::max);
    check(&format!("p=0: worst trace RMSE {worst_rmse:.4} <= 0.012"), worst_rmse <= 0.012);
    let rep1 = validate_against_ball(2, 1.0, [0.0, 0.25], 2.0, h_max, n_max, 1.0, 11)?;
    let mu0_err = (rep1.modes[0].mu_fem - 1.4296).abs();
    check(&format!("p=1: |mu_0 - 1.4296| = {mu0_err:.2e} <= 1e-3"), mu0_err <= 1e-3);
    let mu9_err = (rep1.modes[9].mu_fem - 5.1225).abs();
    check(&format!("p=1: |mu_9 - 5.1225| = {mu9_err:.2e} <= 3e-3"), mu9_err <= 3e-3);
    Ok(ok)
}
