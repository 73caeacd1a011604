//! Run configuration: CLI flags override config-file values override defaults.

use serde::{Deserialize, Serialize};
use steklov::geometry::{DomainSpec, Obstacle};
use steklov::special::{log_capacity, ShapeForCapacity};
use steklov::{Error, Result};

pub const DEFAULT_H_MAX: f64 = 0.02;
pub const DEFAULT_N_MAX: usize = 30;
pub const DEFAULT_L: f64 = 2.0;
pub const DEFAULT_K: usize = 10;

/// Serializable shape + solver parameters; unknown keys in a config file are
/// rejected, not ignored.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub shape: Option<String>,
    pub radius: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub side: Option<f64>,
    pub height: Option<f64>,
    pub r_eq: Option<f64>,
    pub z_pole: Option<f64>,
    pub vertices: Option<String>,
    pub offset_x: Option<f64>,
    pub offset_y: Option<f64>,
    pub offset_z: Option<f64>,
    pub l: Option<f64>,
    pub h_max: Option<f64>,
    pub n_max: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub p_grid: Option<String>,
    pub mode_m: Option<u32>,
    pub q: Option<f64>,
    pub ell: Option<f64>,
    pub diffusivity: Option<f64>,
    pub seed: Option<u64>,
    pub walkers: Option<u64>,
    pub dt: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub shape: String,
    pub spec: DomainSpec,
    pub l: f64,
    pub h_max: f64,
    pub n_max: usize,
    pub k: usize,
    pub p: f64,
    pub p_grid: Option<Vec<f64>>,
    pub mode_m: u32,
    pub q: f64,
    pub ell: f64,
    pub diffusivity: f64,
    pub seed: u64,
    pub walkers: u64,
    pub dt: f64,
    /// logarithmic capacity when the shape is one of the canonical four
    pub capacity: Option<f64>,
}

pub fn parse_vertices(text: &str) -> Result<Vec<[f64; 2]>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let mut it = pair.split(',');
            let x: f64 = it
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::domain(format!("bad vertex '{pair}'")))?;
            let y: f64 = it
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::domain(format!("bad vertex '{pair}'")))?;
            if it.next().is_some() {
                return Err(Error::domain(format!("vertex '{pair}' has extra components")));
            }
            Ok([x, y])
        })
        .collect()
}

/// "log:1e-6:1e-1:25" or "lin:0.1:1.0:10" or comma-separated values.
pub fn parse_p_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = |m: &str| Error::domain(format!("bad p grid '{text}': {m}"));
    match parts.as_slice() {
        [kind, a, b, n] if *kind == "log" || *kind == "lin" => {
            let a: f64 = a.parse().map_err(|_| bad("start"))?;
            let b: f64 = b.parse().map_err(|_| bad("end"))?;
            let n: usize = n.parse().map_err(|_| bad("count"))?;
            if n < 2 || !(a > 0.0) || !(b > a) {
                return Err(bad("need 0 < start < end and count >= 2"));
            }
            Ok((0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    if *kind == "log" {
                        a * (b / a).powf(t)
                    } else {
                        a + (b - a) * t
                    }
                })
                .collect())
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad("value")))
            .collect(),
        _ => Err(bad("expected log:start:end:count, lin:start:end:count, or a comma list")),
    }
}

/// Resolve the obstacle + domain from merged parameters.
pub fn build_run_config(merged: &FileConfig) -> Result<RunConfig> {
    let l = merged.l.unwrap_or(DEFAULT_L);
    let h_max = merged.h_max.unwrap_or(DEFAULT_H_MAX);
    let n_max = merged.n_max.unwrap_or(DEFAULT_N_MAX);
    let k = merged.k.unwrap_or(DEFAULT_K);
    if !(1..=256).contains(&n_max) {
        return Err(Error::domain(format!("n_max must lie in [1, 256], got {n_max}")));
    }
    if !(h_max > 0.0 && h_max < l / 4.0) {
        return Err(Error::domain(format!("h_max must lie in (0, L/4) = (0, {})", l / 4.0)));
    }
    let shape = merged
        .shape
        .clone()
        .ok_or_else(|| Error::domain("no shape given (--shape or config file)"))?;
    let off2 = [merged.offset_x.unwrap_or(0.0), merged.offset_y.unwrap_or(0.0)];
    let offz = merged.offset_z.unwrap_or(0.0);
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::domain(format!("shape '{shape}' requires --{name}")))
    };
    let (spec, capacity) = match shape.as_str() {
        "disk" => {
            let r = need(merged.radius, "radius")?;
            (
                DomainSpec::planar_offset(Obstacle::Disk { radius: r }, l, off2)?,
                Some(log_capacity(ShapeForCapacity::Disk { radius: r })?),
            )
        }
        "ellipse" => {
            let a = need(merged.a, "a")?;
            let b = need(merged.b, "b")?;
            (
                DomainSpec::planar_offset(Obstacle::Ellipse { a, b }, l, off2)?,
                Some(log_capacity(ShapeForCapacity::Ellipse { a, b })?),
            )
        }
        "square" => {
            let side = need(merged.side, "side")?;
            (
                DomainSpec::planar_offset(Obstacle::square(side), l, off2)?,
                Some(log_capacity(ShapeForCapacity::Square { side })?),
            )
        }
        "triangle" => {
            let side = need(merged.side, "side")?;
            (
                DomainSpec::planar_offset(Obstacle::equilateral_triangle(side), l, off2)?,
                Some(log_capacity(ShapeForCapacity::EquilateralTriangle { side })?),
            )
        }
        "polygon" => {
            let verts = parse_vertices(
                merged.vertices.as_deref().ok_or_else(|| Error::domain("polygon requires --vertices"))?,
            )?;
            (DomainSpec::planar_offset(Obstacle::Polygon { vertices: verts }, l, off2)?, None)
        }
        "sphere" => {
            let r = need(merged.radius, "radius")?;
            (DomainSpec::axisym(Obstacle::Spheroid { r_eq: r, z_pole: r }, l, offz)?, None)
        }
        "spheroid" => {
            let r_eq = need(merged.r_eq, "r-eq")?;
            let z_pole = need(merged.z_pole, "z-pole")?;
            (DomainSpec::axisym(Obstacle::Spheroid { r_eq, z_pole }, l, offz)?, None)
        }
        "cylinder" => {
            let r = need(merged.radius, "radius")?;
            let h = need(merged.height, "height")?;
            (DomainSpec::axisym(Obstacle::CappedCylinder { radius: r, height: h }, l, offz)?, None)
        }
        "rotated-polygon" => {
            let verts = parse_vertices(
                merged
                    .vertices
                    .as_deref()
                    .ok_or_else(|| Error::domain("rotated-polygon requires --vertices"))?,
            )?;
            (DomainSpec::axisym(Obstacle::RotatedPolygon { profile: verts }, l, offz)?, None)
        }
        other => return Err(Error::domain(format!("unknown shape '{other}'"))),
    };
    let p_grid = merged.p_grid.as_deref().map(parse_p_grid).transpose()?;
    Ok(RunConfig {
        shape,
        spec,
        l,
        h_max,
        n_max,
        k,
        p: merged.p.unwrap_or(0.0),
        p_grid,
        mode_m: merged.mode_m.unwrap_or(0),
        q: merged.q.unwrap_or(1.0),
        ell: merged.ell.unwrap_or(1.0),
        diffusivity: merged.diffusivity.unwrap_or(1.0),
        seed: merged.seed.unwrap_or(1),
        walkers: merged.walkers.unwrap_or(100_000),
        dt: merged.dt.unwrap_or(1e-5),
        capacity,
    })
}

/// merge: flag (Some) wins over file value wins over None.
pub fn merge(flags: FileConfig, file: Option<FileConfig>) -> FileConfig {
    let f = file.unwrap_or_default();
    macro_rules! pick {
        ($field:ident) => {
            flags.$field.or(f.$field)
        };
    }
    FileConfig {
        shape: pick!(shape),
        radius: pick!(radius),
        a: pick!(a),
        b: pick!(b),
        side: pick!(side),
        height: pick!(height),
        r_eq: pick!(r_eq),
        z_pole: pick!(z_pole),
        vertices: pick!(vertices),
        offset_x: pick!(offset_x),
        offset_y: pick!(offset_y),
        offset_z: pick!(offset_z),
        l: pick!(l),
        h_max: pick!(h_max),
        n_max: pick!(n_max),
        k: pick!(k),
        p: pick!(p),
        p_grid: pick!(p_grid),
        mode_m: pick!(mode_m),
        q: pick!(q),
        ell: pick!(ell),
        diffusivity: pick!(diffusivity),
        seed: pick!(seed),
        walkers: pick!(walkers),
        dt: pick!(dt),
    }
}
