//! The "steklov-mesh v1" text format.
//!
//! ```text
//! steklov-mesh v1 planar2d
//! nodes N
//! <x> <y>          (N lines, 17 significant digits)
//! tris M
//! <i> <j> <k>      (M lines)
//! bedges K
//! <i> <j> TAG      (K lines, TAG in INNER|OUTER|AXIS)
//! h_max <h>
//! l <L>
//! ```

use crate::error::{Error, Result};
use crate::geometry::domain::Ambient;
use crate::geometry::mesh::{BoundaryTag, Mesh};
use std::fmt::Write as _;

pub fn write_mesh(mesh: &Mesh) -> String {
    let ambient = match mesh.ambient {
        Ambient::Planar2d => "planar2d",
        Ambient::Axisym3d => "axisym3d",
    };
    let mut out = String::new();
    let _ = writeln!(out, "steklov-mesh v1 {ambient}");
    let _ = writeln!(out, "nodes {}", mesh.nodes.len());
    for p in &mesh.nodes {
        let _ = writeln!(out, "{:.16e} {:.16e}", p[0], p[1]);
    }
    let _ = writeln!(out, "tris {}", mesh.triangles.len());
    for t in &mesh.triangles {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "bedges {}", mesh.boundary_edges.len());
    for (a, b, tag) in &mesh.boundary_edges {
        let _ = writeln!(out, "{} {} {}", a, b, tag.as_str());
    }
    let _ = writeln!(out, "h_max {:.16e}", mesh.h_max);
    let _ = writeln!(out, "l {:.16e}", mesh.l);
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().enumerate();
    let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
    let mut next_line = |what: &str| -> Result<(usize, &str)> {
        for (i, raw) in lines.by_ref() {
            let t = raw.trim();
            if !t.is_empty() {
                return Ok((i, t));
            }
        }
        Err(Error::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") })
    };

    let (i, header) = next_line("header")?;
    let mut hp = header.split_whitespace();
    if hp.next() != Some("steklov-mesh") || hp.next() != Some("v1") {
        return Err(perr(i, "expected header 'steklov-mesh v1 <ambient>'"));
    }
    let ambient = match hp.next() {
        Some("planar2d") => Ambient::Planar2d,
        Some("axisym3d") => Ambient::Axisym3d,
        _ => return Err(perr(i, "ambient must be planar2d or axisym3d")),
    };

    let (i, decl) = next_line("nodes count")?;
    let n_nodes = parse_count(decl, "nodes").ok_or_else(|| perr(i, "expected 'nodes N'"))?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (i, l) = next_line("node coordinates")?;
        let mut it = l.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(i, "bad node x coordinate"))?;
        let y: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(i, "bad node y coordinate"))?;
        if it.next().is_some() {
            return Err(perr(i, "trailing tokens on node line"));
        }
        nodes.push([x, y]);
    }

    let (i, decl) = next_line("tris count")?;
    let n_tris = parse_count(decl, "tris").ok_or_else(|| perr(i, "expected 'tris M'"))?;
    let mut triangles = Vec::with_capacity(n_tris);
    for _ in 0..n_tris {
        let (i, l) = next_line("triangle")?;
        let idx: Vec<usize> = l.split_whitespace().map(|s| s.parse().ok()).collect::<Option<_>>()
            .ok_or_else(|| perr(i, "bad triangle indices"))?;
        if idx.len() != 3 {
            return Err(perr(i, "triangle line must have 3 indices"));
        }
        triangles.push([idx[0], idx[1], idx[2]]);
    }

    let (i, decl) = next_line("bedges count")?;
    let n_be = parse_count(decl, "bedges").ok_or_else(|| perr(i, "expected 'bedges K'"))?;
    let mut boundary_edges = Vec::with_capacity(n_be);
    for _ in 0..n_be {
        let (i, l) = next_line("boundary edge")?;
        let mut it = l.split_whitespace();
        let a: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(i, "bad boundary edge index"))?;
        let b: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(i, "bad boundary edge index"))?;
        let tag = it
            .next()
            .and_then(BoundaryTag::parse)
            .ok_or_else(|| perr(i, "bad boundary tag (INNER|OUTER|AXIS)"))?;
        boundary_edges.push((a, b, tag));
    }

    let (i, l) = next_line("h_max")?;
    let h_max = l
        .strip_prefix("h_max")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| perr(i, "expected 'h_max <value>'"))?;
    let (i, l) = next_line("l")?;
    let l_val = l
        .strip_prefix("l")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| perr(i, "expected 'l <value>'"))?;

    let mesh = Mesh { ambient, nodes, triangles, boundary_edges, h_max, l: l_val };
    mesh.validate()?;
    Ok(mesh)
}

fn parse_count(line: &str, keyword: &str) -> Option<usize> {
    let mut it = line.split_whitespace();
    if it.next() != Some(keyword) {
        return None;
    }
    let n = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some(n)
}
