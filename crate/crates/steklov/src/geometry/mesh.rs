//! Triangle mesh of the annular computational domain, boundary tagging,
//! validation, and boundary arclength ordering.

use crate::error::{Error, Result};
use crate::geometry::domain::Ambient;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Steklov boundary (the obstacle surface).
    Inner,
    /// Truncation sphere/circle carrying the transparent boundary condition.
    Outer,
    /// Symmetry axis r = 0 (axisymmetric meshes only).
    Axis,
}

impl BoundaryTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryTag::Inner => "INNER",
            BoundaryTag::Outer => "OUTER",
            BoundaryTag::Axis => "AXIS",
        }
    }

    pub fn parse(s: &str) -> Option<BoundaryTag> {
        match s {
            "INNER" => Some(BoundaryTag::Inner),
            "OUTER" => Some(BoundaryTag::Outer),
            "AXIS" => Some(BoundaryTag::Axis),
            _ => None,
        }
    }
}

/// Conforming triangulation of Omega_L with tagged boundary edges.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub ambient: Ambient,
    pub nodes: Vec<[f64; 2]>,
    /// Positively oriented triangles (counterclockwise node triples).
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<(usize, usize, BoundaryTag)>,
    /// Maximal edge length actually present.
    pub h_max: f64,
    /// Truncation radius (all OUTER nodes lie on |x| = l).
    pub l: f64,
}

impl Mesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn nodes_with_tag(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for &(a, b, t) in &self.boundary_edges {
            if t == tag {
                for n in [a, b] {
                    if !seen[n] {
                        seen[n] = true;
                        out.push(n);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Minimal interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut min = 180.0_f64;
        for t in &self.triangles {
            min = min.min(triangle_min_angle_deg(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]));
        }
        min
    }

    /// Check every structural invariant; returns a descriptive error on the
    /// first violation.
    pub fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        let eps_dup = 1e-12 * self.l;
        // duplicate nodes (grid hash)
        let cell = (4.0 * eps_dup).max(1e-300);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in self.nodes.iter().enumerate() {
            let key = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(key.0 + dx, key.1 + dy)) {
                        for &j in list {
                            let q = self.nodes[j];
                            if (p[0] - q[0]).hypot(p[1] - q[1]) < eps_dup {
                                return Err(Error::Mesh(format!("duplicate nodes {j} and {i}")));
                            }
                        }
                    }
                }
            }
            grid.entry(key).or_default().push(i);
        }
        // orientation and angles
        for (t, tri) in self.triangles.iter().enumerate() {
            for &n in tri {
                if n >= self.nodes.len() {
                    return Err(Error::Mesh(format!("triangle {t} references missing node {n}")));
                }
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::Mesh(format!("triangle {t} not positively oriented")));
            }
        }
        let min_angle = self.min_angle_deg();
        if min_angle < 20.0 - 1e-6 {
            return Err(Error::Mesh(format!("minimum triangle angle {min_angle:.3} deg below 20 deg")));
        }
        // conformity: edge -> triangle count
        let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        for (&key, &c) in &edge_count {
            if c > 2 {
                return Err(Error::Mesh(format!("edge {key:?} shared by {c} > 2 triangles")));
            }
        }
        let mut btags: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for &(a, b, tag) in &self.boundary_edges {
            let key = (a.min(b), a.max(b));
            if btags.insert(key, tag).is_some() {
                return Err(Error::Mesh(format!("boundary edge {key:?} listed twice")));
            }
            match edge_count.get(&key) {
                Some(1) => {}
                Some(c) => {
                    return Err(Error::Mesh(format!(
                        "boundary edge {key:?} belongs to {c} triangles, expected 1"
                    )))
                }
                None => return Err(Error::Mesh(format!("boundary edge {key:?} not in triangulation"))),
            }
        }
        // every triangle edge used once must be a tagged boundary edge
        for (&key, &c) in &edge_count {
            if c == 1 && !btags.contains_key(&key) {
                return Err(Error::Mesh(format!("untagged boundary edge {key:?}")));
            }
        }
        if !self.boundary_edges.iter().any(|&(_, _, t)| t == BoundaryTag::Inner) {
            return Err(Error::Mesh("mesh has no INNER (Steklov) boundary".into()));
        }
        // outer nodes on the truncation circle
        let tol_outer = 1e-10 * self.l;
        for n in self.nodes_with_tag(BoundaryTag::Outer) {
            let p = self.nodes[n];
            let r = p[0].hypot(p[1]);
            if (r - self.l).abs() > tol_outer {
                return Err(Error::Mesh(format!("OUTER node {n} at radius {r} != L = {}", self.l)));
            }
        }
        // edge lengths
        let mut h = 0.0_f64;
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (self.nodes[tri[k]], self.nodes[tri[(k + 1) % 3]]);
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        if h > self.h_max * (1.0 + 1e-9) {
            return Err(Error::Mesh(format!("edge of length {h} exceeds recorded h_max {}", self.h_max)));
        }
        // INNER topology
        self.check_inner_topology()?;
        if self.ambient == Ambient::Axisym3d {
            for (i, p) in self.nodes.iter().enumerate() {
                if p[0] < -1e-14 {
                    return Err(Error::Mesh(format!("axisym node {i} has r = {} < 0", p[0])));
                }
            }
            for &(a, b, tag) in &self.boundary_edges {
                if tag == BoundaryTag::Axis {
                    for n in [a, b] {
                        if self.nodes[n][0].abs() > 1e-10 * self.l {
                            return Err(Error::Mesh(format!("AXIS node {n} off the axis")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_inner_topology(&self) -> Result<()> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b, tag) in &self.boundary_edges {
            if tag == BoundaryTag::Inner {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
        match self.ambient {
            Ambient::Planar2d => {
                // single closed loop: every node has degree 2 and it is connected
                for (n, nb) in &adj {
                    if nb.len() != 2 {
                        return Err(Error::Mesh(format!("INNER node {n} has degree {}", nb.len())));
                    }
                }
                let start = *adj.keys().next().unwrap();
                let mut visited = 1;
                let mut prev = start;
                let mut cur = adj[&start][0];
                while cur != start {
                    let nb = &adj[&cur];
                    let next = if nb[0] == prev { nb[1] } else { nb[0] };
                    prev = cur;
                    cur = next;
                    visited += 1;
                    if visited > adj.len() {
                        return Err(Error::Mesh("INNER loop does not close".into()));
                    }
                }
                if visited != adj.len() {
                    return Err(Error::Mesh("INNER boundary is not a single loop".into()));
                }
            }
            Ambient::Axisym3d => {
                // open chain, endpoints on the axis
                let mut ends = Vec::new();
                for (n, nb) in &adj {
                    match nb.len() {
                        1 => ends.push(*n),
                        2 => {}
                        d => return Err(Error::Mesh(format!("INNER node {n} has degree {d}"))),
                    }
                }
                if ends.len() != 2 {
                    return Err(Error::Mesh(format!("INNER chain has {} endpoints, expected 2", ends.len())));
                }
                for n in ends {
                    if self.nodes[n][0].abs() > 1e-10 * self.l {
                        return Err(Error::Mesh(format!("INNER chain endpoint {n} not on the axis")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Ordered boundary walk with cumulative arclength.
    ///
    /// 2D loops start at the node nearest polar angle -pi (the direction
    /// (-1, 0)) and run counterclockwise; axisym chains run south to north.
    /// For closed loops `total` includes the closing edge.
    pub fn boundary_arclength(&self, tag: BoundaryTag) -> Result<BoundaryWalk> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b, t) in &self.boundary_edges {
            if t == tag {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
        if adj.is_empty() {
            return Err(Error::Mesh(format!("no boundary edges with tag {}", tag.as_str())));
        }
        let ends: Vec<usize> = adj.iter().filter(|(_, nb)| nb.len() == 1).map(|(n, _)| *n).collect();
        let mut order = Vec::with_capacity(adj.len());
        if ends.is_empty() {
            // closed loop: start near angle -pi, walk, then fix orientation;
            // ties break on the node index so reruns stay bit-identical
            let start = *adj
                .keys()
                .min_by(|&&a, &&b| {
                    let ang = |n: usize| {
                        let p = self.nodes[n];
                        // distance of atan2 from +-pi
                        (PI - p[1].atan2(p[0]).abs()).abs()
                    };
                    (ang(a), a).partial_cmp(&(ang(b), b)).unwrap()
                })
                .unwrap();
            order.push(start);
            let mut prev = start;
            let mut cur = adj[&start][0];
            while cur != start {
                order.push(cur);
                let nb = &adj[&cur];
                let next = if nb[0] == prev { nb[1] } else { nb[0] };
                prev = cur;
                cur = next;
            }
            // counterclockwise: positive signed area of the loop
            let pts: Vec<[f64; 2]> = order.iter().map(|&n| self.nodes[n]).collect();
            if crate::geometry::domain::signed_area(&pts) < 0.0 {
                order[1..].reverse();
            }
        } else {
            // open chain: south (smallest z) end first, index tie-break
            let start = *ends
                .iter()
                .min_by(|&&a, &&b| {
                    (self.nodes[a][1], a).partial_cmp(&(self.nodes[b][1], b)).unwrap()
                })
                .unwrap();
            order.push(start);
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let nb = &adj[&cur];
                let next = nb.iter().copied().find(|&n| n != prev);
                match next {
                    Some(n) => {
                        order.push(n);
                        prev = cur;
                        cur = n;
                        if adj[&n].len() == 1 {
                            break;
                        }
                    }
                    None => break,
                }
            }
        }
        let closed = ends.is_empty();
        let mut arclen = Vec::with_capacity(order.len());
        arclen.push(0.0);
        for w in order.windows(2) {
            let (a, b) = (self.nodes[w[0]], self.nodes[w[1]]);
            arclen.push(arclen.last().unwrap() + (a[0] - b[0]).hypot(a[1] - b[1]));
        }
        let mut total = *arclen.last().unwrap();
        if closed {
            let (a, b) = (self.nodes[*order.last().unwrap()], self.nodes[order[0]]);
            total += (a[0] - b[0]).hypot(a[1] - b[1]);
        }
        Ok(BoundaryWalk { nodes: order, arclength: arclen, total, closed })
    }
}

/// Result of [Mesh::boundary_arclength].
#[derive(Clone, Debug)]
pub struct BoundaryWalk {
    pub nodes: Vec<usize>,
    /// Cumulative arclength at each node, starting at 0.
    pub arclength: Vec<f64>,
    /// Total boundary length (including the closing edge for loops).
    pub total: f64,
    pub closed: bool,
}

pub(crate) fn triangle_min_angle_deg(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let la = (b[0] - c[0]).hypot(b[1] - c[1]);
    let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
    let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
    let angle = |opp: f64, s1: f64, s2: f64| {
        let cos = ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0);
        cos.acos().to_degrees()
    };
    angle(la, lb, lc).min(angle(lb, la, lc)).min(angle(lc, la, lb))
}
