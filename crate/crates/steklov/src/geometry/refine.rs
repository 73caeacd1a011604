//! Mesh generation: boundary discretization on the analytic curves, a
//! hexagonal interior seed lattice, Delaunay triangulation (spade), and
//! Ruppert-style refinement.
//!
//! Boundary segments are kept Gabriel (empty diametral circles). A segment
//! whose diametral circle captures a vertex is split *on the analytic curve*
//! at the parametric midpoint, so refinement never degrades the geometry to
//! chords. Skinny or oversized triangles are fixed by circumcenter insertion;
//! circumcenters that would encroach a boundary segment split that segment
//! instead. Small input angles (< 60 deg) get concentric-shell splits.

use crate::error::{Error, Result};
use crate::geometry::curve::Curve;
use crate::geometry::domain::{Ambient, DomainSpec};
use crate::geometry::mesh::{triangle_min_angle_deg, BoundaryTag, Mesh};
use spade::handles::FixedVertexHandle;
use spade::{DelaunayTriangulation, Point2, Triangulation};
use std::collections::{HashMap, VecDeque};

/// (vertex indices, vertex positions, circumcenter) of a queued bad face
type BadFace = ([usize; 3], [[f64; 2]; 3], [f64; 2]);

const BOUNDARY_SPACING_FACTOR: f64 = 0.85;
const SEED_SPACING_FACTOR: f64 = 0.85;
const MIN_ANGLE_DEG: f64 = 20.0;

#[derive(Clone, Copy, Debug)]
struct SegRec {
    a: usize,
    b: usize,
    tag: BoundaryTag,
    curve: usize,
    ta: f64,
    tb: f64,
    alive: bool,
}

struct Builder<'a> {
    spec: &'a DomainSpec,
    h_max: f64,
    curves: Vec<(BoundaryTag, Curve)>,
    nodes: Vec<[f64; 2]>,
    /// hash grid for merging coincident chain-junction nodes
    node_hash: HashMap<(i64, i64), Vec<usize>>,
    segs: Vec<SegRec>,
    seg_hash: HashMap<(i64, i64), Vec<usize>>,
    corner: Vec<bool>,
    dt: DelaunayTriangulation<Point2<f64>>,
    inserted_budget: usize,
    /// hex seeds are excluded beyond this radius (collar band reservation)
    seed_max_radius: f64,
}

/// Conforming triangulation of the annular domain with all edges <= h_max,
/// boundary nodes on the analytic curves, and minimum angle >= 20 degrees.
pub fn build_mesh(spec: &DomainSpec, h_max: f64) -> Result<Mesh> {
    spec.validate()?;
    if !(h_max > 0.0) || h_max >= spec.l / 4.0 {
        return Err(Error::Geometry(format!(
            "h_max must lie in (0, L/4) = (0, {}), got {h_max}",
            spec.l / 4.0
        )));
    }
    let mut b = Builder {
        spec,
        h_max,
        curves: Vec::new(),
        nodes: Vec::new(),
        node_hash: HashMap::new(),
        segs: Vec::new(),
        seg_hash: HashMap::new(),
        corner: Vec::new(),
        dt: DelaunayTriangulation::new(),
        inserted_budget: 0,
        seed_max_radius: f64::INFINITY,
    };
    b.sample_boundaries();
    b.seed_interior();
    b.triangulate()?;
    b.refine()?;
    b.extract()
}

impl<'a> Builder<'a> {
    fn snap(&self, mut p: [f64; 2]) -> [f64; 2] {
        if self.spec.ambient == Ambient::Axisym3d && p[0].abs() < 1e-13 * self.spec.l {
            p[0] = 0.0;
        }
        p
    }

    /// Add a boundary node, merging nodes that coincide within 1e-9 L
    /// (chain junctions and loop closures produce the same point twice).
    fn add_boundary_node(&mut self, p: [f64; 2]) -> usize {
        let p = self.snap(p);
        let tol = 1e-9 * self.spec.l;
        let cell = 0.05 * self.h_max;
        let key = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(list) = self.node_hash.get(&(key.0 + di, key.1 + dj)) {
                    for &i in list {
                        let q = self.nodes[i];
                        if (p[0] - q[0]).hypot(p[1] - q[1]) < tol {
                            return i;
                        }
                    }
                }
            }
        }
        self.nodes.push(p);
        self.corner.push(false);
        let id = self.nodes.len() - 1;
        self.node_hash.entry(key).or_default().push(id);
        id
    }

    fn sample_boundaries(&mut self) {
        let spacing = BOUNDARY_SPACING_FACTOR * self.h_max;
        let mut collar: Vec<[f64; 2]> = Vec::new();
        for (tag, curves) in self.spec.boundary_chains() {
            for curve in curves {
                let count = (curve.length() / spacing).ceil().max(1.0) as usize;
                let params = curve.equal_arclength_params(count);
                let pts: Vec<[f64; 2]> = params.iter().map(|&t| curve.point(t)).collect();
                // Protective collar inside the truncation circle: a structured
                // ring at the same angles keeps the outer segments from ever
                // being encroached, so the OUTER grid stays exactly uniform
                // (the TBC quadrature relies on it).
                if tag == BoundaryTag::Outer {
                    let arc = curve.length() / count as f64;
                    let delta = 0.72 * arc;
                    let rc = self.spec.l - delta;
                    self.seed_max_radius =
                        self.seed_max_radius.min(rc - 0.62 * SEED_SPACING_FACTOR * self.h_max);
                    for &t in &params[..params.len() - 1] {
                        let dir = curve.point(t);
                        let norm = dir[0].hypot(dir[1]);
                        let q = [dir[0] / norm * rc, dir[1] / norm * rc];
                        if self.spec.ambient == Ambient::Axisym3d && q[0] < 0.35 * arc {
                            continue; // stay clear of the symmetry axis
                        }
                        if self.spec.inside_domain(q) {
                            collar.push(q);
                        }
                    }
                }
                let cidx = self.curves.len();
                self.curves.push((tag, curve));
                let ids: Vec<usize> = pts.into_iter().map(|p| self.add_boundary_node(p)).collect();
                for (k, w) in ids.windows(2).enumerate() {
                    if w[0] == w[1] {
                        continue;
                    }
                    self.push_seg(SegRec {
                        a: w[0],
                        b: w[1],
                        tag,
                        curve: cidx,
                        ta: params[k],
                        tb: params[k + 1],
                        alive: true,
                    });
                }
            }
        }
        for p in collar {
            self.nodes.push(p);
            self.corner.push(false);
        }
        self.mark_small_corners();
    }

    /// Flag nodes where exactly two boundary segments meet at a wedge below
    /// 60 degrees opening into the domain; splits near them use concentric
    /// shells and their nestled triangles are protected from ping-pong splits.
    fn mark_small_corners(&mut self) {
        let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, s) in self.segs.iter().enumerate() {
            incident.entry(s.a).or_default().push(i);
            incident.entry(s.b).or_default().push(i);
        }
        let mut marks = Vec::new();
        for (&node, segids) in &incident {
            if segids.len() != 2 {
                continue;
            }
            let p = self.nodes[node];
            let dir = |sid: usize| -> [f64; 2] {
                let s = &self.segs[sid];
                let other = if s.a == node { s.b } else { s.a };
                let q = self.nodes[other];
                let d = [q[0] - p[0], q[1] - p[1]];
                let n = d[0].hypot(d[1]);
                [d[0] / n, d[1] / n]
            };
            let (u, v) = (dir(segids[0]), dir(segids[1]));
            let cosw = (u[0] * v[0] + u[1] * v[1]).clamp(-1.0, 1.0);
            if cosw.acos().to_degrees() < 60.0 {
                let bis = [u[0] + v[0], u[1] + v[1]];
                let bn = bis[0].hypot(bis[1]).max(1e-30);
                let probe =
                    [p[0] + bis[0] / bn * 0.3 * self.h_max, p[1] + bis[1] / bn * 0.3 * self.h_max];
                if self.spec.inside_domain(probe) {
                    marks.push(node);
                }
            }
        }
        for n in marks {
            self.corner[n] = true;
        }
    }

    fn seed_interior(&mut self) {
        let s = SEED_SPACING_FACTOR * self.h_max;
        let l = self.spec.l;
        let clearance = 0.62 * s;
        let row_h = s * 3.0_f64.sqrt() / 2.0;
        let jmax = (l / row_h).ceil() as i64 + 1;
        for j in -jmax..=jmax {
            let y = j as f64 * row_h;
            let x0 = if j.rem_euclid(2) == 0 { 0.0 } else { s / 2.0 };
            let imax = (l / s).ceil() as i64 + 1;
            for i in -imax..=imax {
                let p = [x0 + i as f64 * s, y];
                if p[0].hypot(p[1]) > self.seed_max_radius {
                    continue;
                }
                if !self.spec.inside_domain(p) {
                    continue;
                }
                if self.dist_to_boundary_below(p, clearance) {
                    continue;
                }
                self.nodes.push(p);
                self.corner.push(false);
            }
        }
    }

    fn dist_to_boundary_below(&self, p: [f64; 2], limit: f64) -> bool {
        let cell = self.h_max;
        let (ci, cj) = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        let reach = (limit / cell).ceil() as i64 + 1;
        for di in -reach..=reach {
            for dj in -reach..=reach {
                if let Some(list) = self.seg_hash.get(&(ci + di, cj + dj)) {
                    for &sid in list {
                        let s = &self.segs[sid];
                        if s.alive && dist_point_segment(p, self.nodes[s.a], self.nodes[s.b]) < limit {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn push_seg(&mut self, seg: SegRec) -> usize {
        let id = self.segs.len();
        self.segs.push(seg);
        let m = self.seg_mid(id);
        let cell = self.h_max;
        self.seg_hash
            .entry(((m[0] / cell).floor() as i64, (m[1] / cell).floor() as i64))
            .or_default()
            .push(id);
        id
    }

    fn seg_mid(&self, id: usize) -> [f64; 2] {
        let s = &self.segs[id];
        let (a, b) = (self.nodes[s.a], self.nodes[s.b]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    fn triangulate(&mut self) -> Result<()> {
        let pts: Vec<Point2<f64>> = self.nodes.iter().map(|p| Point2::new(p[0], p[1])).collect();
        self.dt = DelaunayTriangulation::bulk_load_stable(pts)
            .map_err(|e| Error::Mesh(format!("triangulation failed: {e:?}")))?;
        if self.dt.num_vertices() != self.nodes.len() {
            return Err(Error::Mesh("duplicate points collapsed during triangulation".into()));
        }
        self.inserted_budget = 60 * self.nodes.len() + 10_000;
        Ok(())
    }

    fn insert_point(&mut self, p: [f64; 2]) -> Result<Option<usize>> {
        if self.nodes.len() >= self.inserted_budget {
            return Err(Error::Mesh(format!(
                "refinement did not converge (budget exhausted near ({:.4}, {:.4}))",
                p[0], p[1]
            )));
        }
        let handle = self
            .dt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::Mesh(format!("insertion failed: {e:?}")))?;
        if handle.index() < self.nodes.len() {
            return Ok(None); // landed on an existing vertex
        }
        self.nodes.push(p);
        self.corner.push(false);
        debug_assert_eq!(handle.index(), self.nodes.len() - 1);
        Ok(Some(handle.index()))
    }

    /// Encroachment via the Delaunay apex lemma: if any vertex lies in the
    /// diametral circle of an existing Delaunay edge, one of the two apexes
    /// does. A missing edge counts as encroached.
    fn seg_encroached(&self, sid: usize) -> bool {
        let s = &self.segs[sid];
        let (pa, pb) = (self.nodes[s.a], self.nodes[s.b]);
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        let r2 = 0.25 * ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2));
        let va = FixedVertexHandle::from_index(s.a);
        let vb = FixedVertexHandle::from_index(s.b);
        let edge = match self.dt.get_edge_from_neighbors(va, vb) {
            None => return true,
            Some(e) => e,
        };
        for e in [edge, edge.rev()] {
            if let Some(apex) = e.opposite_vertex() {
                let q = apex.position();
                let d2 = (q.x - mid[0]).powi(2) + (q.y - mid[1]).powi(2);
                if d2 < r2 * (1.0 - 1e-12) {
                    return true;
                }
            }
        }
        false
    }

    fn point_encroaches(&self, p: [f64; 2], sid: usize) -> bool {
        let s = &self.segs[sid];
        let (pa, pb) = (self.nodes[s.a], self.nodes[s.b]);
        if (p[0] - pa[0]).hypot(p[1] - pa[1]) < 1e-14 || (p[0] - pb[0]).hypot(p[1] - pb[1]) < 1e-14 {
            return false;
        }
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        let r2 = 0.25 * ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2));
        (p[0] - mid[0]).powi(2) + (p[1] - mid[1]).powi(2) < r2 * (1.0 - 1e-12)
    }

    fn segs_encroached_by(&self, p: [f64; 2]) -> Vec<usize> {
        let cell = self.h_max;
        let (ci, cj) = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        let mut out = Vec::new();
        for di in -2..=2 {
            for dj in -2..=2 {
                if let Some(list) = self.seg_hash.get(&(ci + di, cj + dj)) {
                    for &sid in list {
                        if self.segs[sid].alive && self.point_encroaches(p, sid) {
                            out.push(sid);
                        }
                    }
                }
            }
        }
        out
    }

    /// Split a boundary segment on its analytic curve.
    fn split_seg(&mut self, sid: usize) -> Result<(usize, usize, usize)> {
        let s = self.segs[sid];
        let curve = &self.curves[s.curve].1;
        let mut tm = 0.5 * (s.ta + s.tb);
        // concentric shells: round the split distance from a small-angle
        // corner to a power of two so opposite sides split at equal radii
        let corner_end = if self.corner[s.a] {
            Some(s.a)
        } else if self.corner[s.b] {
            Some(s.b)
        } else {
            None
        };
        if let Some(cn) = corner_end {
            let pc = self.nodes[cn];
            let pm = curve.point(tm);
            let dist = (pm[0] - pc[0]).hypot(pm[1] - pc[1]);
            if dist > 0.0 {
                let target = 2.0_f64.powf(dist.log2().round());
                let (mut lo, mut hi) = (s.ta.min(s.tb), s.ta.max(s.tb));
                let d_lo = {
                    let p = curve.point(lo);
                    (p[0] - pc[0]).hypot(p[1] - pc[1])
                };
                let d_hi = {
                    let p = curve.point(hi);
                    (p[0] - pc[0]).hypot(p[1] - pc[1])
                };
                let increasing = d_hi > d_lo;
                for _ in 0..50 {
                    let t = 0.5 * (lo + hi);
                    let p = curve.point(t);
                    let d = (p[0] - pc[0]).hypot(p[1] - pc[1]);
                    if (d < target) == increasing {
                        lo = t;
                    } else {
                        hi = t;
                    }
                }
                let t = 0.5 * (lo + hi);
                if t > s.ta.min(s.tb) + 1e-12 && t < s.ta.max(s.tb) - 1e-12 {
                    tm = t;
                }
            }
        }
        let p = self.snap(curve.point(tm));
        let node = match self.insert_point(p)? {
            Some(n) => n,
            None => return Err(Error::Mesh("boundary split landed on an existing node".into())),
        };
        self.segs[sid].alive = false;
        let c1 = self.push_seg(SegRec { a: s.a, b: node, tag: s.tag, curve: s.curve, ta: s.ta, tb: tm, alive: true });
        let c2 = self.push_seg(SegRec { a: node, b: s.b, tag: s.tag, curve: s.curve, ta: tm, tb: s.tb, alive: true });
        Ok((node, c1, c2))
    }

    fn is_face(&self, idx: [usize; 3]) -> bool {
        let va = FixedVertexHandle::from_index(idx[0]);
        let vb = FixedVertexHandle::from_index(idx[1]);
        match self.dt.get_edge_from_neighbors(va, vb) {
            None => false,
            Some(e) => [e, e.rev()].iter().any(|ed| {
                ed.opposite_vertex().map(|v| v.fix().index() == idx[2]).unwrap_or(false)
            }),
        }
    }

    fn face_bad(&self, verts: [[f64; 2]; 3]) -> bool {
        let centroid = [
            (verts[0][0] + verts[1][0] + verts[2][0]) / 3.0,
            (verts[0][1] + verts[1][1] + verts[2][1]) / 3.0,
        ];
        if !self.spec.inside_domain(centroid) {
            return false;
        }
        let mut longest = 0.0_f64;
        for k in 0..3 {
            let (a, b) = (verts[k], verts[(k + 1) % 3]);
            longest = longest.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
        if longest > self.h_max {
            return true;
        }
        triangle_min_angle_deg(verts[0], verts[1], verts[2]) < MIN_ANGLE_DEG
    }

    fn refine(&mut self) -> Result<()> {
        for _round in 0..200 {
            let mut seg_queue: VecDeque<usize> =
                (0..self.segs.len()).filter(|&i| self.segs[i].alive).collect();
            let mut work = 0usize;
            while let Some(sid) = seg_queue.pop_front() {
                if !self.segs[sid].alive {
                    continue;
                }
                if self.seg_encroached(sid) {
                    let (_, c1, c2) = self.split_seg(sid)?;
                    seg_queue.push_back(c1);
                    seg_queue.push_back(c2);
                    work += 1;
                }
            }
            let mut bad: Vec<BadFace> = Vec::new();
            for face in self.dt.inner_faces() {
                let vs = face.vertices();
                let verts = [
                    [vs[0].position().x, vs[0].position().y],
                    [vs[1].position().x, vs[1].position().y],
                    [vs[2].position().x, vs[2].position().y],
                ];
                if self.face_bad(verts) {
                    let c = face.circumcenter();
                    bad.push((
                        [vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()],
                        verts,
                        [c.x, c.y],
                    ));
                }
            }
            for (idx, verts, c) in bad {
                if !self.is_face(idx) || !self.face_bad(verts) {
                    continue;
                }
                let enc = self.segs_encroached_by(c);
                if !enc.is_empty() {
                    for sid in enc {
                        if self.segs[sid].alive && !self.corner_protected(sid, c) {
                            self.split_seg(sid)?;
                            work += 1;
                        }
                    }
                    continue;
                }
                if self.spec.inside_domain(c) {
                    if self.insert_point(c)?.is_some() {
                        work += 1;
                    }
                } else if let Some(sid) = self.first_crossed_segment(verts, c) {
                    if self.segs[sid].alive {
                        self.split_seg(sid)?;
                        work += 1;
                    }
                }
            }
            if work == 0 {
                return Ok(());
            }
        }
        Err(Error::Mesh("refinement did not reach a fixpoint in 200 rounds".into()))
    }

    /// Skip splits that would ping-pong inside a small input corner.
    fn corner_protected(&self, sid: usize, c: [f64; 2]) -> bool {
        let s = &self.segs[sid];
        let corner = if self.corner[s.a] {
            Some(self.nodes[s.a])
        } else if self.corner[s.b] {
            Some(self.nodes[s.b])
        } else {
            None
        };
        match corner {
            None => false,
            Some(pc) => {
                let (a, b) = (self.nodes[s.a], self.nodes[s.b]);
                let seg_len = (a[0] - b[0]).hypot(a[1] - b[1]);
                (c[0] - pc[0]).hypot(c[1] - pc[1]) < 2.0 * seg_len
            }
        }
    }

    fn first_crossed_segment(&self, verts: [[f64; 2]; 3], c: [f64; 2]) -> Option<usize> {
        let centroid = [
            (verts[0][0] + verts[1][0] + verts[2][0]) / 3.0,
            (verts[0][1] + verts[1][1] + verts[2][1]) / 3.0,
        ];
        let d = [c[0] - centroid[0], c[1] - centroid[1]];
        let len = d[0].hypot(d[1]);
        let steps = (len / (0.5 * self.h_max)).ceil().max(1.0) as usize;
        let cell = self.h_max;
        let mut best: Option<(f64, usize)> = None;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let p = [centroid[0] + t * d[0], centroid[1] + t * d[1]];
            let (ci, cj) = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
            for di in -1..=1 {
                for dj in -1..=1 {
                    if let Some(list) = self.seg_hash.get(&(ci + di, cj + dj)) {
                        for &sid in list {
                            let s = &self.segs[sid];
                            if !s.alive {
                                continue;
                            }
                            if let Some(tc) =
                                segment_cross_param(centroid, c, self.nodes[s.a], self.nodes[s.b])
                            {
                                if best.map(|(bt, _)| tc < bt).unwrap_or(true) {
                                    best = Some((tc, sid));
                                }
                            }
                        }
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        best.map(|(_, sid)| sid)
    }

    fn extract(self) -> Result<Mesh> {
        let mut triangles = Vec::new();
        for face in self.dt.inner_faces() {
            let vs = face.vertices();
            let p: Vec<[f64; 2]> = vs.iter().map(|v| [v.position().x, v.position().y]).collect();
            let centroid =
                [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
            if self.spec.inside_domain(centroid) {
                triangles.push([vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()]);
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for tri in triangles.iter_mut() {
            for v in tri.iter_mut() {
                if remap[*v] == usize::MAX {
                    remap[*v] = nodes.len();
                    nodes.push(self.nodes[*v]);
                }
                *v = remap[*v];
            }
        }
        let mut boundary_edges = Vec::new();
        for s in &self.segs {
            if s.alive {
                let (a, b) = (remap[s.a], remap[s.b]);
                if a == usize::MAX || b == usize::MAX {
                    return Err(Error::Mesh("boundary segment lost during extraction".into()));
                }
                boundary_edges.push((a, b, s.tag));
            }
        }
        let mesh = Mesh {
            ambient: self.spec.ambient,
            nodes,
            triangles,
            boundary_edges,
            h_max: self.h_max,
            l: self.spec.l,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

fn dist_point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Parameter along (p1, p2) of a proper crossing with (q1, q2), if any.
fn segment_cross_param(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> Option<f64> {
    let r = [p2[0] - p1[0], p2[1] - p1[1]];
    let s = [q2[0] - q1[0], q2[1] - q1[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom.abs() < 1e-30 {
        return None;
    }
    let qp = [q1[0] - p1[0], q1[1] - p1[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / denom;
    if t > 1e-12 && t < 1.0 - 1e-12 && u > -1e-9 && u < 1.0 + 1e-9 {
        Some(t)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::Obstacle;

    #[test]
    fn disk_annulus_mesh() {
        let spec = DomainSpec::planar_offset(Obstacle::Disk { radius: 1.0 }, 2.0, [0.0, 0.25]).unwrap();
        let mesh = build_mesh(&spec, 0.15).unwrap();
        for n in mesh.nodes_with_tag(BoundaryTag::Inner) {
            let p = mesh.nodes[n];
            let r = (p[0] - 0.0).hypot(p[1] - 0.25);
            assert!((r - 1.0).abs() < 1e-10, "inner node radius {r}");
        }
        for n in mesh.nodes_with_tag(BoundaryTag::Outer) {
            let p = mesh.nodes[n];
            assert!((p[0].hypot(p[1]) - 2.0).abs() < 1e-10);
        }
        let area = mesh.area();
        let want = 3.0 * std::f64::consts::PI;
        let perimeter = 2.0 * std::f64::consts::PI * (1.0 + 2.0);
        assert!((area - want).abs() < 3.0 * 0.15 * perimeter, "area {area} vs {want}");
    }

    #[test]
    fn square_mesh_perimeter_and_start() {
        let spec = DomainSpec::planar(Obstacle::square(2.0), 2.0).unwrap();
        let mesh = build_mesh(&spec, 0.1).unwrap();
        let walk = mesh.boundary_arclength(BoundaryTag::Inner).unwrap();
        assert!((walk.total - 8.0).abs() < 4.0 * 0.1, "perimeter {}", walk.total);
        let start = mesh.nodes[walk.nodes[0]];
        assert!((start[0] + 1.0).abs() < 1e-9 && start[1].abs() < 0.1, "start {start:?}");
    }

    #[test]
    fn triangle_mesh_start_node() {
        let spec = DomainSpec::planar(Obstacle::equilateral_triangle(2.0), 2.0).unwrap();
        let mesh = build_mesh(&spec, 0.1).unwrap();
        let walk = mesh.boundary_arclength(BoundaryTag::Inner).unwrap();
        let start = mesh.nodes[walk.nodes[0]];
        assert!((start[0] + 0.67).abs() < 0.06 && start[1].abs() < 0.1, "start {start:?}");
    }

    #[test]
    fn halving_h_roughly_quadruples_triangles() {
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap();
        let coarse = build_mesh(&spec, 0.3).unwrap().triangles.len() as f64;
        let fine = build_mesh(&spec, 0.15).unwrap().triangles.len() as f64;
        let ratio = fine / coarse;
        assert!((2.8..=5.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn axisym_capped_cylinder_mesh() {
        let spec =
            DomainSpec::axisym(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 2.0, 0.0).unwrap();
        let mesh = build_mesh(&spec, 0.15).unwrap();
        assert!(!mesh.nodes_with_tag(BoundaryTag::Axis).is_empty());
        let want = std::f64::consts::PI * 2.0 - 2.0;
        assert!((mesh.area() - want).abs() < 0.2, "area {}", mesh.area());
    }

    #[test]
    fn axisym_spheroid_mesh() {
        let spec = DomainSpec::axisym(Obstacle::Spheroid { r_eq: 0.5, z_pole: 1.0 }, 2.0, 0.0).unwrap();
        let mesh = build_mesh(&spec, 0.12).unwrap();
        let walk = mesh.boundary_arclength(BoundaryTag::Inner).unwrap();
        assert!(!walk.closed);
        // south-to-north ordering
        let first = mesh.nodes[*walk.nodes.first().unwrap()];
        let last = mesh.nodes[*walk.nodes.last().unwrap()];
        assert!(first[1] < 0.0 && last[1] > 0.0);
    }

    #[test]
    fn rejects_oversized_h() {
        let spec = DomainSpec::planar(Obstacle::Disk { radius: 1.0 }, 2.0).unwrap();
        assert!(build_mesh(&spec, 0.6).is_err());
    }
}
