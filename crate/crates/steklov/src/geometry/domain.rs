//! Declarative domain descriptions: a compact obstacle inside a truncation
//! ball of radius L, in the plane or as a 3D axisymmetric body.

use crate::error::{Error, Result};
use crate::geometry::curve::Curve;
use crate::geometry::mesh::BoundaryTag;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Planar2d,
    Axisym3d,
}

/// Obstacle shapes. Planar shapes live in the xy plane; axisymmetric shapes
/// are described by their (r, z) profile with r >= 0, rotated around the z
/// axis. `center_offset` in [DomainSpec] displaces the obstacle (2D: both
/// components; axisym: only the z component may be nonzero).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstacle {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    /// Spheroid with equatorial radius `r_eq` (x,y) and polar semi-axis `z_pole`.
    Spheroid { r_eq: f64, z_pole: f64 },
    /// Flat-capped cylinder: r <= radius, |z| <= height/2.
    CappedCylinder { radius: f64, height: f64 },
    /// Axisymmetric solid of revolution; profile runs in the (r, z) half-plane
    /// from one axis point (r = 0) to another, with r > 0 in between.
    RotatedPolygon { profile: Vec<[f64; 2]> },
}

impl Obstacle {
    pub fn square(side: f64) -> Obstacle {
        let h = side / 2.0;
        Obstacle::Polygon { vertices: vec![[-h, -h], [h, -h], [h, h], [-h, h]] }
    }

    /// Equilateral triangle with centroid at the origin and apex up; for side
    /// 2 the negative x axis crosses the boundary at (-2/3, 0).
    pub fn equilateral_triangle(side: f64) -> Obstacle {
        let r = side / 3.0_f64.sqrt(); // circumradius
        Obstacle::Polygon {
            vertices: vec![[side / 2.0, -r / 2.0], [0.0, r], [-side / 2.0, -r / 2.0]],
        }
    }

    fn is_axisym(&self) -> bool {
        matches!(
            self,
            Obstacle::Spheroid { .. } | Obstacle::CappedCylinder { .. } | Obstacle::RotatedPolygon { .. }
        )
    }
}

/// Full domain description: ambient mode, obstacle, truncation radius L, and
/// obstacle displacement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub ambient: Ambient,
    pub obstacle: Obstacle,
    pub l: f64,
    #[serde(default)]
    pub center_offset: [f64; 2],
}

impl DomainSpec {
    pub fn planar(obstacle: Obstacle, l: f64) -> Result<DomainSpec> {
        let spec = DomainSpec { ambient: Ambient::Planar2d, obstacle, l, center_offset: [0.0, 0.0] };
        spec.validate()?;
        Ok(spec)
    }

    pub fn planar_offset(obstacle: Obstacle, l: f64, offset: [f64; 2]) -> Result<DomainSpec> {
        let spec = DomainSpec { ambient: Ambient::Planar2d, obstacle, l, center_offset: offset };
        spec.validate()?;
        Ok(spec)
    }

    /// Axisymmetric domain; `z_offset` displaces the obstacle along the axis.
    pub fn axisym(obstacle: Obstacle, l: f64, z_offset: f64) -> Result<DomainSpec> {
        let spec = DomainSpec { ambient: Ambient::Axisym3d, obstacle, l, center_offset: [0.0, z_offset] };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(Error::Geometry(format!("truncation radius must be positive, got {}", self.l)));
        }
        match self.ambient {
            Ambient::Planar2d => {
                if self.obstacle.is_axisym() {
                    return Err(Error::Geometry("axisymmetric obstacle in a planar domain".into()));
                }
            }
            Ambient::Axisym3d => {
                if !self.obstacle.is_axisym() {
                    return Err(Error::Geometry("planar obstacle in an axisymmetric domain".into()));
                }
                if self.center_offset[0] != 0.0 {
                    return Err(Error::Geometry("axisymmetric obstacles may only be offset along z".into()));
                }
            }
        }
        match &self.obstacle {
            Obstacle::Disk { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Geometry("disk radius must be positive".into()));
                }
            }
            Obstacle::Ellipse { a, b } | Obstacle::Spheroid { r_eq: a, z_pole: b } => {
                if !(*a > 0.0 && *b > 0.0) {
                    return Err(Error::Geometry("semi-axes must be positive".into()));
                }
            }
            Obstacle::CappedCylinder { radius, height } => {
                if !(*radius > 0.0 && *height > 0.0) {
                    return Err(Error::Geometry("cylinder radius and height must be positive".into()));
                }
            }
            Obstacle::Polygon { vertices } => validate_polygon(vertices)?,
            Obstacle::RotatedPolygon { profile } => validate_profile(profile)?,
        }
        let rmax = self.circumradius();
        if rmax >= self.l {
            return Err(Error::Geometry(format!(
                "obstacle reaches radius {rmax:.6} but must lie strictly inside B_L with L = {}",
                self.l
            )));
        }
        Ok(())
    }

    /// Maximal distance from the origin to the obstacle boundary.
    pub fn circumradius(&self) -> f64 {
        let off = self.center_offset;
        let norm = |p: [f64; 2]| (p[0] * p[0] + p[1] * p[1]).sqrt();
        match &self.obstacle {
            Obstacle::Disk { radius } => norm(off) + radius,
            Obstacle::Ellipse { a, b } => norm(off) + a.max(*b),
            Obstacle::Spheroid { r_eq, z_pole } => off[1].abs() + r_eq.max(*z_pole),
            Obstacle::CappedCylinder { radius, height } => {
                let z = off[1].abs() + height / 2.0;
                (radius * radius + z * z).sqrt()
            }
            Obstacle::Polygon { vertices } => vertices
                .iter()
                .map(|v| norm([v[0] + off[0], v[1] + off[1]]))
                .fold(0.0, f64::max),
            Obstacle::RotatedPolygon { profile } => profile
                .iter()
                .map(|v| norm([v[0], v[1] + off[1]]))
                .fold(0.0, f64::max),
        }
    }

    /// Is the point (strictly) inside the obstacle? For axisym domains the
    /// point is (r, z).
    pub fn inside_obstacle(&self, p: [f64; 2]) -> bool {
        let off = self.center_offset;
        let q = [p[0] - off[0], p[1] - off[1]];
        match &self.obstacle {
            Obstacle::Disk { radius } => q[0] * q[0] + q[1] * q[1] < radius * radius,
            Obstacle::Ellipse { a, b } => (q[0] / a).powi(2) + (q[1] / b).powi(2) < 1.0,
            Obstacle::Spheroid { r_eq, z_pole } => {
                (p[0] / r_eq).powi(2) + (q[1] / z_pole).powi(2) < 1.0
            }
            Obstacle::CappedCylinder { radius, height } => {
                p[0] < *radius && q[1].abs() < height / 2.0
            }
            Obstacle::Polygon { vertices } => point_in_polygon(q, vertices),
            Obstacle::RotatedPolygon { profile } => {
                // The profile starts and ends on the axis, so the closing edge
                // of the polygon runs along the axis itself.
                let shifted: Vec<[f64; 2]> =
                    profile.iter().map(|v| [v[0], v[1] + off[1]]).collect();
                point_in_polygon(p, &shifted)
            }
        }
    }

    /// Is the point inside the computational domain Omega_L (annulus, or its
    /// half-plane section for axisym)?
    pub fn inside_domain(&self, p: [f64; 2]) -> bool {
        let r2 = p[0] * p[0] + p[1] * p[1];
        if r2 >= self.l * self.l {
            return false;
        }
        if self.ambient == Ambient::Axisym3d && p[0] < 0.0 {
            return false;
        }
        !self.inside_obstacle(p)
    }

    /// Boundary chains: analytic curve pieces with tags. The INNER chain
    /// traverses the obstacle boundary counterclockwise (2D) or from the south
    /// axis endpoint to the north one (axisym); OUTER is the truncation
    /// circle (2D, counterclockwise from angle -pi) or half-circle (axisym,
    /// south pole to north pole); AXIS closes the axisym half-disk.
    pub fn boundary_chains(&self) -> Vec<(BoundaryTag, Vec<Curve>)> {
        let off = self.center_offset;
        let mut chains = Vec::new();
        match self.ambient {
            Ambient::Planar2d => {
                let inner: Vec<Curve> = match &self.obstacle {
                    Obstacle::Disk { radius } => vec![Curve::CircleArc {
                        center: off,
                        radius: *radius,
                        t0: -PI,
                        t1: PI,
                    }],
                    Obstacle::Ellipse { a, b } => vec![Curve::EllipseArc {
                        center: off,
                        a: *a,
                        b: *b,
                        t0: -PI,
                        t1: PI,
                    }],
                    Obstacle::Polygon { vertices } => {
                        let n = vertices.len();
                        (0..n)
                            .map(|i| Curve::Segment {
                                a: [vertices[i][0] + off[0], vertices[i][1] + off[1]],
                                b: [vertices[(i + 1) % n][0] + off[0], vertices[(i + 1) % n][1] + off[1]],
                            })
                            .collect()
                    }
                    _ => unreachable!("validated planar"),
                };
                chains.push((BoundaryTag::Inner, inner));
                chains.push((
                    BoundaryTag::Outer,
                    vec![Curve::CircleArc { center: [0.0, 0.0], radius: self.l, t0: -PI, t1: PI }],
                ));
            }
            Ambient::Axisym3d => {
                let z0 = off[1];
                // inner: profile from south axis point to north axis point
                let inner: Vec<Curve> = match &self.obstacle {
                    Obstacle::Spheroid { r_eq, z_pole } => vec![Curve::EllipseArc {
                        center: [0.0, z0],
                        a: *r_eq,
                        b: *z_pole,
                        t0: -PI / 2.0,
                        t1: PI / 2.0,
                    }],
                    Obstacle::CappedCylinder { radius, height } => {
                        let h = height / 2.0;
                        vec![
                            Curve::Segment { a: [0.0, z0 - h], b: [*radius, z0 - h] },
                            Curve::Segment { a: [*radius, z0 - h], b: [*radius, z0 + h] },
                            Curve::Segment { a: [*radius, z0 + h], b: [0.0, z0 + h] },
                        ]
                    }
                    Obstacle::RotatedPolygon { profile } => {
                        // profile ordered south -> north after validation
                        profile
                            .windows(2)
                            .map(|w| Curve::Segment {
                                a: [w[0][0], w[0][1] + z0],
                                b: [w[1][0], w[1][1] + z0],
                            })
                            .collect()
                    }
                    _ => unreachable!("validated axisym"),
                };
                let (south, north) = {
                    let first = inner.first().unwrap().point(inner.first().unwrap().param_range().0);
                    let last = inner.last().unwrap().point(inner.last().unwrap().param_range().1);
                    (first, last)
                };
                chains.push((BoundaryTag::Inner, inner));
                chains.push((
                    BoundaryTag::Outer,
                    vec![Curve::CircleArc {
                        center: [0.0, 0.0],
                        radius: self.l,
                        t0: -PI / 2.0,
                        t1: PI / 2.0,
                    }],
                ));
                // axis segments: south pole of B_L up to profile south end;
                // profile north end up to north pole of B_L
                chains.push((
                    BoundaryTag::Axis,
                    vec![Curve::Segment { a: [0.0, -self.l], b: [0.0, south[1]] }],
                ));
                chains.push((
                    BoundaryTag::Axis,
                    vec![Curve::Segment { a: [0.0, north[1]], b: [0.0, self.l] }],
                ));
            }
        }
        chains
    }

    /// Perimeter (2D) or surface area (axisym, including the 2 pi r weight)
    /// of the obstacle boundary.
    pub fn boundary_measure(&self) -> f64 {
        match self.ambient {
            Ambient::Planar2d => self
                .boundary_chains()
                .iter()
                .find(|(t, _)| *t == BoundaryTag::Inner)
                .map(|(_, curves)| curves.iter().map(|c| c.length()).sum())
                .unwrap_or(0.0),
            Ambient::Axisym3d => {
                // int 2 pi r ds over the profile
                let chains = self.boundary_chains();
                let (_, curves) = chains.iter().find(|(t, _)| *t == BoundaryTag::Inner).unwrap();
                let mut total = 0.0;
                for c in curves {
                    let params = c.equal_arclength_params(512);
                    let pts: Vec<_> = params.iter().map(|&t| c.point(t)).collect();
                    for w in pts.windows(2) {
                        let ds = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
                        let rmid = 0.5 * (w[0][0] + w[1][0]);
                        total += 2.0 * PI * rmid * ds;
                    }
                }
                total
            }
        }
    }
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
    }
    let area = signed_area(vertices);
    if area.abs() < 1e-14 {
        return Err(Error::Geometry("degenerate polygon".into()));
    }
    if area < 0.0 {
        return Err(Error::Geometry("polygon vertices must be counterclockwise".into()));
    }
    // simple: no two non-adjacent edges intersect
    let n = vertices.len();
    for i in 0..n {
        let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a1, a2, b1, b2) {
                return Err(Error::Geometry(format!("polygon self-intersects (edges {i} and {j})")));
            }
        }
    }
    Ok(())
}

fn validate_profile(profile: &[[f64; 2]]) -> Result<()> {
    if profile.len() < 3 {
        return Err(Error::Geometry("profile needs at least 3 points".into()));
    }
    let first = profile[0];
    let last = profile[profile.len() - 1];
    if first[0] != 0.0 || last[0] != 0.0 {
        return Err(Error::Geometry("profile endpoints must lie on the axis (r = 0)".into()));
    }
    for (i, p) in profile.iter().enumerate().skip(1).take(profile.len() - 2) {
        if p[0] <= 0.0 {
            return Err(Error::Geometry(format!("interior profile point {i} must have r > 0")));
        }
    }
    if first[1] >= last[1] {
        return Err(Error::Geometry("profile must run from south (smaller z) to north".into()));
    }
    Ok(())
}

pub(crate) fn signed_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

fn point_in_polygon(p: [f64; 2], vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (vertices[i][0], vertices[i][1]);
        let (xj, yj) = (vertices[j][0], vertices[j][1]);
        if ((yi > p[1]) != (yj > p[1]))
            && (p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi)
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn segments_intersect(a1: [f64; 2], a2: [f64; 2], b1: [f64; 2], b2: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| {
        (p[0] - o[0]) * (q[1] - o[1]) - (q[0] - o[0]) * (p[1] - o[1])
    };
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_crosses_negative_x_axis_at_two_thirds() {
        let t = Obstacle::equilateral_triangle(2.0);
        let spec = DomainSpec::planar(t, 2.0).unwrap();
        // boundary crossing of the -x ray: x = -2/3
        assert!(spec.inside_obstacle([-0.66, 0.0]));
        assert!(!spec.inside_obstacle([-0.68, 0.0]));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(DomainSpec::planar(Obstacle::Disk { radius: 2.0 }, 2.0).is_err()); // touches B_L
        assert!(DomainSpec::planar(Obstacle::Disk { radius: -1.0 }, 2.0).is_err());
        let cw = Obstacle::Polygon { vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]] };
        assert!(DomainSpec::planar(cw, 3.0).is_err());
        // self-intersecting bowtie
        let bow = Obstacle::Polygon {
            vertices: vec![[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, 1.0]],
        };
        assert!(DomainSpec::planar(bow, 3.0).is_err());
        // axisym obstacle in planar ambient
        assert!(DomainSpec::planar(Obstacle::Spheroid { r_eq: 0.5, z_pole: 1.0 }, 2.0).is_err());
    }

    #[test]
    fn offset_disk_fits() {
        let spec = DomainSpec::planar_offset(Obstacle::Disk { radius: 1.0 }, 2.0, [0.0, 0.25]).unwrap();
        assert!((spec.circumradius() - 1.25).abs() < 1e-15);
        assert!(spec.inside_obstacle([0.0, 1.2]));
        assert!(!spec.inside_obstacle([0.0, 1.3]));
        assert!(spec.inside_domain([0.0, 1.3]));
        assert!(!spec.inside_domain([0.0, 2.1]));
    }

    #[test]
    fn capped_cylinder_chains() {
        let spec = DomainSpec::axisym(Obstacle::CappedCylinder { radius: 1.0, height: 2.0 }, 2.0, 0.0).unwrap();
        let chains = spec.boundary_chains();
        assert_eq!(chains.len(), 4); // inner, outer, two axis pieces
        assert!(spec.inside_obstacle([0.5, 0.0]));
        assert!(!spec.inside_obstacle([0.5, 1.5]));
        // surface: 2 pi R H + 2 pi R^2 (two caps) = 2pi(2) + 2pi = 6 pi
        let s = spec.boundary_measure();
        assert!((s - 6.0 * PI).abs() < 0.01, "area {s}");
    }

    #[test]
    fn spheroid_measure_matches_closed_form() {
        // prolate a=0.5, c=1: S = 2 pi a^2 (1 + c/(a e) asin e), e^2 = 1 - a^2/c^2
        let spec = DomainSpec::axisym(Obstacle::Spheroid { r_eq: 0.5, z_pole: 1.0 }, 2.0, 0.0).unwrap();
        let a: f64 = 0.5;
        let c: f64 = 1.0;
        let e = (1.0 - (a / c).powi(2)).sqrt();
        let want = 2.0 * PI * a * a * (1.0 + c / (a * e) * e.asin());
        let got = spec.boundary_measure();
        assert!((got - want).abs() / want < 1e-4, "{got} vs {want}");
    }
}
