//! Analytic boundary curves.
//!
//! Boundary nodes are always generated by evaluating these curves, and
//! refinement splits a boundary segment at the parametric midpoint, so new
//! boundary nodes land exactly on the true curve rather than on a chord.

/// One analytically parametrized boundary piece.
#[derive(Clone, Debug)]
pub enum Curve {
    /// Straight segment from `a` to `b`, parameter in [0, 1].
    Segment { a: [f64; 2], b: [f64; 2] },
    /// Circular arc around `center`, parameter = angle in radians.
    CircleArc { center: [f64; 2], radius: f64, t0: f64, t1: f64 },
    /// Elliptic arc (semi-axes along x/y), parameter = eccentric anomaly.
    EllipseArc { center: [f64; 2], a: f64, b: f64, t0: f64, t1: f64 },
}

impl Curve {
    pub fn point(&self, t: f64) -> [f64; 2] {
        match self {
            Curve::Segment { a, b } => [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
            Curve::CircleArc { center, radius, .. } => {
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            }
            Curve::EllipseArc { center, a, b, .. } => {
                [center[0] + a * t.cos(), center[1] + b * t.sin()]
            }
        }
    }

    pub fn param_range(&self) -> (f64, f64) {
        match self {
            Curve::Segment { .. } => (0.0, 1.0),
            Curve::CircleArc { t0, t1, .. } | Curve::EllipseArc { t0, t1, .. } => (*t0, *t1),
        }
    }

    /// |dP/dt| at t.
    fn speed(&self, t: f64) -> f64 {
        match self {
            Curve::Segment { a, b } => ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt(),
            Curve::CircleArc { radius, .. } => *radius,
            Curve::EllipseArc { a, b, .. } => {
                ((a * t.sin()).powi(2) + (b * t.cos()).powi(2)).sqrt()
            }
        }
    }

    /// Parameters of `count + 1` points at (numerically) equal arclength,
    /// including both endpoints.
    pub fn equal_arclength_params(&self, count: usize) -> Vec<f64> {
        assert!(count >= 1);
        let (t0, t1) = self.param_range();
        if matches!(self, Curve::Segment { .. } | Curve::CircleArc { .. }) {
            // constant speed: uniform parameters are exact
            return (0..=count).map(|i| t0 + (t1 - t0) * i as f64 / count as f64).collect();
        }
        // Numerically invert the arclength with a fine Simpson table.
        let fine = (count * 16).max(512);
        let mut cum = Vec::with_capacity(fine + 1);
        cum.push(0.0);
        let dt = (t1 - t0) / fine as f64;
        let mut total = 0.0;
        for i in 0..fine {
            let ta = t0 + i as f64 * dt;
            let tm = ta + 0.5 * dt;
            let tb = ta + dt;
            total += dt / 6.0 * (self.speed(ta) + 4.0 * self.speed(tm) + self.speed(tb));
            cum.push(total);
        }
        let mut out = Vec::with_capacity(count + 1);
        out.push(t0);
        let mut j = 0;
        for i in 1..count {
            let target = total * i as f64 / count as f64;
            while cum[j + 1] < target {
                j += 1;
            }
            let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
            out.push(t0 + (j as f64 + frac) * dt);
        }
        out.push(t1);
        out
    }

    /// Arclength of the whole piece.
    pub fn length(&self) -> f64 {
        match self {
            Curve::Segment { a, b } => ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt(),
            Curve::CircleArc { radius, t0, t1, .. } => radius * (t1 - t0).abs(),
            Curve::EllipseArc { .. } => {
                let (t0, t1) = self.param_range();
                let n = 2048;
                let dt = (t1 - t0) / n as f64;
                let mut total = 0.0;
                for i in 0..n {
                    let ta = t0 + i as f64 * dt;
                    total += dt / 6.0
                        * (self.speed(ta) + 4.0 * self.speed(ta + 0.5 * dt) + self.speed(ta + dt));
                }
                total
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_arclength_on_ellipse() {
        let c = Curve::EllipseArc { center: [0.0, 0.0], a: 1.0, b: 0.5, t0: 0.0, t1: std::f64::consts::PI };
        let params = c.equal_arclength_params(40);
        assert_eq!(params.len(), 41);
        let pts: Vec<_> = params.iter().map(|&t| c.point(t)).collect();
        let lens: Vec<f64> = pts
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .collect();
        let max = lens.iter().cloned().fold(0.0, f64::max);
        let min = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.02, "chord spread {min}..{max}");
    }

    #[test]
    fn circle_length() {
        let c = Curve::CircleArc { center: [0.0, 0.0], radius: 2.0, t0: 0.0, t1: std::f64::consts::PI };
        assert!((c.length() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
