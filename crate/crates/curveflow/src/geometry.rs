//! Discrete closed plane curves in polar and marker form and their
//! geometric quantities: metric, curvature, support function, length,
//! area and the star-shapedness determinant.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::ops::{self, Scheme};

/// A plane point or vector.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }
    /// 2D cross product `self.x·o.y − self.y·o.x`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
    /// Counterclockwise rotation by 90°; maps a unit tangent of a ccw
    /// curve to the inward normal.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}
impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}
impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}
impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A star-shaped curve as radial samples `r_j > 0` at the uniform nodes
/// `θ_j = 2πj/n`. `n` is even so that `θ_j + π` is itself a node.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCurve {
    r: Vec<f64>,
}

impl PolarCurve {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidCurve(format!(
                "polar grid size must be even and >= 16, got {n}"
            )));
        }
        if !r.iter().all(|&v| v.is_finite() && v > 0.0) {
            return Err(Error::InvalidCurve(
                "radial samples must be positive and finite".into(),
            ));
        }
        Ok(PolarCurve { r })
    }

    /// Sample a radial profile `r(θ)` on `n` uniform nodes.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        PolarCurve::new((0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect())
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.r.len() as f64
    }

    pub fn mean_radius(&self) -> f64 {
        self.r.iter().sum::<f64>() / self.r.len() as f64
    }

    /// Metric, curvature and support samples via the chosen scheme.
    ///
    /// `g = √(r² + r_θ²)`, `κ = (−r r_θθ + 2 r_θ² + r²)/g³`, `p = r²/g`.
    pub fn metric_and_curvature(&self, scheme: Scheme) -> Result<GeometryFields> {
        let r = &self.r;
        let rt = ops::diff_periodic(r, 1, scheme)?;
        let rtt = ops::diff_periodic(r, 2, scheme)?;
        let n = r.len();
        let mut g = Vec::with_capacity(n);
        let mut kappa = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        for j in 0..n {
            let gj = r[j].hypot(rt[j]);
            let kj = (-r[j] * rtt[j] + 2.0 * rt[j] * rt[j] + r[j] * r[j]) / (gj * gj * gj);
            if !gj.is_finite() || !kj.is_finite() {
                return Err(Error::NonFinite("metric_and_curvature output"));
            }
            g.push(gj);
            kappa.push(kj);
            p.push(r[j] * r[j] / gj);
        }
        Ok(GeometryFields { g, kappa, p, r_theta: rt })
    }

    /// Support function samples `p = r²/g`; positive iff the discrete
    /// curve is star-shaped about the origin.
    pub fn support(&self, scheme: Scheme) -> Result<Vec<f64>> {
        Ok(self.metric_and_curvature(scheme)?.p)
    }

    /// Length `L = ∮ g dθ` and enclosed area `A = ½ ∮ r² dθ` by periodic
    /// trapezoid quadrature.
    pub fn length_area(&self, scheme: Scheme) -> Result<(f64, f64)> {
        let rt = ops::diff_periodic(&self.r, 1, scheme)?;
        let g: Vec<f64> = self.r.iter().zip(&rt).map(|(&r, &d)| r.hypot(d)).collect();
        let length = ops::quadrature_periodic(&g);
        let r2: Vec<f64> = self.r.iter().map(|&r| r * r).collect();
        let area = 0.5 * ops::quadrature_periodic(&r2);
        Ok((length, area))
    }

    /// Max-norm centrosymmetry defect `max_j |r(θ_j + π) − r(θ_j)|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.r.len();
        let half = n / 2;
        (0..n)
            .map(|j| (self.r[(j + half) % n] - self.r[j]).abs())
            .fold(0.0, f64::max)
    }

    /// Cartesian samples `(r_j cos θ_j, r_j sin θ_j)`, counterclockwise.
    pub fn to_marker(&self) -> MarkerCurve {
        let pts: Vec<Vec2> = (0..self.r.len())
            .map(|j| {
                let t = self.theta(j);
                Vec2::new(self.r[j] * t.cos(), self.r[j] * t.sin())
            })
            .collect();
        MarkerCurve::new(pts).expect("polar samples always form a valid marker curve")
    }
}

/// Per-node geometric fields aligned with the owning polar grid.
#[derive(Debug, Clone)]
pub struct GeometryFields {
    /// Metric `g = √(r² + r_θ²)`.
    pub g: Vec<f64>,
    /// Curvature; positive on convex counterclockwise curves.
    pub kappa: Vec<f64>,
    /// Support function `p = r²/g`.
    pub p: Vec<f64>,
    /// First derivative `r_θ` (handy for diagnostics).
    pub r_theta: Vec<f64>,
}

/// A closed polyline of plane points, counterclockwise after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerCurve {
    pts: Vec<Vec2>,
}

impl MarkerCurve {
    pub fn new(mut pts: Vec<Vec2>) -> Result<Self> {
        let m = pts.len();
        if m < 8 {
            return Err(Error::InvalidCurve(format!(
                "marker curve needs >= 8 points, got {m}"
            )));
        }
        if !pts.iter().all(|p| p.is_finite()) {
            return Err(Error::InvalidCurve("marker points must be finite".into()));
        }
        let diameter = Self::diameter_of(&pts);
        for i in 0..m {
            let e = (pts[(i + 1) % m] - pts[i]).norm();
            if e <= 1e-12 * diameter {
                return Err(Error::InvalidCurve(format!(
                    "degenerate edge at vertex {i} (length {e:.3e})"
                )));
            }
        }
        let area = Self::shoelace(&pts);
        if area == 0.0 {
            return Err(Error::InvalidCurve("marker curve has zero signed area".into()));
        }
        if area < 0.0 {
            pts.reverse();
        }
        Ok(MarkerCurve { pts })
    }

    fn diameter_of(pts: &[Vec2]) -> f64 {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in pts {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        (xmax - xmin).hypot(ymax - ymin)
    }

    fn shoelace(pts: &[Vec2]) -> f64 {
        let m = pts.len();
        0.5 * (0..m).map(|i| pts[i].cross(pts[(i + 1) % m])).sum::<f64>()
    }

    pub fn m(&self) -> usize {
        self.pts.len()
    }

    pub fn points(&self) -> &[Vec2] {
        &self.pts
    }

    /// Per-vertex frame and scalar summaries.
    ///
    /// Tangent and curvature come from central differences in the
    /// polygon's arclength parameter; `det(X − O, T)` is evaluated at
    /// `O` = origin. Sign conventions match the polar backend: κ > 0 on
    /// convex counterclockwise curves, normal pointing inward.
    pub fn geometry(&self) -> Result<MarkerGeometry> {
        let m = self.pts.len();
        let mut tangent = Vec::with_capacity(m);
        let mut normal = Vec::with_capacity(m);
        let mut kappa = Vec::with_capacity(m);
        let mut ds = Vec::with_capacity(m);
        let mut min_star_det = f64::MAX;
        for i in 0..m {
            let prev = self.pts[(i + m - 1) % m];
            let here = self.pts[i];
            let next = self.pts[(i + 1) % m];
            let h1 = (here - prev).norm();
            let h2 = (next - here).norm();
            let denom = h1 * h2 * (h1 + h2);
            // non-uniform central differences in arclength
            let xs = (next * (h1 * h1) + here * (h2 * h2 - h1 * h1) - prev * (h2 * h2)) * (1.0 / denom);
            let xss = (next * h1 - here * (h1 + h2) + prev * h2) * (2.0 / denom);
            let speed = xs.norm();
            if !xs.is_finite() || !xss.is_finite() || speed == 0.0 {
                return Err(Error::NonFinite("marker geometry"));
            }
            let t = xs * (1.0 / speed);
            let k = xs.cross(xss) / (speed * speed * speed);
            min_star_det = min_star_det.min(here.cross(t));
            tangent.push(t);
            normal.push(t.perp());
            kappa.push(k);
            ds.push(0.5 * (h1 + h2));
        }
        let length: f64 = (0..m)
            .map(|i| (self.pts[(i + 1) % m] - self.pts[i]).norm())
            .sum();
        let signed_area = Self::shoelace(&self.pts);
        Ok(MarkerGeometry {
            tangent,
            normal,
            kappa,
            ds,
            length,
            signed_area,
            min_star_det,
        })
    }
}

/// Discrete differential geometry of a marker curve.
#[derive(Debug, Clone)]
pub struct MarkerGeometry {
    pub tangent: Vec<Vec2>,
    /// Inward unit normal.
    pub normal: Vec<Vec2>,
    pub kappa: Vec<f64>,
    /// Arclength weight per vertex (half the two adjacent edges).
    pub ds: Vec<f64>,
    pub length: f64,
    pub signed_area: f64,
    /// `min_i det(X_i − O, T_i)` with `O` the origin; positive iff
    /// star-shaped about the origin.
    pub min_star_det: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_metric_and_curvature() {
        let c = PolarCurve::from_fn(64, |_| 2.0).unwrap();
        let f = c.metric_and_curvature(Scheme::Spectral).unwrap();
        for j in 0..64 {
            assert!((f.g[j] - 2.0).abs() < 1e-12);
            assert!((f.kappa[j] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_curvature_across_radii_and_schemes() {
        for radius in [0.5, 1.0, 2.0, 5.0] {
            let c = PolarCurve::from_fn(64, |_| radius).unwrap();
            let f = c.metric_and_curvature(Scheme::Spectral).unwrap();
            for &k in &f.kappa {
                assert!((k - 1.0 / radius).abs() < 1e-10, "spectral R={radius}");
            }
            let f2 = c.metric_and_curvature(Scheme::Fd2).unwrap();
            for &k in &f2.kappa {
                // constant data: fd2 is exact too
                assert!((k - 1.0 / radius).abs() < 1e-10, "fd2 R={radius}");
            }
        }
    }

    #[test]
    fn cos2_curvature_at_zero() {
        // r = 1 + 0.1cos2θ at θ=0: r=1.1, r_θ=0, r_θθ=-0.4
        // κ = (0.44 + 0 + 1.21)/1.1³ = 1.65/1.331
        let c = PolarCurve::from_fn(64, |t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap();
        let f = c.metric_and_curvature(Scheme::Spectral).unwrap();
        let expect: f64 = 1.65 / 1.331;
        assert!((expect - 1.23967).abs() < 1e-5);
        assert!((f.kappa[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn polar_ellipse_vertex_curvature() {
        // polar form of the ellipse a=2, b=1; κ = a/b² = 2 at θ=0
        let (a, b) = (2.0, 1.0);
        let c = PolarCurve::from_fn(256, |t| {
            a * b / ((b * t.cos()).powi(2) + (a * t.sin()).powi(2)).sqrt()
        })
        .unwrap();
        let f = c.metric_and_curvature(Scheme::Spectral).unwrap();
        assert!((f.kappa[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn support_of_circle_and_star() {
        let c = PolarCurve::from_fn(64, |_| 3.0).unwrap();
        let p = c.support(Scheme::Spectral).unwrap();
        assert!(p.iter().all(|&v| (v - 3.0).abs() < 1e-12));

        let c = PolarCurve::from_fn(64, |t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap();
        let p = c.support(Scheme::Spectral).unwrap();
        assert!((p[0] - 1.21 / 1.1).abs() < 1e-12);
        // p <= r pointwise
        for (pj, rj) in p.iter().zip(c.r()) {
            assert!(*pj <= rj + 1e-14);
        }
    }

    #[test]
    fn length_area_circle() {
        let c = PolarCurve::from_fn(64, |_| 1.0).unwrap();
        let (l, a) = c.length_area(Scheme::Spectral).unwrap();
        assert!((l - 2.0 * PI).abs() < 1e-12);
        assert!((a - PI).abs() < 1e-12);
    }

    /// Arclength of the parametric ellipse by fine Simpson quadrature;
    /// independent of the polar pipeline.
    fn ellipse_perimeter_oracle(a: f64, b: f64) -> f64 {
        let n = 200_000;
        let h = 2.0 * PI / n as f64;
        let speed = |t: f64| ((a * t.sin()).powi(2) + (b * t.cos()).powi(2)).sqrt();
        let mut s = 0.0;
        for i in 0..n {
            let t0 = i as f64 * h;
            s += h / 6.0 * (speed(t0) + 4.0 * speed(t0 + 0.5 * h) + speed(t0 + h));
        }
        s
    }

    #[test]
    fn length_area_ellipse_against_oracles() {
        let (a, b) = (2.0, 1.0);
        let c = PolarCurve::from_fn(512, |t| {
            a * b / ((b * t.cos()).powi(2) + (a * t.sin()).powi(2)).sqrt()
        })
        .unwrap();
        let (l, area) = c.length_area(Scheme::Spectral).unwrap();
        assert!((area - PI * a * b).abs() < 1e-10);
        let l_oracle = ellipse_perimeter_oracle(a, b);
        assert!((l_oracle - 9.6884482).abs() < 1e-6);
        assert!((l - l_oracle).abs() < 1e-8);
    }

    #[test]
    fn area_of_cos_star_closed_form() {
        let c = PolarCurve::from_fn(256, |t| 1.0 + 0.3 * (4.0 * t).cos()).unwrap();
        let (_, a) = c.length_area(Scheme::Spectral).unwrap();
        assert!((a - 1.045 * PI).abs() < 1e-12);
        assert!((1.045 * PI - 3.28296).abs() < 1e-5);
    }

    #[test]
    fn symmetry_defect_values() {
        // from_fn evaluates cos at θ and θ+π separately, so allow a ULP
        let even = PolarCurve::from_fn(64, |t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap();
        assert!(even.symmetry_defect() < 1e-15);
        let circle = PolarCurve::from_fn(64, |_| 2.0).unwrap();
        assert_eq!(circle.symmetry_defect(), 0.0);
        let odd = PolarCurve::from_fn(60, |t| 1.0 + 0.1 * (3.0 * t).cos()).unwrap();
        // cos3(θ+π) = -cos3θ so the defect is 0.2·max|cos3θ| = 0.2 (hit at θ=0)
        assert!((odd.symmetry_defect() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn to_marker_small_circle() {
        // n=4 is below the construction minimum; use n=16 and check the axis points
        let c = PolarCurve::from_fn(16, |_| 1.0).unwrap();
        let m = c.to_marker();
        let pts = m.points();
        assert!((pts[0].x - 1.0).abs() < 1e-15 && pts[0].y.abs() < 1e-15);
        assert!((pts[4].y - 1.0).abs() < 1e-15 && pts[4].x.abs() < 1e-15);
        assert!((pts[8].x + 1.0).abs() < 1e-15);
        assert!((pts[12].y + 1.0).abs() < 1e-15);
    }

    #[test]
    fn to_marker_shoelace_area_converges() {
        let c = PolarCurve::from_fn(256, |_| 1.0).unwrap();
        let g = c.to_marker().geometry().unwrap();
        // polygon area approaches π at O(n⁻²)
        let err = (g.signed_area - PI).abs();
        assert!(err < PI * (2.0 * PI / 256.0).powi(2));
    }

    #[test]
    fn to_marker_preserves_centrosymmetry() {
        let c = PolarCurve::from_fn(64, |t| 1.0 + 0.2 * (2.0 * t).cos()).unwrap();
        assert!(c.symmetry_defect() < 1e-15);
        let m = c.to_marker();
        let pts = m.points();
        for j in 0..32 {
            let q = pts[j + 32] + pts[j];
            assert!(q.norm() < 1e-13);
        }
    }

    #[test]
    fn regular_polygon_circle_oracle() {
        let c = PolarCurve::from_fn(256, |_| 1.0).unwrap();
        let g = c.to_marker().geometry().unwrap();
        for &k in &g.kappa {
            assert!((k - 1.0).abs() < 1e-3);
        }
        assert!(g.min_star_det > 0.0);
        assert!((g.min_star_det - 1.0).abs() < 1e-3);
    }

    #[test]
    fn marker_ellipse_signed_area() {
        let (a, b) = (2.0, 1.0);
        let pts: Vec<Vec2> = (0..512)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 512.0;
                Vec2::new(a * t.cos(), b * t.sin())
            })
            .collect();
        let g = MarkerCurve::new(pts).unwrap().geometry().unwrap();
        assert!((g.signed_area - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn marker_orientation_normalized() {
        // clockwise input gets reversed to counterclockwise
        let pts: Vec<Vec2> = (0..64)
            .map(|i| {
                let t = -2.0 * PI * i as f64 / 64.0;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let c = MarkerCurve::new(pts).unwrap();
        let g = c.geometry().unwrap();
        assert!(g.signed_area > 0.0);
        assert!(g.kappa.iter().all(|&k| k > 0.0));
    }

    #[test]
    fn degenerate_edge_rejected() {
        let mut pts: Vec<Vec2> = (0..64)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 64.0;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        pts[10] = pts[11];
        assert!(MarkerCurve::new(pts).is_err());
    }

    #[test]
    fn polar_invariants_g_ge_r_and_r_le_half_length() {
        let c = PolarCurve::from_fn(128, |t| 1.0 + 0.3 * (4.0 * t).cos() + 0.1 * (2.0 * t).sin())
            .unwrap();
        let f = c.metric_and_curvature(Scheme::Spectral).unwrap();
        let (l, _) = c.length_area(Scheme::Spectral).unwrap();
        for j in 0..c.n() {
            assert!(f.g[j] >= c.r()[j] - 1e-14);
            assert!(f.p[j] <= c.r()[j] + 1e-14);
            assert!(c.r()[j] <= 0.5 * l + 1e-10);
        }
    }

    #[test]
    fn length_area_agrees_between_backends() {
        let c = PolarCurve::from_fn(256, |t| 1.0 + 0.25 * (3.0 * t).cos()).unwrap();
        let (lp, ap) = c.length_area(Scheme::Spectral).unwrap();
        let g = c.to_marker().geometry().unwrap();
        let scale = (2.0 * PI / 256.0).powi(2);
        assert!((g.length - lp).abs() < 5.0 * lp * scale);
        assert!((g.signed_area - ap).abs() < 5.0 * ap * scale);
    }

    #[test]
    fn spectral_vs_fd_curvature_convergence_order() {
        let profile = |t: f64| 1.0 + 0.3 * (3.0 * t).cos();
        let mut errs = Vec::new();
        for n in [64usize, 128, 256] {
            let c = PolarCurve::from_fn(n, profile).unwrap();
            let ks = c.metric_and_curvature(Scheme::Spectral).unwrap().kappa;
            let kf = c.metric_and_curvature(Scheme::Fd4).unwrap().kappa;
            let e = ks
                .iter()
                .zip(&kf)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        // fd4 error should shrink by ~16x per doubling
        assert!(errs[0] / errs[1] > 10.0);
        assert!(errs[1] / errs[2] > 10.0);
    }
}
