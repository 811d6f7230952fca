//! Right-hand sides of the two flows in polar and marker form, plus the
//! curvature/support evolution identities used as consistency residuals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{MarkerCurve, PolarCurve, Vec2};
use crate::ops::{self, Scheme};

/// Normal speed selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FlowLaw {
    /// Gage's area-preserving flow, normal speed `κ − 2π/L`.
    Gapf,
    /// Curve shortening flow, normal speed `κ`.
    Csf,
}

impl std::str::FromStr for FlowLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gapf" => Ok(FlowLaw::Gapf),
            "csf" => Ok(FlowLaw::Csf),
            other => Err(Error::Config(format!("unknown flow law `{other}`"))),
        }
    }
}

/// Why a right-hand-side evaluation (and hence a run) must stop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowStop {
    /// Some radius fell to the configured floor; the curve is about to
    /// lose star-shapedness about the origin.
    StarShapeLost { min_r: f64 },
    /// Non-finite state or curvature beyond the ceiling.
    BlowUp { detail: f64 },
}

/// `dr/dt` for the polar radial PDE.
///
/// GAPF: `r_t = r_θθ/g² − 2r_θ²/(rg²) − r/g² + 2πg/(rL)`; CSF drops the
/// nonlocal term. `L` is recomputed from the current samples on every
/// call so each integrator stage sees a consistent nonlocal value.
pub fn polar_rhs(
    c: &PolarCurve,
    law: FlowLaw,
    scheme: Scheme,
    r_floor: f64,
) -> std::result::Result<Vec<f64>, FlowStop> {
    let r = c.r();
    let min_r = r.iter().cloned().fold(f64::MAX, f64::min);
    if min_r <= r_floor {
        return Err(FlowStop::StarShapeLost { min_r });
    }
    let rt = ops::diff_periodic(r, 1, scheme).map_err(|_| FlowStop::BlowUp { detail: f64::NAN })?;
    let rtt = ops::diff_periodic(r, 2, scheme).map_err(|_| FlowStop::BlowUp { detail: f64::NAN })?;
    let g: Vec<f64> = r.iter().zip(&rt).map(|(&r, &d)| r.hypot(d)).collect();
    let length = ops::quadrature_periodic(&g);
    let n = r.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let g2 = g[j] * g[j];
        let mut v = rtt[j] / g2 - 2.0 * rt[j] * rt[j] / (r[j] * g2) - r[j] / g2;
        if law == FlowLaw::Gapf {
            v += 2.0 * PI * g[j] / (r[j] * length);
        }
        if !v.is_finite() {
            return Err(FlowStop::BlowUp { detail: v });
        }
        out.push(v);
    }
    Ok(out)
}

/// Per-vertex velocities for the marker backend.
///
/// The normal part is `β·N` with `N` the inward normal and `β` per the
/// law (`L` from the polygon length for GAPF). The tangential part
/// relaxes the arclength spacing toward equidistribution; it changes
/// the parameterization, never the shape.
pub fn marker_rhs(c: &MarkerCurve, law: FlowLaw) -> Result<Vec<Vec2>> {
    let geo = c.geometry()?;
    let m = c.m();
    let pts = c.points();
    let beta: Vec<f64> = match law {
        FlowLaw::Csf => geo.kappa.clone(),
        FlowLaw::Gapf => {
            let shift = 2.0 * PI / geo.length;
            geo.kappa.iter().map(|k| k - shift).collect()
        }
    };
    // redistribution speed scale: fastest normal speed on the curve
    let speed_scale = beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let e_prev = (pts[i] - pts[(i + m - 1) % m]).norm();
        let e_next = (pts[(i + 1) % m] - pts[i]).norm();
        let alpha = speed_scale * (e_next - e_prev) / (e_next + e_prev);
        out.push(geo.normal[i] * beta[i] + geo.tangent[i] * alpha);
    }
    Ok(out)
}

/// Finite-difference residuals of the curvature and support evolution
/// identities between two consecutive accepted states.
///
/// The identities `κ_t = κ_ss + κ³ − (2π/L)κ²` and
/// `p_t = 2π/L − κ + ⟨X,T⟩κ_s` hold following pure normal motion; at
/// fixed θ the radial gauge adds the tangential transport `α·κ_s`
/// (resp. `α·p_s`) with `α = −β·r_θ/r`. `res_kappa` and `res_support`
/// are the max-norm defects of the transported identities at the
/// midpoint state, with arclength derivatives from the chain rule
/// `∂/∂s = (1/g)∂/∂θ`.
pub fn consistency_residuals(
    c_prev: &PolarCurve,
    c_next: &PolarCurve,
    dt: f64,
    law: FlowLaw,
    scheme: Scheme,
) -> Result<(f64, f64)> {
    if c_prev.n() != c_next.n() {
        return Err(Error::GridMismatch(c_prev.n(), c_next.n()));
    }
    assert!(dt > 0.0, "dt must be positive");
    let n = c_prev.n();
    let mid = PolarCurve::new(
        c_prev
            .r()
            .iter()
            .zip(c_next.r())
            .map(|(a, b)| 0.5 * (a + b))
            .collect(),
    )?;
    let fp = c_prev.metric_and_curvature(scheme)?;
    let fnx = c_next.metric_and_curvature(scheme)?;
    let fm = mid.metric_and_curvature(scheme)?;
    let (length, _) = mid.length_area(scheme)?;
    let shift = match law {
        FlowLaw::Gapf => 2.0 * PI / length,
        FlowLaw::Csf => 0.0,
    };

    let arclength_d = |f: &[f64], g: &[f64]| -> Result<Vec<f64>> {
        let ft = ops::diff_periodic(f, 1, scheme)?;
        Ok(ft.iter().zip(g).map(|(d, gj)| d / gj).collect())
    };

    let kappa_s = arclength_d(&fm.kappa, &fm.g)?;
    let kappa_ss = arclength_d(&kappa_s, &fm.g)?;
    let p_s = arclength_d(&fm.p, &fm.g)?;

    // ⟨X,T⟩ = r·r_θ/g in polar form
    let xt: Vec<f64> = (0..n)
        .map(|j| mid.r()[j] * fm.r_theta[j] / fm.g[j])
        .collect();

    let mut res_kappa = 0.0f64;
    let mut res_support = 0.0f64;
    for j in 0..n {
        let k = fm.kappa[j];
        let beta = k - shift;
        let alpha = -beta * fm.r_theta[j] / mid.r()[j];
        let lhs_k = (fnx.kappa[j] - fp.kappa[j]) / dt;
        let rhs_k = kappa_ss[j] + k * k * k - shift * k * k + alpha * kappa_s[j];
        res_kappa = res_kappa.max((lhs_k - rhs_k).abs());

        let lhs_p = (fnx.p[j] - fp.p[j]) / dt;
        let rhs_p = shift - k + xt[j] * kappa_s[j] + alpha * p_s[j];
        res_support = res_support.max((lhs_p - rhs_p).abs());
    }
    Ok((res_kappa, res_support))
}

/// Max-norm residual of the pointwise identity `p_s = κ⟨X,T⟩` on a
/// single state; a pure spatial-operator check.
pub fn support_slope_residual(c: &PolarCurve, scheme: Scheme) -> Result<f64> {
    let f = c.metric_and_curvature(scheme)?;
    let pt = ops::diff_periodic(&f.p, 1, scheme)?;
    let mut worst = 0.0f64;
    for j in 0..c.n() {
        let p_s = pt[j] / f.g[j];
        let xt = c.r()[j] * f.r_theta[j] / f.g[j];
        worst = worst.max((p_s - f.kappa[j] * xt).abs());
    }
    Ok(worst)
}
