//! Per-step scalar extraction, a-priori bound checking, decay-quantity
//! fitting and the GAPF-vs-CSF comparison experiment.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowLaw;
use crate::geometry::{MarkerCurve, PolarCurve};
use crate::integrate::{evolve, Curve, Event, EventKind, FlowState, StepperConfig};
use crate::ops::{self, Scheme};

/// One time-sample of every tracked scalar.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiagRecord {
    pub t: f64,
    pub length: f64,
    pub area: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub p_min: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// `max |r_θ|`.
    pub grad_max: f64,
    /// Isoperimetric deficit `L² − 4πA`.
    pub deficit: f64,
    /// `∮ (κ − 2π/L)² ds`.
    pub q2: f64,
    /// `∮ κ_s² ds`.
    pub qs2: f64,
    /// Centrosymmetry defect; `NaN` for marker states.
    pub sym: f64,
}

/// Extract a [`DiagRecord`] from a flow state.
///
/// Arclength integrals are evaluated in θ with the metric weight,
/// `∮ f ds = ∮ f·g dθ`, and `κ_s = κ_θ/g`. Marker states fill the
/// polar-only fields with their marker analogues; `sym` is `NaN` there.
pub fn record(state: &FlowState, _law: FlowLaw, scheme: Scheme) -> Result<DiagRecord> {
    match &state.curve {
        Curve::Polar(c) => record_polar(c, state.t, scheme),
        Curve::Marker(c) => record_marker(c, state.t),
    }
}

fn fold_minmax(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub fn record_polar(c: &PolarCurve, t: f64, scheme: Scheme) -> Result<DiagRecord> {
    let f = c.metric_and_curvature(scheme)?;
    let length = ops::quadrature_periodic(&f.g);
    let r2: Vec<f64> = c.r().iter().map(|r| r * r).collect();
    let area = 0.5 * ops::quadrature_periodic(&r2);
    let (kappa_min, kappa_max) = fold_minmax(&f.kappa);
    let (r_min, r_max) = fold_minmax(c.r());
    let p_min = f.p.iter().cloned().fold(f64::MAX, f64::min);
    let grad_max = f.r_theta.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let shift = 2.0 * PI / length;
    let q2_integrand: Vec<f64> = (0..c.n())
        .map(|j| (f.kappa[j] - shift).powi(2) * f.g[j])
        .collect();
    let q2 = ops::quadrature_periodic(&q2_integrand);
    let kt = ops::diff_periodic(&f.kappa, 1, scheme)?;
    let qs2_integrand: Vec<f64> = (0..c.n())
        .map(|j| {
            let ks = kt[j] / f.g[j];
            ks * ks * f.g[j]
        })
        .collect();
    let qs2 = ops::quadrature_periodic(&qs2_integrand);
    Ok(DiagRecord {
        t,
        length,
        area,
        kappa_min,
        kappa_max,
        p_min,
        r_min,
        r_max,
        grad_max,
        deficit: length * length - 4.0 * PI * area,
        q2,
        qs2,
        sym: c.symmetry_defect(),
    })
}

pub fn record_marker(c: &MarkerCurve, t: f64) -> Result<DiagRecord> {
    let g = c.geometry()?;
    let m = c.m();
    let pts = c.points();
    let (kappa_min, kappa_max) = fold_minmax(&g.kappa);
    let radii: Vec<f64> = pts.iter().map(|p| p.norm()).collect();
    let (r_min, r_max) = fold_minmax(&radii);
    // support p = det(X, T) for unit tangent; its minimum is the star determinant
    let p: Vec<f64> = (0..m).map(|i| pts[i].cross(g.tangent[i])).collect();
    let p_min = g.min_star_det;
    let shift = 2.0 * PI / g.length;
    let q2: f64 = (0..m)
        .map(|i| (g.kappa[i] - shift).powi(2) * g.ds[i])
        .sum();
    let qs2: f64 = (0..m)
        .map(|i| {
            let prev = g.kappa[(i + m - 1) % m];
            let next = g.kappa[(i + 1) % m];
            let ks = (next - prev) / (2.0 * g.ds[i]);
            ks * ks * g.ds[i]
        })
        .sum();
    // r_θ analogue via r_θ = r·⟨X,T⟩/p
    let grad_max = (0..m)
        .map(|i| {
            let xt = pts[i].dot(g.tangent[i]);
            if p[i].abs() > 1e-12 {
                (radii[i] * xt / p[i]).abs()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0f64, f64::max);
    Ok(DiagRecord {
        t,
        length: g.length,
        area: g.signed_area,
        kappa_min,
        kappa_max,
        p_min,
        r_min,
        r_max,
        grad_max,
        deficit: g.length * g.length - 4.0 * PI * g.signed_area,
        q2,
        qs2,
        sym: f64::NAN,
    })
}

/// Worst-case signed margin and first violation time of one tracked bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundMargin {
    /// Most negative slack observed (positive margin = bound satisfied).
    pub worst_margin: f64,
    /// Time of the first record whose margin fell below `-tolerance`.
    pub first_violation_t: Option<f64>,
}

impl BoundMargin {
    fn track(records: impl Iterator<Item = (f64, f64)>, tolerance: f64) -> Self {
        let mut worst = f64::MAX;
        let mut first = None;
        for (t, margin) in records {
            if margin < worst {
                worst = margin;
            }
            if first.is_none() && margin < -tolerance {
                first = Some(t);
            }
        }
        BoundMargin {
            worst_margin: worst,
            first_violation_t: first,
        }
    }

    pub fn violated(&self) -> bool {
        self.first_violation_t.is_some()
    }
}

/// Margins for the conserved/bounded quantities of a GAPF run.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// `|A − A₀|` stays below tolerance (margin = tol·A₀ − |A − A₀|).
    pub area_constancy: BoundMargin,
    /// `L ≥ √(4πA₀)`.
    pub length_lower: BoundMargin,
    /// `L ≤ L₀`.
    pub length_upper: BoundMargin,
    /// `r ≤ L₀/2`.
    pub radius_bound: BoundMargin,
    /// `max|r_θ| ≤ C₁ = max{max|r_θ(·,0)|, 3L₀/π}`.
    pub gradient_bound: BoundMargin,
    /// `p_min > 0`.
    pub support_positive: BoundMargin,
    /// The constant `C₁` computed from the initial record.
    pub c1: f64,
    pub violations: usize,
}

impl BoundReport {
    pub fn violation_count(&self) -> usize {
        [
            &self.area_constancy,
            &self.length_lower,
            &self.length_upper,
            &self.radius_bound,
            &self.gradient_bound,
            &self.support_positive,
        ]
        .iter()
        .filter(|b| b.violated())
        .count()
    }
}

/// Evaluate every a-priori bound over a run history.
///
/// `area_tol` is the absolute tolerance on `|A − A₀|`; the geometric
/// bounds use `geom_tol` (defaults in the verify suite: `10⁻⁸·L₀`).
pub fn check_bounds(
    history: &[DiagRecord],
    initial: &DiagRecord,
    area_tol: f64,
    geom_tol: f64,
) -> BoundReport {
    let l0 = initial.length;
    let a0 = initial.area;
    let c1 = initial.grad_max.max(3.0 * l0 / PI);
    let length_floor = (4.0 * PI * a0).sqrt();
    let mut report = BoundReport {
        area_constancy: BoundMargin::track(
            history.iter().map(|r| (r.t, area_tol - (r.area - a0).abs())),
            0.0,
        ),
        length_lower: BoundMargin::track(
            history.iter().map(|r| (r.t, r.length - length_floor)),
            geom_tol,
        ),
        length_upper: BoundMargin::track(history.iter().map(|r| (r.t, l0 - r.length)), geom_tol),
        radius_bound: BoundMargin::track(
            history.iter().map(|r| (r.t, 0.5 * l0 - r.r_max)),
            geom_tol,
        ),
        gradient_bound: BoundMargin::track(
            history.iter().map(|r| (r.t, c1 - r.grad_max)),
            geom_tol,
        ),
        support_positive: BoundMargin::track(history.iter().map(|r| (r.t, r.p_min)), 0.0),
        c1,
        violations: 0,
    };
    report.violations = report.violation_count();
    report
}

/// Result of the dual-run comparison experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CompareOutcome {
    /// `min over (θ, t)` of `r_GAPF − ρ_CSF` up to the CSF termination.
    pub min_margin: f64,
    /// Shared record times.
    pub t_grid: Vec<f64>,
    /// Minimum of the GAPF support function over the whole window.
    pub gapf_p_min: f64,
    pub csf_terminal: Event,
}

/// Run GAPF and CSF side by side from the same initial curve on a shared
/// checkpoint grid and measure the radial comparison margin.
pub fn compare_gapf_csf(
    initial: &PolarCurve,
    cfg: &StepperConfig,
    scheme: Scheme,
) -> Result<CompareOutcome> {
    if initial.symmetry_defect() >= 1e-10 {
        return Err(Error::InvalidCurve(
            "comparison experiment requires centrosymmetric initial data".into(),
        ));
    }
    // both runs must cover the full shared horizon; suppress the early
    // Converged stop so the comparison stays pointwise in time
    let mut full_cfg = cfg.clone();
    full_cfg.tol_circle = 1e-300;
    let snapshots = |law: FlowLaw| -> (Vec<(f64, Vec<f64>)>, Vec<Event>, f64) {
        let mut snaps = Vec::new();
        let mut p_min = f64::MAX;
        let outcome = evolve(
            FlowState::polar(initial.clone()),
            law,
            &full_cfg,
            scheme,
            |state, rec| {
                if let Curve::Polar(c) = &state.curve {
                    snaps.push((state.t, c.r().to_vec()));
                }
                p_min = p_min.min(rec.p_min);
            },
        );
        (snaps, outcome.events, p_min)
    };
    let (gapf_snaps, _, gapf_p_min) = snapshots(FlowLaw::Gapf);
    let (csf_snaps, csf_events, _) = snapshots(FlowLaw::Csf);
    let csf_terminal = csf_events
        .iter()
        .rev()
        .find(|e| e.kind != EventKind::ConvexityReached)
        .cloned()
        .expect("every run has a terminal event");

    let mut min_margin = f64::MAX;
    let mut t_grid = Vec::new();
    for ((tg, rg), (tc, rc)) in gapf_snaps.iter().zip(&csf_snaps) {
        // shared checkpoint grid: times must line up
        assert!(
            (tg - tc).abs() <= 1e-12 * (1.0 + tg.abs()),
            "record grids diverged: {tg} vs {tc}"
        );
        t_grid.push(*tg);
        for (a, b) in rg.iter().zip(rc) {
            min_margin = min_margin.min(a - b);
        }
    }
    Ok(CompareOutcome {
        min_margin,
        t_grid,
        gapf_p_min,
        csf_terminal,
    })
}

/// Which tracked decay quantity to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecayField {
    Q2,
    Qs2,
}

/// Exponential-decay fit of a tracked field over a time window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    /// Least-squares slope of `log(field)` vs `t` (1/time; negative = decay).
    pub rate: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fitted fields below this value are treated as numerical noise and the
/// fit is refused.
pub const DECAY_NOISE_FLOOR: f64 = 1e-12;

pub fn decay_fit(
    history: &[DiagRecord],
    field: DecayField,
    window: (f64, f64),
) -> Result<DecayFit> {
    let pick = |r: &DiagRecord| match field {
        DecayField::Q2 => r.q2,
        DecayField::Qs2 => r.qs2,
    };
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|r| r.t >= window.0 && r.t <= window.1)
        .map(|r| (r.t, pick(r)))
        .collect();
    if pts.len() < 3 {
        return Err(Error::FitRefused(format!(
            "window [{:.3}, {:.3}] holds only {} records",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| *v <= DECAY_NOISE_FLOOR) {
        return Err(Error::FitRefused(format!(
            "field at noise floor ({v:.3e} at t = {t:.4})"
        )));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_y = pts.iter().map(|(_, v)| v.ln()).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, v) in &pts {
        sxx += (t - mean_t).powi(2);
        sxy += (t - mean_t) * (v.ln() - mean_y);
    }
    let rate = sxy / sxx;
    let intercept = mean_y - rate * mean_t;
    let ss: f64 = pts
        .iter()
        .map(|(t, v)| (v.ln() - rate * t - intercept).powi(2))
        .sum();
    Ok(DecayFit {
        rate,
        residual: (ss / n).sqrt(),
        window,
        samples: pts.len(),
    })
}
