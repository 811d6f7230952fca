//! Explicit time stepping with stability-based step control, checkpoint
//! alignment and event detection.

use std::f64::consts::PI;

use serde::Serialize;

use crate::diagnostics::{record, DiagRecord};
use crate::flow::{marker_rhs, polar_rhs, FlowLaw, FlowStop};
use crate::geometry::{MarkerCurve, PolarCurve, Vec2};
use crate::ops::Scheme;

/// The evolving curve, either backend.
#[derive(Debug, Clone)]
pub enum Curve {
    Polar(PolarCurve),
    Marker(MarkerCurve),
}

/// A curve together with its flow time.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub curve: Curve,
    pub t: f64,
    pub step_index: u64,
}

impl FlowState {
    pub fn polar(c: PolarCurve) -> Self {
        FlowState {
            curve: Curve::Polar(c),
            t: 0.0,
            step_index: 0,
        }
    }
    pub fn marker(c: MarkerCurve) -> Self {
        FlowState {
            curve: Curve::Marker(c),
            t: 0.0,
            step_index: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    ConvexityReached,
    Converged,
    StarShapeLost,
    BlowUp,
    TimeLimit,
}

/// A detected milestone or terminal condition of a run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub t_event: f64,
    /// Context scalar: κ_min at convexity/convergence detection, min r at
    /// star-shape loss, the offending magnitude at blow-up.
    pub detail: f64,
}

/// Time stepper selector. The id namespace deliberately leaves room for
/// a future semi-implicit scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stepper {
    Rk4,
    SspRk3,
}

impl std::str::FromStr for Stepper {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "rk4" => Ok(Stepper::Rk4),
            "ssprk3" => Ok(Stepper::SspRk3),
            other => Err(crate::error::Error::Config(format!(
                "unknown stepper `{other}`"
            ))),
        }
    }
}

/// Run control knobs. All fields positive; see `Default` for the desk
/// defaults.
#[derive(Debug, Clone, Serialize)]
pub struct StepperConfig {
    pub stepper: Stepper,
    /// Fraction of the explicit-diffusion stability limit, in (0, 1].
    pub cfl: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// κ_min threshold certifying convexity. When `None`, the default
    /// `10⁻³·(2π/L₀)` is derived from the initial length at run start.
    pub tol_convex: Option<f64>,
    /// Relative curvature flatness threshold for circle convergence.
    pub tol_circle: f64,
    /// Radius floor; `None` derives `10⁻⁶·(initial mean radius)`.
    pub r_floor: Option<f64>,
    pub kappa_ceiling: f64,
    /// Stable-step collapse threshold; `None` derives `10⁻⁷·t_end`.
    /// A step size this small pins the state at a finite-time
    /// singularity (marker edges shrinking to zero), so the run stops
    /// with a blow-up event instead of grinding forever.
    pub dt_floor: Option<f64>,
    /// Number of records over `[0, t_end]`.
    pub record_count: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            stepper: Stepper::Rk4,
            cfl: 0.4,
            dt_max: 1.0,
            t_end: 10.0,
            tol_convex: None,
            tol_circle: 1e-3,
            r_floor: None,
            kappa_ceiling: 1e6,
            dt_floor: None,
            record_count: 200,
        }
    }
}

/// Largest stable explicit step for the current state.
///
/// Polar: `dt = min(dt_max, cfl·Δθ²·min g²/2)` (the diffusion
/// coefficient of the radial PDE is `1/g²`); marker:
/// `dt = min(dt_max, cfl·min Δs²/2)`.
pub fn stable_dt(state: &FlowState, cfg: &StepperConfig, scheme: Scheme) -> f64 {
    let dt = match &state.curve {
        Curve::Polar(c) => {
            let dtheta = 2.0 * PI / c.n() as f64;
            let g_min = match c.metric_and_curvature(scheme) {
                Ok(f) => f.g.iter().cloned().fold(f64::MAX, f64::min),
                Err(_) => return cfg.dt_max.min(1e-300),
            };
            cfg.cfl * dtheta * dtheta * g_min * g_min / 2.0
        }
        Curve::Marker(c) => {
            let pts = c.points();
            let m = pts.len();
            let min_edge = (0..m)
                .map(|i| (pts[(i + 1) % m] - pts[i]).norm())
                .fold(f64::MAX, f64::min);
            cfg.cfl * min_edge * min_edge / 2.0
        }
    };
    dt.min(cfg.dt_max)
}

fn polar_step(
    c: &PolarCurve,
    law: FlowLaw,
    dt: f64,
    stepper: Stepper,
    scheme: Scheme,
    r_floor: f64,
) -> Result<PolarCurve, FlowStop> {
    let rhs = |r: &[f64]| -> Result<Vec<f64>, FlowStop> {
        let c = PolarCurve::new(r.to_vec()).map_err(|_| FlowStop::StarShapeLost {
            min_r: r.iter().cloned().fold(f64::MAX, f64::min),
        })?;
        polar_rhs(&c, law, scheme, r_floor)
    };
    let axpy = |r: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        r.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };
    let r0 = c.r();
    let next = match stepper {
        Stepper::Rk4 => {
            let k1 = rhs(r0)?;
            let k2 = rhs(&axpy(r0, &k1, 0.5 * dt))?;
            let k3 = rhs(&axpy(r0, &k2, 0.5 * dt))?;
            let k4 = rhs(&axpy(r0, &k3, dt))?;
            (0..r0.len())
                .map(|j| r0[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
                .collect::<Vec<f64>>()
        }
        Stepper::SspRk3 => {
            let k1 = rhs(r0)?;
            let u1 = axpy(r0, &k1, dt);
            let k2 = rhs(&u1)?;
            let u2: Vec<f64> = (0..r0.len())
                .map(|j| 0.75 * r0[j] + 0.25 * (u1[j] + dt * k2[j]))
                .collect();
            let k3 = rhs(&u2)?;
            (0..r0.len())
                .map(|j| r0[j] / 3.0 + 2.0 / 3.0 * (u2[j] + dt * k3[j]))
                .collect::<Vec<f64>>()
        }
    };
    let min_r = next.iter().cloned().fold(f64::MAX, f64::min);
    if !next.iter().all(|v| v.is_finite()) {
        return Err(FlowStop::BlowUp { detail: f64::NAN });
    }
    if min_r <= r_floor {
        return Err(FlowStop::StarShapeLost { min_r });
    }
    PolarCurve::new(next).map_err(|_| FlowStop::StarShapeLost { min_r })
}

fn marker_step(
    c: &MarkerCurve,
    law: FlowLaw,
    dt: f64,
    stepper: Stepper,
) -> Result<MarkerCurve, FlowStop> {
    let rhs = |pts: &[Vec2]| -> Result<Vec<Vec2>, FlowStop> {
        let c = MarkerCurve::new(pts.to_vec()).map_err(|_| FlowStop::BlowUp { detail: f64::NAN })?;
        marker_rhs(&c, law).map_err(|_| FlowStop::BlowUp { detail: f64::NAN })
    };
    let axpy = |p: &[Vec2], k: &[Vec2], s: f64| -> Vec<Vec2> {
        p.iter().zip(k).map(|(a, b)| *a + *b * s).collect()
    };
    let p0 = c.points();
    let next = match stepper {
        Stepper::Rk4 => {
            let k1 = rhs(p0)?;
            let k2 = rhs(&axpy(p0, &k1, 0.5 * dt))?;
            let k3 = rhs(&axpy(p0, &k2, 0.5 * dt))?;
            let k4 = rhs(&axpy(p0, &k3, dt))?;
            (0..p0.len())
                .map(|j| p0[j] + (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (dt / 6.0))
                .collect::<Vec<Vec2>>()
        }
        Stepper::SspRk3 => {
            let k1 = rhs(p0)?;
            let u1 = axpy(p0, &k1, dt);
            let k2 = rhs(&u1)?;
            let u2: Vec<Vec2> = (0..p0.len())
                .map(|j| p0[j] * 0.75 + (u1[j] + k2[j] * dt) * 0.25)
                .collect();
            let k3 = rhs(&u2)?;
            (0..p0.len())
                .map(|j| p0[j] * (1.0 / 3.0) + (u2[j] + k3[j] * dt) * (2.0 / 3.0))
                .collect::<Vec<Vec2>>()
        }
    };
    if !next.iter().all(|p| p.is_finite()) {
        return Err(FlowStop::BlowUp { detail: f64::NAN });
    }
    MarkerCurve::new(next).map_err(|_| FlowStop::BlowUp { detail: f64::NAN })
}

/// One accepted step of the chosen stepper. The nonlocal length is
/// recomputed inside every stage evaluation.
pub fn step(
    state: &FlowState,
    law: FlowLaw,
    dt: f64,
    cfg: &StepperConfig,
    scheme: Scheme,
) -> Result<FlowState, FlowStop> {
    let r_floor = resolve_r_floor(state, cfg);
    let curve = match &state.curve {
        Curve::Polar(c) => Curve::Polar(polar_step(c, law, dt, cfg.stepper, scheme, r_floor)?),
        Curve::Marker(c) => Curve::Marker(marker_step(c, law, dt, cfg.stepper)?),
    };
    Ok(FlowState {
        curve,
        t: state.t + dt,
        step_index: state.step_index + 1,
    })
}

fn resolve_r_floor(state: &FlowState, cfg: &StepperConfig) -> f64 {
    match cfg.r_floor {
        Some(v) => v,
        None => match &state.curve {
            Curve::Polar(c) => 1e-6 * c.mean_radius(),
            Curve::Marker(c) => {
                let mean: f64 =
                    c.points().iter().map(|p| p.norm()).sum::<f64>() / c.m() as f64;
                1e-6 * mean
            }
        },
    }
}

/// Completed run: final state plus the ordered event list (at most one
/// `ConvexityReached`, exactly one terminal event).
#[derive(Debug)]
pub struct RunOutcome {
    pub final_state: FlowState,
    pub events: Vec<Event>,
}

impl RunOutcome {
    pub fn terminal(&self) -> &Event {
        self.events
            .iter()
            .rev()
            .find(|e| e.kind != EventKind::ConvexityReached)
            .expect("terminal event always present")
    }
    pub fn convexity(&self) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == EventKind::ConvexityReached)
    }
}

/// Advance a state to `t_end` or a terminal event, invoking the recorder
/// at every checkpoint of the uniform record grid (steps are clipped so
/// checkpoints are hit exactly, which lets two runs share a grid).
pub fn evolve<F: FnMut(&FlowState, &DiagRecord)>(
    initial: FlowState,
    law: FlowLaw,
    cfg: &StepperConfig,
    scheme: Scheme,
    mut recorder: F,
) -> RunOutcome {
    let mut state = initial;
    let mut events: Vec<Event> = Vec::new();
    let r_floor = resolve_r_floor(&state, cfg);
    let mut cfg = cfg.clone();
    cfg.r_floor = Some(r_floor);

    let initial_record = match record(&state, law, scheme) {
        Ok(r) => r,
        Err(_) => {
            events.push(Event {
                kind: EventKind::BlowUp,
                t_event: state.t,
                detail: f64::NAN,
            });
            return RunOutcome {
                final_state: state,
                events,
            };
        }
    };
    let area0 = initial_record.area;
    let kappa_limit = (PI / area0).sqrt();
    let tol_convex = cfg
        .tol_convex
        .unwrap_or(1e-3 * 2.0 * PI / initial_record.length);

    let record_dt = cfg.t_end / cfg.record_count as f64;
    let dt_floor = cfg.dt_floor.unwrap_or(1e-7 * cfg.t_end);
    let mut convex_seen = false;

    let mut check_record = |state: &FlowState,
                            rec: &DiagRecord,
                            events: &mut Vec<Event>,
                            convex_seen: &mut bool|
     -> bool {
        recorder(state, rec);
        if !*convex_seen && rec.kappa_min >= tol_convex {
            *convex_seen = true;
            events.push(Event {
                kind: EventKind::ConvexityReached,
                t_event: state.t,
                detail: rec.kappa_min,
            });
        }
        let flat = (rec.kappa_min / kappa_limit - 1.0)
            .abs()
            .max((rec.kappa_max / kappa_limit - 1.0).abs());
        // circle convergence is a GAPF statement; CSF shrinks self-similarly
        // and would satisfy the flatness test trivially
        if law == FlowLaw::Gapf && flat < cfg.tol_circle {
            events.push(Event {
                kind: EventKind::Converged,
                t_event: state.t,
                detail: rec.kappa_min,
            });
            return true;
        }
        false
    };

    if check_record(&state, &initial_record, &mut events, &mut convex_seen) {
        return RunOutcome {
            final_state: state,
            events,
        };
    }

    let mut next_checkpoint_idx = 1usize;
    loop {
        if state.t >= cfg.t_end - 1e-14 * cfg.t_end {
            events.push(Event {
                kind: EventKind::TimeLimit,
                t_event: state.t,
                detail: 0.0,
            });
            break;
        }
        let checkpoint = (next_checkpoint_idx as f64 * record_dt).min(cfg.t_end);
        let mut dt = stable_dt(&state, &cfg, scheme);
        if dt < dt_floor {
            events.push(Event {
                kind: EventKind::BlowUp,
                t_event: state.t,
                detail: dt,
            });
            break;
        }
        let mut lands_on_checkpoint = false;
        if state.t + dt >= checkpoint - 1e-14 * cfg.t_end {
            dt = checkpoint - state.t;
            lands_on_checkpoint = true;
        }
        match step(&state, law, dt, &cfg, scheme) {
            Ok(next) => {
                state = next;
                if lands_on_checkpoint {
                    state.t = checkpoint; // kill roundoff drift on the shared grid
                    next_checkpoint_idx += 1;
                    match record(&state, law, scheme) {
                        Ok(rec) => {
                            if rec.kappa_max.abs() > cfg.kappa_ceiling {
                                recorder(&state, &rec);
                                events.push(Event {
                                    kind: EventKind::BlowUp,
                                    t_event: state.t,
                                    detail: rec.kappa_max,
                                });
                                break;
                            }
                            if check_record(&state, &rec, &mut events, &mut convex_seen) {
                                break;
                            }
                        }
                        Err(_) => {
                            events.push(Event {
                                kind: EventKind::BlowUp,
                                t_event: state.t,
                                detail: f64::NAN,
                            });
                            break;
                        }
                    }
                }
            }
            Err(FlowStop::StarShapeLost { min_r }) => {
                events.push(Event {
                    kind: EventKind::StarShapeLost,
                    t_event: state.t,
                    detail: min_r,
                });
                break;
            }
            Err(FlowStop::BlowUp { detail }) => {
                events.push(Event {
                    kind: EventKind::BlowUp,
                    t_event: state.t,
                    detail,
                });
                break;
            }
        }
    }
    RunOutcome {
        final_state: state,
        events,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, radius: f64) -> PolarCurve {
        PolarCurve::from_fn(n, |_| radius).unwrap()
    }

    #[test]
    fn stable_dt_formula_on_unit_circle() {
        let cfg = StepperConfig {
            cfl: 0.5,
            dt_max: 1.0,
            ..Default::default()
        };
        let state = FlowState::polar(circle(64, 1.0));
        let dt = stable_dt(&state, &cfg, Scheme::Spectral);
        let dtheta = 2.0 * PI / 64.0;
        let expect = 0.5 * dtheta * dtheta / 2.0;
        assert!((dt - expect).abs() < 1e-15);
        assert!((expect - 2.41e-3).abs() < 1e-4);
    }

    #[test]
    fn doubling_n_quarters_dt() {
        let cfg = StepperConfig::default();
        let d64 = stable_dt(&FlowState::polar(circle(64, 1.0)), &cfg, Scheme::Spectral);
        let d128 = stable_dt(&FlowState::polar(circle(128, 1.0)), &cfg, Scheme::Spectral);
        assert!((d64 / d128 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dt_capped_by_dt_max() {
        let cfg = StepperConfig {
            dt_max: 1e-6,
            ..Default::default()
        };
        let dt = stable_dt(&FlowState::polar(circle(64, 5.0)), &cfg, Scheme::Spectral);
        assert!(dt <= 1e-6);
    }

    #[test]
    fn gapf_circle_step_is_identity() {
        let cfg = StepperConfig::default();
        let state = FlowState::polar(circle(64, 1.0));
        let dt = stable_dt(&state, &cfg, Scheme::Spectral);
        let next = step(&state, FlowLaw::Gapf, dt, &cfg, Scheme::Spectral).unwrap();
        if let Curve::Polar(c) = &next.curve {
            for &r in c.r() {
                assert!((r - 1.0).abs() < 1e-14);
            }
        } else {
            panic!("backend changed");
        }
    }

    #[test]
    fn csf_circle_matches_exact_solution() {
        // dR/dt = -1/R gives R(t) = sqrt(1 - 2t)
        let cfg = StepperConfig {
            t_end: 0.375,
            record_count: 50,
            ..Default::default()
        };
        let out = evolve(
            FlowState::polar(circle(128, 1.0)),
            FlowLaw::Csf,
            &cfg,
            Scheme::Spectral,
            |_, _| {},
        );
        assert_eq!(out.terminal().kind, EventKind::TimeLimit);
        if let Curve::Polar(c) = &out.final_state.curve {
            let expect = (1.0f64 - 2.0 * 0.375).sqrt();
            for &r in c.r() {
                assert!((r - expect).abs() < 1e-6, "r = {r}, expect {expect}");
            }
        } else {
            panic!("backend changed");
        }
    }

    #[test]
    fn rk4_richardson_order_on_ellipse() {
        let (a, b) = (2.0, 1.0);
        let c = PolarCurve::from_fn(128, |t| {
            a * b / ((b * t.cos()).powi(2) + (a * t.sin()).powi(2)).sqrt()
        })
        .unwrap();
        let cfg = StepperConfig::default();
        let state = FlowState::polar(c);
        let errs: Vec<f64> = [2e-4, 1e-4]
            .iter()
            .map(|&dt| {
                let one = step(&state, FlowLaw::Gapf, dt, &cfg, Scheme::Spectral).unwrap();
                let half = step(&state, FlowLaw::Gapf, dt / 2.0, &cfg, Scheme::Spectral).unwrap();
                let two = step(&half, FlowLaw::Gapf, dt / 2.0, &cfg, Scheme::Spectral).unwrap();
                match (&one.curve, &two.curve) {
                    (Curve::Polar(x), Curve::Polar(y)) => x
                        .r()
                        .iter()
                        .zip(y.r())
                        .map(|(u, v)| (u - v).abs())
                        .fold(0.0, f64::max),
                    _ => unreachable!(),
                }
            })
            .collect();
        // halving dt should shrink the one-vs-two-half-steps gap ~2⁵
        let ratio = errs[0] / errs[1];
        assert!(ratio > 20.0, "observed ratio {ratio}");
    }

    #[test]
    fn gapf_circle_stays_unchanged() {
        // an exact circle satisfies the convergence test immediately
        let cfg = StepperConfig {
            t_end: 0.05,
            record_count: 10,
            ..Default::default()
        };
        let out = evolve(
            FlowState::polar(circle(64, 1.5)),
            FlowLaw::Gapf,
            &cfg,
            Scheme::Spectral,
            |_, _| {},
        );
        assert_eq!(out.terminal().kind, EventKind::Converged);
        if let Curve::Polar(c) = &out.final_state.curve {
            for &r in c.r() {
                assert!((r - 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn short_gapf_run_hits_time_limit() {
        let c = PolarCurve::from_fn(64, |t| 1.0 + 0.2 * (2.0 * t).cos()).unwrap();
        let cfg = StepperConfig {
            t_end: 0.01,
            record_count: 5,
            ..Default::default()
        };
        let out = evolve(
            FlowState::polar(c),
            FlowLaw::Gapf,
            &cfg,
            Scheme::Spectral,
            |_, _| {},
        );
        assert_eq!(out.terminal().kind, EventKind::TimeLimit);
        assert!((out.final_state.t - 0.01).abs() < 1e-15);
    }

    #[test]
    fn csf_circle_extinction_time() {
        let cfg = StepperConfig {
            t_end: 1.0,
            record_count: 100,
            ..Default::default()
        };
        let out = evolve(
            FlowState::polar(circle(128, 1.0)),
            FlowLaw::Csf,
            &cfg,
            Scheme::Spectral,
            |_, _| {},
        );
        let terminal = out.terminal();
        assert!(
            terminal.kind == EventKind::StarShapeLost || terminal.kind == EventKind::BlowUp,
            "got {:?}",
            terminal.kind
        );
        assert!(
            (terminal.t_event - 0.5).abs() < 0.005,
            "extinction at t = {}",
            terminal.t_event
        );
    }

    #[test]
    fn determinism_bitwise() {
        let c = PolarCurve::from_fn(64, |t| 1.0 + 0.2 * (2.0 * t).cos()).unwrap();
        let cfg = StepperConfig {
            t_end: 0.02,
            record_count: 4,
            ..Default::default()
        };
        let run = || {
            let out = evolve(
                FlowState::polar(c.clone()),
                FlowLaw::Gapf,
                &cfg,
                Scheme::Spectral,
                |_, _| {},
            );
            match out.final_state.curve {
                Curve::Polar(c) => c.r().to_vec(),
                _ => unreachable!(),
            }
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn ssprk3_also_integrates_csf_circle() {
        let cfg = StepperConfig {
            stepper: Stepper::SspRk3,
            t_end: 0.2,
            record_count: 20,
            ..Default::default()
        };
        let out = evolve(
            FlowState::polar(circle(64, 1.0)),
            FlowLaw::Csf,
            &cfg,
            Scheme::Spectral,
            |_, _| {},
        );
        if let Curve::Polar(c) = &out.final_state.curve {
            let expect = (1.0f64 - 0.4).sqrt();
            for &r in c.r() {
                assert!((r - expect).abs() < 1e-6);
            }
        }
    }
}
