//! Scenario configuration, builtin initial curves, run orchestration and
//! file output (CSV series, SVG frames, JSON report).

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::{
    check_bounds, compare_gapf_csf, decay_fit, CompareOutcome, DecayField, DecayFit, DiagRecord,
};
use crate::error::{Error, Result};
use crate::flow::FlowLaw;
use crate::geometry::{MarkerCurve, PolarCurve, Vec2};
use crate::integrate::{evolve, Curve, Event, EventKind, FlowState, StepperConfig};
use crate::ops::{self, Scheme};

/// Which state representation a scenario evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Polar,
    Marker,
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(Backend::Polar),
            "marker" => Ok(Backend::Marker),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Polar => "polar",
            Backend::Marker => "marker",
        })
    }
}

/// Builtin initial curve families.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinCurveId {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `r = a(1 + ε cos kθ)`.
    CosStar { a: f64, eps: f64, k: u32 },
    /// `r = a(1 + ε cos kθ + shift·cos((k+1)θ))`; the odd harmonic breaks
    /// centrosymmetry for even `k`.
    OffsetStar { a: f64, eps: f64, k: u32, shift: f64 },
    /// Marker curve with turning number 3 and two small loops; `b` shapes
    /// the curvature profile `κ ∝ 3 + b·cos 2u`, `scale` sets the size.
    ImmersedLoops { b: f64, scale: f64 },
}

impl FromStr for BuiltinCurveId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = match s.find('(') {
            Some(i) => {
                let tail = &s[i + 1..];
                let close = tail
                    .rfind(')')
                    .ok_or_else(|| Error::Config(format!("unbalanced parens in `{s}`")))?;
                (&s[..i], tail[..close].trim())
            }
            None => (s, ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number `{}` in `{s}`", a.trim())))
                })
                .collect::<Result<_>>()?
        };
        let want = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "`{head}` takes {k} parameter(s), got {}",
                    nums.len()
                )))
            }
        };
        match head {
            "circle" => {
                want(1)?;
                Ok(BuiltinCurveId::Circle { radius: nums[0] })
            }
            "ellipse" => {
                want(2)?;
                Ok(BuiltinCurveId::Ellipse {
                    a: nums[0],
                    b: nums[1],
                })
            }
            "cos_star" => {
                want(3)?;
                Ok(BuiltinCurveId::CosStar {
                    a: nums[0],
                    eps: nums[1],
                    k: nums[2] as u32,
                })
            }
            "offset_star" => {
                want(4)?;
                Ok(BuiltinCurveId::OffsetStar {
                    a: nums[0],
                    eps: nums[1],
                    k: nums[2] as u32,
                    shift: nums[3],
                })
            }
            "immersed_loops" => match nums.len() {
                0 => Ok(BuiltinCurveId::ImmersedLoops { b: 1.15, scale: 1.0 }),
                1 => Ok(BuiltinCurveId::ImmersedLoops {
                    b: nums[0],
                    scale: 1.0,
                }),
                2 => Ok(BuiltinCurveId::ImmersedLoops {
                    b: nums[0],
                    scale: nums[1],
                }),
                n => Err(Error::Config(format!(
                    "`immersed_loops` takes at most 2 parameters, got {n}"
                ))),
            },
            other => Err(Error::Config(format!("unknown builtin curve `{other}`"))),
        }
    }
}

/// Initial data: a builtin family or a plain-text sample file.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCurve {
    Builtin(BuiltinCurveId),
    SampleFile(PathBuf),
}

impl FromStr for InitialCurve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            Ok(InitialCurve::SampleFile(PathBuf::from(path.trim())))
        } else {
            Ok(InitialCurve::Builtin(s.parse()?))
        }
    }
}

/// Output selection; paths are relative to the run's output directory.
/// `None` disables that artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub frames: Option<String>,
    pub report: Option<String>,
}

/// A fully parsed scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub law: FlowLaw,
    pub backend: Backend,
    pub initial: InitialCurve,
    /// Grid size: θ-nodes (polar) or marker count.
    pub grid: usize,
    pub scheme: Scheme,
    pub stepper: StepperConfig,
    pub outputs: OutputSpec,
    /// Run the GAPF-vs-CSF comparison and include its margins in the report.
    pub compare: bool,
    /// Fit exponential decay of q2/qs2 on the post-convexity window.
    pub fit_decay: bool,
}

impl ScenarioConfig {
    /// A usable default: GAPF on the 2:1 ellipse, polar spectral, n = 256.
    pub fn base(name: &str) -> Self {
        ScenarioConfig {
            name: name.to_string(),
            law: FlowLaw::Gapf,
            backend: Backend::Polar,
            initial: InitialCurve::Builtin(BuiltinCurveId::Ellipse { a: 2.0, b: 1.0 }),
            grid: 256,
            scheme: Scheme::Spectral,
            stepper: StepperConfig::default(),
            outputs: OutputSpec {
                csv: Some(format!("{name}.csv")),
                frames: None,
                report: Some(format!("{name}_report.json")),
            },
            compare: false,
            fit_decay: false,
        }
    }

    /// Parse the INI-style text: `[curve]`, `[solver]`, `[outputs]`
    /// sections of flat `key = value` lines; `#` and `;` start comments.
    pub fn parse(text: &str, default_name: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::base(default_name);
        let mut renamed = false;
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find(['#', ';']) {
                Some(i) => raw[..i].trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {}: bad section", lineno + 1)))?;
                if !matches!(name, "curve" | "solver" | "outputs") {
                    return Err(Error::Config(format!(
                        "line {}: unknown section [{name}]",
                        lineno + 1
                    )));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "line {}: `{key}` appears before any section",
                    lineno + 1
                )));
            }
            if key == "name" {
                renamed = true;
            }
            cfg.set(&section, key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        if !renamed {
            // keep the default output names in sync with the scenario name
            cfg.name = default_name.to_string();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario");
        Self::parse(&text, stem)
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}` wants a number, got `{v}`")))
        };
        let count = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("`{key}` wants a count, got `{v}`")))
        };
        let flag = |v: &str| -> Result<bool> {
            match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::Config(format!("`{key}` wants true/false, got `{v}`"))),
            }
        };
        let path_opt = |v: &str| -> Option<String> {
            if v == "none" {
                None
            } else {
                Some(v.to_string())
            }
        };
        match (section, key) {
            ("curve", "name") => {
                let old = self.name.clone();
                self.name = value.to_string();
                // follow the rename in the default output paths
                if self.outputs.csv.as_deref() == Some(&format!("{old}.csv")) {
                    self.outputs.csv = Some(format!("{value}.csv"));
                }
                if self.outputs.report.as_deref() == Some(&format!("{old}_report.json")) {
                    self.outputs.report = Some(format!("{value}_report.json"));
                }
            }
            ("curve", "initial") => self.initial = value.parse()?,
            ("curve", "backend") => self.backend = value.parse()?,
            ("curve", "n") | ("curve", "m") => self.grid = count(value)?,
            ("solver", "law") => self.law = value.parse()?,
            ("solver", "scheme") => self.scheme = value.parse()?,
            ("solver", "stepper") => self.stepper.stepper = value.parse()?,
            ("solver", "cfl") => self.stepper.cfl = num(value)?,
            ("solver", "dt_max") => self.stepper.dt_max = num(value)?,
            ("solver", "t_end") => self.stepper.t_end = num(value)?,
            ("solver", "tol_convex") => self.stepper.tol_convex = Some(num(value)?),
            ("solver", "tol_circle") => self.stepper.tol_circle = num(value)?,
            ("solver", "r_floor") => self.stepper.r_floor = Some(num(value)?),
            ("solver", "dt_floor") => self.stepper.dt_floor = Some(num(value)?),
            ("solver", "kappa_ceiling") => self.stepper.kappa_ceiling = num(value)?,
            ("solver", "record_count") => self.stepper.record_count = count(value)?,
            ("solver", "compare") => self.compare = flag(value)?,
            ("solver", "fit_decay") => self.fit_decay = flag(value)?,
            ("outputs", "csv") => self.outputs.csv = path_opt(value),
            ("outputs", "frames") => self.outputs.frames = path_opt(value),
            ("outputs", "report") => self.outputs.report = path_opt(value),
            _ => {
                return Err(Error::Config(format!(
                    "unknown key `{key}` in section [{section}]"
                )))
            }
        }
        Ok(())
    }

    /// Apply a `key=value` override; the key namespace is flat (keys are
    /// unique across sections), which is what `sweep` relies on.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        for section in ["curve", "solver", "outputs"] {
            match self.set(section, key, value) {
                Ok(()) => return Ok(()),
                Err(Error::Config(msg)) if msg.starts_with("unknown key") => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Config(format!("unknown override key `{key}`")))
    }

    fn validate(&self) -> Result<()> {
        if self.grid < 16 {
            return Err(Error::Config(format!(
                "grid size {} below minimum 16",
                self.grid
            )));
        }
        if self.backend == Backend::Polar && self.grid % 2 != 0 {
            return Err(Error::Config(format!(
                "polar backend needs an even grid, got {}",
                self.grid
            )));
        }
        let s = &self.stepper;
        for (what, v) in [
            ("cfl", s.cfl),
            ("dt_max", s.dt_max),
            ("t_end", s.t_end),
            ("tol_circle", s.tol_circle),
            ("kappa_ceiling", s.kappa_ceiling),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("`{what}` must be positive, got {v}")));
            }
        }
        if s.cfl > 1.0 {
            return Err(Error::Config(format!("`cfl` must be in (0, 1], got {}", s.cfl)));
        }
        if s.record_count == 0 {
            return Err(Error::Config("`record_count` must be positive".into()));
        }
        if matches!(
            self.initial,
            InitialCurve::Builtin(BuiltinCurveId::ImmersedLoops { .. })
        ) && self.backend == Backend::Polar
        {
            return Err(Error::Config(
                "immersed_loops has turning number 3 and is not a polar graph; use backend = marker"
                    .into(),
            ));
        }
        if self.compare && self.backend != Backend::Polar {
            return Err(Error::Config(
                "the comparison experiment runs on the polar backend".into(),
            ));
        }
        Ok(())
    }
}

fn polar_profile(id: &BuiltinCurveId, n: usize) -> Option<Result<PolarCurve>> {
    let build = |f: &dyn Fn(f64) -> f64| PolarCurve::from_fn(n, f);
    match *id {
        BuiltinCurveId::Circle { radius } => Some(build(&|_| radius)),
        BuiltinCurveId::Ellipse { a, b } => Some(build(&|t| {
            a * b / ((b * t.cos()).powi(2) + (a * t.sin()).powi(2)).sqrt()
        })),
        BuiltinCurveId::CosStar { a, eps, k } => {
            Some(build(&|t| a * (1.0 + eps * (k as f64 * t).cos())))
        }
        BuiltinCurveId::OffsetStar { a, eps, k, shift } => Some(build(&|t| {
            a * (1.0 + eps * (k as f64 * t).cos() + shift * ((k + 1) as f64 * t).cos())
        })),
        BuiltinCurveId::ImmersedLoops { .. } => None,
    }
}

/// Marker curve with turning number 3: unit-speed integration of the
/// turning angle `φ(u) = 3u + (b/2)·sin 2u`, so `κ = 3 + b·cos 2u > 0`
/// for `|b| < 3`. Every tangent harmonic sits at frequency `3 + 2m ≠ 0`,
/// hence the curve closes for any `b`; the zero-mean antiderivative also
/// centers the symmetric point at the origin.
fn immersed_loops_curve(m: usize, b: f64, scale: f64) -> Result<MarkerCurve> {
    if !(b.abs() < 3.0) {
        return Err(Error::Config(format!(
            "immersed_loops needs |b| < 3 for positive curvature, got {b}"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!(
            "immersed_loops scale must be positive, got {scale}"
        )));
    }
    let phi: Vec<f64> = (0..m)
        .map(|i| {
            let u = 2.0 * PI * i as f64 / m as f64;
            3.0 * u + 0.5 * b * (2.0 * u).sin()
        })
        .collect();
    let tx: Vec<f64> = phi.iter().map(|p| p.cos()).collect();
    let ty: Vec<f64> = phi.iter().map(|p| p.sin()).collect();
    let x = ops::antiderivative_periodic(&tx)?;
    let y = ops::antiderivative_periodic(&ty)?;
    let pts: Vec<Vec2> = (0..m)
        .map(|i| Vec2::new(scale * x[i], scale * y[i]))
        .collect();
    let curve = MarkerCurve::new(pts)?;
    let g = curve.geometry()?;
    let kappa_min = g.kappa.iter().cloned().fold(f64::MAX, f64::min);
    if kappa_min <= 0.0 {
        return Err(Error::InvalidCurve(format!(
            "immersed_loops(b = {b}): min κ = {kappa_min:.3e} not positive"
        )));
    }
    if g.min_star_det <= 0.0 {
        return Err(Error::InvalidCurve(format!(
            "immersed_loops(b = {b}): min det(X,T) = {:.3e} not positive",
            g.min_star_det
        )));
    }
    Ok(curve)
}

/// Construct a builtin curve on the requested backend.
pub fn build_builtin(id: &BuiltinCurveId, backend: Backend, grid: usize) -> Result<Curve> {
    match polar_profile(id, grid) {
        Some(polar) => {
            let c = polar.map_err(|e| {
                Error::InvalidCurve(format!("builtin {id:?} refused: {e}"))
            })?;
            // every strictly positive polar graph is star-shaped about the
            // origin; still surface the support margin in the refusal path
            let fields = c.metric_and_curvature(Scheme::Spectral)?;
            let p_min = fields.p.iter().cloned().fold(f64::MAX, f64::min);
            if p_min <= 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "builtin {id:?}: p_min = {p_min:.3e} not positive"
                )));
            }
            Ok(match backend {
                Backend::Polar => Curve::Polar(c),
                Backend::Marker => Curve::Marker(c.to_marker()),
            })
        }
        None => match (backend, id) {
            (Backend::Marker, BuiltinCurveId::ImmersedLoops { b, scale }) => {
                Ok(Curve::Marker(immersed_loops_curve(grid, *b, *scale)?))
            }
            _ => Err(Error::Config(
                "immersed_loops requires the marker backend".into(),
            )),
        },
    }
}

/// Resolve a scenario's initial curve (builtin or sample file).
pub fn build_initial(cfg: &ScenarioConfig) -> Result<Curve> {
    match &cfg.initial {
        InitialCurve::Builtin(id) => build_builtin(id, cfg.backend, cfg.grid),
        InitialCurve::SampleFile(path) => {
            let curve = read_curve_samples(path)?;
            match (&curve, cfg.backend) {
                (Curve::Polar(_), Backend::Polar) | (Curve::Marker(_), Backend::Marker) => {
                    Ok(curve)
                }
                (Curve::Polar(c), Backend::Marker) => Ok(Curve::Marker(c.to_marker())),
                (Curve::Marker(_), Backend::Polar) => Err(Error::Config(format!(
                    "{}: marker samples cannot back a polar run",
                    path.display()
                ))),
            }
        }
    }
}

/// Write a curve in the plain-text sample format: first line the node
/// count, then one `r` (polar) or `x y` (marker) per line, full
/// precision. Reloading is bit-identical.
pub fn write_curve_samples(path: &Path, curve: &Curve) -> Result<()> {
    let mut out = String::new();
    match curve {
        Curve::Polar(c) => {
            out.push_str(&format!("{}\n", c.n()));
            for r in c.r() {
                out.push_str(&format!("{r:?}\n"));
            }
        }
        Curve::Marker(c) => {
            out.push_str(&format!("{}\n", c.m()));
            for p in c.points() {
                out.push_str(&format!("{:?} {:?}\n", p.x, p.y));
            }
        }
    }
    write_file(path, &out)
}

/// Read the sample format back; the per-line token count distinguishes
/// polar from marker data.
pub fn read_curve_samples(path: &Path) -> Result<Curve> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let bad = |msg: String| Error::Config(format!("{}: {msg}", path.display()));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| bad("empty sample file".into()))?
        .trim()
        .parse()
        .map_err(|_| bad("first line must be the node count".into()))?;
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| bad(format!("bad number `{t}`")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.len() != n {
        return Err(bad(format!("expected {n} rows, found {}", rows.len())));
    }
    match rows.first().map(|r| r.len()) {
        Some(1) => {
            let r: Vec<f64> = rows.iter().map(|row| row[0]).collect();
            Ok(Curve::Polar(PolarCurve::new(r)?))
        }
        Some(2) => {
            let pts: Vec<Vec2> = rows.iter().map(|row| Vec2::new(row[0], row[1])).collect();
            Ok(Curve::Marker(MarkerCurve::new(pts)?))
        }
        _ => Err(bad("rows must hold 1 (polar) or 2 (marker) numbers".into())),
    }
}

/// The JSON report written next to the CSV series.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub law: String,
    pub backend: String,
    pub scheme: String,
    pub grid: usize,
    pub records: usize,
    pub initial: DiagRecord,
    pub final_record: DiagRecord,
    pub events: Vec<Event>,
    pub terminal: Event,
    pub convexity_t: Option<f64>,
    /// `max_t |A(t) − A₀| / |A₀|`.
    pub area_drift_rel: f64,
    pub bounds: crate::diagnostics::BoundReport,
    /// First recorded time with `min det(X − O, T) ≤ 0`.
    pub first_nonstar_t: Option<f64>,
    pub decay_q2: Option<DecayFit>,
    pub decay_qs2: Option<DecayFit>,
    pub decay_note: Option<String>,
    pub compare: Option<CompareOutcome>,
}

/// Everything a completed scenario produced, before/besides the files.
#[derive(Debug)]
pub struct RunArtifacts {
    pub report: Report,
    pub history: Vec<DiagRecord>,
    pub final_state: FlowState,
}

const CSV_HEADER: &str = "t,L,A,kappa_min,kappa_max,p_min,r_min,r_max,grad_max,deficit,q2,qs2,sym";

fn csv_row(r: &DiagRecord) -> String {
    format!(
        "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
        r.t,
        r.length,
        r.area,
        r.kappa_min,
        r.kappa_max,
        r.p_min,
        r.r_min,
        r.r_max,
        r.grad_max,
        r.deficit,
        r.q2,
        r.qs2,
        r.sym
    )
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn curve_polyline(curve: &Curve) -> Vec<Vec2> {
    match curve {
        Curve::Polar(c) => c.to_marker().points().to_vec(),
        Curve::Marker(c) => c.points().to_vec(),
    }
}

fn bbox(pts: &[Vec2]) -> (f64, f64, f64, f64) {
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    (xmin, xmax, ymin, ymax)
}

/// One SVG frame: the polyline inside a fixed viewBox (initial bounding
/// box scaled by 1.5) so frames are comparable without rescaling. The y
/// axis is flipped to keep the mathematical orientation.
fn svg_frame(pts: &[Vec2], viewbox: (f64, f64, f64, f64)) -> String {
    let (vx, vy, vw, vh) = viewbox;
    let stroke = 0.008 * vw.max(vh);
    let mut points = String::new();
    for p in pts {
        points.push_str(&format!("{:.6},{:.6} ", p.x, -p.y));
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vx:.6} {vy:.6} {vw:.6} {vh:.6}\">\n\
         <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{stroke:.6}\"/>\n\
         </svg>\n",
        points.trim_end()
    )
}

fn frame_viewbox(initial: &[Vec2]) -> (f64, f64, f64, f64) {
    let (xmin, xmax, ymin, ymax) = bbox(initial);
    let (cx, cy) = (0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    let (w, h) = (1.5 * (xmax - xmin), 1.5 * (ymax - ymin));
    // y flipped in SVG coordinates
    (cx - 0.5 * w, -cy - 0.5 * h, w, h)
}

/// Execute a scenario and write its configured artifacts under `out_dir`.
///
/// Solver terminal events (blow-up, star-shape loss) are results recorded
/// in the report, not errors; only invalid configuration or IO failures
/// return `Err`. Output files are written whole after the run, so a
/// failing path leaves no partial artifact.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path, quiet: bool) -> Result<RunArtifacts> {
    cfg.validate()?;
    let initial_curve = build_initial(cfg)?;
    let initial_pts = curve_polyline(&initial_curve);
    let want_frames = cfg.outputs.frames.is_some();

    let mut history: Vec<DiagRecord> = Vec::new();
    let mut frames: Vec<Vec<Vec2>> = Vec::new();
    let outcome = evolve(
        match initial_curve {
            Curve::Polar(c) => FlowState::polar(c),
            Curve::Marker(c) => FlowState::marker(c),
        },
        cfg.law,
        &cfg.stepper,
        cfg.scheme,
        |state, rec| {
            history.push(*rec);
            if want_frames {
                frames.push(curve_polyline(&state.curve));
            }
        },
    );
    if history.is_empty() {
        // the initial record itself failed — treat as invalid input
        return Err(Error::InvalidCurve(format!(
            "scenario `{}`: initial curve rejected by diagnostics",
            cfg.name
        )));
    }

    let initial = history[0];
    let final_record = *history.last().expect("nonempty");
    let area_drift_rel = history
        .iter()
        .map(|r| (r.area - initial.area).abs() / initial.area.abs())
        .fold(0.0, f64::max);
    let bounds = check_bounds(
        &history,
        &initial,
        1e-6 * initial.area.abs(),
        1e-8 * initial.length,
    );
    let first_nonstar_t = history.iter().find(|r| r.p_min <= 0.0).map(|r| r.t);
    let terminal = *outcome.terminal();
    let convexity_t = outcome.convexity().map(|e| e.t_event);

    let (decay_q2, decay_qs2, decay_note) = if cfg.fit_decay {
        let start = convexity_t.unwrap_or(initial.t);
        let window = (start, final_record.t);
        let mut note = None;
        let q2 = match decay_fit(&history, DecayField::Q2, window) {
            Ok(f) => Some(f),
            Err(e) => {
                note = Some(format!("q2: {e}"));
                None
            }
        };
        let qs2 = match decay_fit(&history, DecayField::Qs2, window) {
            Ok(f) => Some(f),
            Err(e) => {
                let msg = format!("qs2: {e}");
                note = Some(match note {
                    Some(prev) => format!("{prev}; {msg}"),
                    None => msg,
                });
                None
            }
        };
        (q2, qs2, note)
    } else {
        (None, None, None)
    };

    let compare = if cfg.compare {
        let polar = match build_initial(cfg)? {
            Curve::Polar(c) => c,
            Curve::Marker(_) => unreachable!("validate() restricts compare to polar"),
        };
        Some(compare_gapf_csf(&polar, &cfg.stepper, cfg.scheme)?)
    } else {
        None
    };

    let report = Report {
        name: cfg.name.clone(),
        law: format!("{:?}", cfg.law).to_lowercase(),
        backend: cfg.backend.to_string(),
        scheme: format!("{:?}", cfg.scheme).to_lowercase(),
        grid: cfg.grid,
        records: history.len(),
        initial,
        final_record,
        events: outcome.events.clone(),
        terminal,
        convexity_t,
        area_drift_rel,
        bounds,
        first_nonstar_t,
        decay_q2,
        decay_qs2,
        decay_note,
        compare,
    };

    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    if let Some(csv_path) = &cfg.outputs.csv {
        let mut text = String::from(CSV_HEADER);
        text.push('\n');
        for rec in &history {
            text.push_str(&csv_row(rec));
            text.push('\n');
        }
        write_file(&out_dir.join(csv_path), &text)?;
    }
    if let Some(frames_dir) = &cfg.outputs.frames {
        let dir = out_dir.join(frames_dir);
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        let viewbox = frame_viewbox(&initial_pts);
        for (i, pts) in frames.iter().enumerate() {
            write_file(&dir.join(format!("frame_{i:04}.svg")), &svg_frame(pts, viewbox))?;
        }
    }
    if let Some(report_path) = &cfg.outputs.report {
        let json = serde_json::to_string_pretty(&report)
            .expect("report serialization is infallible");
        write_file(&out_dir.join(report_path), &json)?;
    }

    if !quiet {
        println!(
            "{}: {:?} at t = {:.6} ({} records, area drift {:.3e})",
            cfg.name,
            terminal.kind,
            terminal.t_event,
            history.len(),
            area_drift_rel
        );
    }
    Ok(RunArtifacts {
        report,
        history,
        final_state: outcome.final_state,
    })
}

/// Run the scenario once per parameter value, each into its own
/// subdirectory of `out_dir`. Returns `(value, report)` pairs.
pub fn sweep(
    base: &ScenarioConfig,
    key: &str,
    values: &[String],
    out_dir: &Path,
    quiet: bool,
) -> Result<Vec<(String, Report)>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let mut results = Vec::with_capacity(values.len());
    for value in values {
        let mut cfg = base.clone();
        cfg.apply_override(key, value)?;
        cfg.name = format!("{}_{key}_{value}", base.name);
        let subdir = out_dir.join(format!("{key}_{}", value.replace('/', "_")));
        let artifacts = run_scenario(&cfg, &subdir, quiet)?;
        results.push((value.clone(), artifacts.report));
    }
    Ok(results)
}

/// The terminal event of a run, classified for exit-code purposes: every
/// observed flow outcome (including blow-ups) is a success.
pub fn is_flow_outcome(kind: EventKind) -> bool {
    matches!(
        kind,
        EventKind::Converged
            | EventKind::TimeLimit
            | EventKind::StarShapeLost
            | EventKind::BlowUp
            | EventKind::ConvexityReached
    )
}
