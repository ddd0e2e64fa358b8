//! JSON run configuration.
//!
//! A single document configures all subcommands; unknown keys are rejected
//! so archived configs stay unambiguous. Command-line flags override the
//! corresponding keys after parsing.

use serde::{Deserialize, Serialize};

use qvortex_core::vortex::PositionCenterMode;
use qvortex_core::{GridSpec64, Pulse64, Quad64, Space};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub pulse: PulseConfig,
    /// Momentum-space evaluation path used where a job does not name one.
    pub kind: Kind,
    pub quadrature: QuadratureConfig,
    pub out_dir: String,
    pub formats: Vec<OutputFormat>,
    /// Jobs for the `field` subcommand.
    pub field: Vec<FieldJob>,
    pub centers: Option<CentersJob>,
    pub moments: Option<MomentsJob>,
    pub trace: Option<TraceJob>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pulse: PulseConfig::default(),
            kind: Kind::Exact,
            quadrature: QuadratureConfig::default(),
            out_dir: "out".into(),
            formats: vec![OutputFormat::Csv],
            field: Vec::new(),
            centers: None,
            moments: None,
            trace: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub f0: f64,
    pub omega: f64,
    pub duration: f64,
    pub alpha: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            f0: 0.4,
            omega: std::f64::consts::PI,
            duration: 4.0,
            alpha: 0.0,
        }
    }
}

impl PulseConfig {
    pub fn to_pulse(&self) -> Result<Pulse64> {
        Pulse64::new(self.f0, self.omega, self.duration, self.alpha)
            .map_err(|e| CliError::Config(format!("pulse: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Approx,
    Quad,
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Kind::Exact),
            "approx" => Ok(Kind::Approx),
            "quad" => Ok(Kind::Quad),
            other => Err(format!("unknown kind '{other}' (expected exact|approx|quad)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum SpaceKey {
    #[serde(rename = "k")]
    Momentum,
    #[serde(rename = "r")]
    Position,
}

impl SpaceKey {
    pub fn to_space(self) -> Space {
        match self {
            SpaceKey::Momentum => Space::Momentum,
            SpaceKey::Position => Space::Position,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            SpaceKey::Momentum => "k",
            SpaceKey::Position => "r",
        }
    }
}

impl std::str::FromStr for SpaceKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "k" => Ok(SpaceKey::Momentum),
            "r" => Ok(SpaceKey::Position),
            other => Err(format!("unknown space '{other}' (expected k|r)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Ppm,
    Svg,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub n_radial: usize,
    pub n_angular: usize,
    /// Radial cutoff; when absent a space- and kind-appropriate default is
    /// used (`k0 + 8` for the near form, `20` for the exact form's
    /// polynomial tail, six packet widths in coordinate space).
    pub r_max: Option<f64>,
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_radial: 1500,
            n_angular: 32,
            r_max: None,
            tol: 1e-9,
        }
    }
}

impl QuadratureConfig {
    /// Spec for the time-quadrature amplitudes.
    pub fn amplitude_spec(&self) -> Result<Quad64> {
        Quad64::new(
            self.n_radial,
            self.n_angular,
            self.r_max.unwrap_or(qvortex_core::k0::<f64>() + 8.0),
            self.tol,
        )
        .map_err(|e| CliError::Config(format!("quadrature: {e}")))
    }

    /// Spec for momentum moments of the given kind.
    pub fn momentum_moments_spec(&self, kind: Kind) -> Result<Quad64> {
        let default_exact = qvortex_core::moments::default_exact_momentum_quadrature::<f64>();
        let (r_max, n_radial, tol) = match kind {
            Kind::Exact | Kind::Quad => (
                self.r_max.unwrap_or(default_exact.r_max),
                self.n_radial.max(default_exact.n_radial),
                self.tol.max(default_exact.tol),
            ),
            Kind::Approx => (
                self.r_max.unwrap_or(qvortex_core::k0::<f64>() + 8.0),
                self.n_radial,
                self.tol,
            ),
        };
        Quad64::new(n_radial, self.n_angular, r_max, tol)
            .map_err(|e| CliError::Config(format!("quadrature: {e}")))
    }

    /// Spec for coordinate moments at time `t`.
    pub fn position_moments_spec(&self, t: f64) -> Result<Quad64> {
        let default_r = 6.0 * qvortex_core::position::packet_width(t).a2.sqrt();
        Quad64::new(
            self.n_radial.min(800),
            self.n_angular,
            self.r_max.unwrap_or(default_r),
            self.tol,
        )
        .map_err(|e| CliError::Config(format!("quadrature: {e}")))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub umin: Option<f64>,
    pub umax: Option<f64>,
    pub vmin: Option<f64>,
    pub vmax: Option<f64>,
    pub nu: usize,
    pub nv: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            umin: None,
            umax: None,
            vmin: None,
            vmax: None,
            nu: 400,
            nv: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Density,
    Velocity,
    Phase,
    Flux,
}

impl Quantity {
    pub fn tag(self) -> &'static str {
        match self {
            Quantity::Density => "density",
            Quantity::Velocity => "velocity",
            Quantity::Phase => "phase",
            Quantity::Flux => "flux",
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "density" => Ok(Quantity::Density),
            "velocity" => Ok(Quantity::Velocity),
            "phase" => Ok(Quantity::Phase),
            "flux" => Ok(Quantity::Flux),
            other => Err(format!(
                "unknown quantity '{other}' (expected density|velocity|phase|flux)"
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJob {
    /// Stem of the output file names.
    pub name: String,
    pub space: SpaceKey,
    pub quantity: Quantity,
    /// Momentum-space path; falls back to the top-level `kind`.
    #[serde(default)]
    pub kind: Option<Kind>,
    /// Pulse amplitude override for this job.
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default = "default_time")]
    pub time: f64,
    #[serde(default)]
    pub grid: GridConfig,
    /// Relative density floor for flagging singular velocity nodes.
    #[serde(default = "default_floor_rel")]
    pub velocity_floor_rel: f64,
}

fn default_time() -> f64 {
    5.0
}

fn default_floor_rel() -> f64 {
    1e-300
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CentersJob {
    pub spaces: Vec<SpaceKey>,
    pub time: f64,
}

impl Default for CentersJob {
    fn default() -> Self {
        Self {
            spaces: vec![SpaceKey::Momentum, SpaceKey::Position],
            time: 5.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct MomentsJob {
    pub time: f64,
}

impl Default for MomentsJob {
    fn default() -> Self {
        Self { time: 5.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TraceJob {
    pub times: Vec<f64>,
    #[serde(default = "default_trace_space")]
    pub space: SpaceKey,
    #[serde(default = "default_true")]
    pub line_cuts: bool,
    #[serde(default = "default_cut_half_width")]
    pub cut_half_width: f64,
    #[serde(default = "default_cut_points")]
    pub cut_points: usize,
}

fn default_trace_space() -> SpaceKey {
    SpaceKey::Position
}

fn default_true() -> bool {
    true
}

fn default_cut_half_width() -> f64 {
    2.0
}

fn default_cut_points() -> usize {
    401
}

/// Command-line overrides applied on top of the parsed config.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub f0: Option<f64>,
    pub t: Option<f64>,
    pub space: Option<SpaceKey>,
    pub kind: Option<Kind>,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!(
                "invalid config {} at line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(f0) = ov.f0 {
            self.pulse.f0 = f0;
        }
        if let Some(t) = ov.t {
            for job in &mut self.field {
                job.time = t;
            }
            if let Some(c) = &mut self.centers {
                c.time = t;
            }
            if let Some(m) = &mut self.moments {
                m.time = t;
            }
        }
        if let Some(space) = ov.space {
            for job in &mut self.field {
                job.space = space;
            }
        }
        if let Some(kind) = ov.kind {
            self.kind = kind;
            for job in &mut self.field {
                job.kind = Some(kind);
            }
        }
        if let Some(out) = &ov.out {
            self.out_dir = out.clone();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse.to_pulse()?;
        for job in &self.field {
            if job.name.is_empty() || job.name.contains(['/', '\\']) {
                return Err(CliError::Config(format!(
                    "field job name '{}' must be a plain file stem",
                    job.name
                )));
            }
            if job.grid.nu < 2 || job.grid.nv < 2 {
                return Err(CliError::Config(format!(
                    "field job '{}': grid needs at least 2x2 nodes",
                    job.name
                )));
            }
            if job.time < 4.0 {
                return Err(CliError::Config(format!(
                    "field job '{}': time must be >= 4 (after the pulse), got {}",
                    job.name, job.time
                )));
            }
            if let Some(f0) = job.f0 {
                if f0 < 0.0 {
                    return Err(CliError::Config(format!(
                        "field job '{}': f0 must be >= 0",
                        job.name
                    )));
                }
            }
        }
        if let Some(tr) = &self.trace {
            if tr.times.is_empty() {
                return Err(CliError::Config("trace: empty time list".into()));
            }
            if tr.times.iter().any(|&t| t < 4.0) {
                return Err(CliError::Config("trace: all times must be >= 4".into()));
            }
            if tr.times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Config("trace: times must be ascending".into()));
            }
            if tr.cut_points < 3 {
                return Err(CliError::Config("trace: cut_points must be >= 3".into()));
            }
        }
        if let Some(c) = &self.centers {
            if c.time < 4.0 {
                return Err(CliError::Config("centers: time must be >= 4".into()));
            }
            if c.spaces.is_empty() {
                return Err(CliError::Config("centers: empty space list".into()));
            }
        }
        if let Some(m) = &self.moments {
            if m.time < 4.0 {
                return Err(CliError::Config("moments: time must be >= 4".into()));
            }
        }
        Ok(())
    }

    /// Resolve a job's grid, defaulting to the windows the figures use:
    /// `+-4` a.u. in momentum space, and a window centred on the upper
    /// vortex with half-width `3 a(tau)` in coordinate space.
    pub fn resolve_grid(&self, job: &FieldJob) -> Result<GridSpec64> {
        let g = &job.grid;
        let (umin, umax, vmin, vmax) = match job.space {
            SpaceKey::Momentum => (
                g.umin.unwrap_or(-4.0),
                g.umax.unwrap_or(4.0),
                g.vmin.unwrap_or(-4.0),
                g.vmax.unwrap_or(4.0),
            ),
            SpaceKey::Position => {
                let f0 = job.f0.unwrap_or(self.pulse.f0);
                let [up, _] = qvortex_core::vortex::position_centers(
                    f0,
                    job.time,
                    PositionCenterMode::ExactBracketRoot,
                )
                .map_err(CliError::Numeric)?;
                let half = 3.0 * qvortex_core::position::packet_width(job.time).a2.sqrt();
                (
                    g.umin.unwrap_or(up.center.0 - half),
                    g.umax.unwrap_or(up.center.0 + half),
                    g.vmin.unwrap_or(up.center.1 - half),
                    g.vmax.unwrap_or(up.center.1 + half),
                )
            }
        };
        GridSpec64::new(umin, umax, vmin, vmax, g.nu, g.nv)
            .map_err(|e| CliError::Config(format!("field job '{}': {e}", job.name)))
    }
}
