//! The four subcommands: field sampling, vortex centers, moments and
//! trajectory tracing.

use std::path::{Path, PathBuf};

use serde::Serialize;

use qvortex_core::field::{
    density_grid, flux_grid, phase_grid, velocity_at, velocity_grid, ComplexField2d,
    MomentumExactField, MomentumGenericField, MomentumNearCenterField, PositionPacketField,
};
use qvortex_core::moments::{
    momentum_dispersion_closed_form, momentum_moments_numeric, position_moments,
    PositionMomentMode,
};
use qvortex_core::vortex::{
    locate_vortices, momentum_centers_closed_form, position_centers, refine_zero, trace_trajectory,
    PositionCenterMode, RefineOptions,
};
use qvortex_core::{Amp64, FieldGrid, GridSpec64, MomentReport, Payload, Space, VortexDescriptor};

use crate::config::{FieldJob, Kind, OutputFormat, Quantity, RunConfig, SpaceKey, TraceJob};
use crate::csvout::{fmt_float, CsvFile};
use crate::error::{CliError, Result};
use crate::{ppm, svg};

/// Runtime-selected wavefunction behind one field interface.
pub enum AnyField {
    Exact(MomentumExactField<f64>),
    Near(MomentumNearCenterField<f64>),
    Generic(MomentumGenericField<f64>),
    Position(PositionPacketField<f64>),
}

impl ComplexField2d<f64> for AnyField {
    fn space(&self) -> Space {
        match self {
            AnyField::Exact(f) => f.space(),
            AnyField::Near(f) => f.space(),
            AnyField::Generic(f) => f.space(),
            AnyField::Position(f) => f.space(),
        }
    }

    fn time(&self) -> f64 {
        match self {
            AnyField::Exact(f) => f.time(),
            AnyField::Near(f) => f.time(),
            AnyField::Generic(f) => f.time(),
            AnyField::Position(f) => f.time(),
        }
    }

    fn eval(&self, u: f64, v: f64) -> qvortex_core::error::Result<Amp64> {
        match self {
            AnyField::Exact(f) => f.eval(u, v),
            AnyField::Near(f) => f.eval(u, v),
            AnyField::Generic(f) => f.eval(u, v),
            AnyField::Position(f) => f.eval(u, v),
        }
    }

    fn gradient(&self, u: f64, v: f64) -> qvortex_core::error::Result<(Amp64, Amp64)> {
        match self {
            AnyField::Exact(f) => f.gradient(u, v),
            AnyField::Near(f) => f.gradient(u, v),
            AnyField::Generic(f) => f.gradient(u, v),
            AnyField::Position(f) => f.gradient(u, v),
        }
    }

    fn log_modulus(&self, u: f64, v: f64) -> qvortex_core::error::Result<f64> {
        match self {
            AnyField::Exact(f) => f.log_modulus(u, v),
            AnyField::Near(f) => f.log_modulus(u, v),
            AnyField::Generic(f) => f.log_modulus(u, v),
            AnyField::Position(f) => f.log_modulus(u, v),
        }
    }
}

fn build_field(cfg: &RunConfig, space: SpaceKey, kind: Kind, time: f64, f0: f64) -> Result<AnyField> {
    Ok(match space {
        SpaceKey::Position => AnyField::Position(PositionPacketField { t: time, f0 }),
        SpaceKey::Momentum => match kind {
            Kind::Exact => AnyField::Exact(MomentumExactField { t: time, f0 }),
            Kind::Approx => AnyField::Near(MomentumNearCenterField { t: time, f0 }),
            Kind::Quad => {
                let mut pulse = cfg.pulse.to_pulse()?;
                pulse.f0 = f0;
                AnyField::Generic(MomentumGenericField {
                    pulse,
                    t: time,
                    quad: cfg.quadrature.amplitude_spec()?,
                })
            }
        },
    })
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    Path::new(&cfg.out_dir).join(name)
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::io(&format!("create output directory {}", cfg.out_dir), e))
}

// ---------------------------------------------------------------- field --

pub fn cmd_field(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.field.is_empty() {
        return Err(CliError::Config(
            "no field jobs: add a `field` array to the config or pass --quantity".into(),
        ));
    }
    ensure_out_dir(cfg)?;
    let mut written = Vec::new();
    for job in &cfg.field {
        written.extend(run_field_job(cfg, job)?);
    }
    Ok(written)
}

fn run_field_job(cfg: &RunConfig, job: &FieldJob) -> Result<Vec<PathBuf>> {
    let spec = cfg.resolve_grid(job)?;
    let kind = job.kind.unwrap_or(cfg.kind);
    let f0 = job.f0.unwrap_or(cfg.pulse.f0);
    let field = build_field(cfg, job.space, kind, job.time, f0)?;
    let space_tag = job.space.tag();
    let mut written = Vec::new();

    match job.quantity {
        Quantity::Density => {
            let d = density_grid(&field, &spec)?;
            // winding-validated zeros, flagged at their nearest nodes
            let vortices = locate_vortices(&field, &spec)?;
            let flags = nearest_node_flags(&spec, &vortices);
            let path = out_path(cfg, &format!("{}.csv", job.name));
            let mut csv = CsvFile::create(
                &path,
                space_tag,
                job.time,
                "density",
                &["u", "v", "rho", "ln_rho", "zero_flag"],
            )?;
            let (Payload::Scalar(rho), Payload::Scalar(ln_rho)) =
                (&d.rho.payload, &d.ln_rho.payload)
            else {
                unreachable!()
            };
            for idx in 0..spec.len() {
                let (u, v) = spec.node(idx);
                csv.row(&[
                    fmt_float(u),
                    fmt_float(v),
                    fmt_float(rho[idx]),
                    fmt_float(ln_rho[idx]),
                    if flags[idx] { "1".into() } else { "0".into() },
                ])?;
            }
            csv.finish()?;
            written.push(path);
            if cfg.formats.contains(&OutputFormat::Ppm) {
                let path = out_path(cfg, &format!("{}.ppm", job.name));
                ppm::write_log_density(&path, &d.ln_rho)?;
                written.push(path);
            }
        }
        Quantity::Velocity => {
            let grid = velocity_grid(&field, &spec, job.velocity_floor_rel)?;
            let path = out_path(cfg, &format!("{}.csv", job.name));
            write_vector_csv(&path, space_tag, job.time, "velocity", &grid, &spec, true)?;
            written.push(path);
            if cfg.formats.contains(&OutputFormat::Svg) {
                let path = out_path(cfg, &format!("{}.svg", job.name));
                let sampler = |u: f64, v: f64| velocity_at(&field, u, v, 0.0).ok();
                svg::write_quiver(&path, &grid, Some(&sampler))?;
                written.push(path);
            }
        }
        Quantity::Flux => {
            let grid = flux_grid(&field, &spec)?;
            let path = out_path(cfg, &format!("{}.csv", job.name));
            write_vector_csv(&path, space_tag, job.time, "flux", &grid, &spec, false)?;
            written.push(path);
        }
        Quantity::Phase => {
            let grid = phase_grid(&field, &spec)?;
            let Payload::Scalar(phase) = &grid.payload else {
                unreachable!()
            };
            let path = out_path(cfg, &format!("{}.csv", job.name));
            let mut csv =
                CsvFile::create(&path, space_tag, job.time, "phase", &["u", "v", "phase"])?;
            for (idx, p) in phase.iter().enumerate() {
                let (u, v) = spec.node(idx);
                csv.row(&[fmt_float(u), fmt_float(v), fmt_float(*p)])?;
            }
            csv.finish()?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_vector_csv(
    path: &Path,
    space: &str,
    time: f64,
    quantity: &str,
    grid: &FieldGrid<f64>,
    spec: &GridSpec64,
    with_singular: bool,
) -> Result<()> {
    let Payload::Vector(vectors) = &grid.payload else {
        unreachable!()
    };
    let columns: &[&str] = if with_singular {
        &["u", "v", "vu", "vv", "singular"]
    } else {
        &["u", "v", "ju", "jv"]
    };
    let mut csv = CsvFile::create(path, space, time, quantity, columns)?;
    for (idx, vector) in vectors.iter().enumerate() {
        let (u, v) = spec.node(idx);
        let mut row = vec![
            fmt_float(u),
            fmt_float(v),
            fmt_float(vector[0]),
            fmt_float(vector[1]),
        ];
        if with_singular {
            row.push(if grid.singular[idx] { "1".into() } else { "0".into() });
        }
        csv.row(&row)?;
    }
    csv.finish()
}

fn nearest_node_flags(spec: &GridSpec64, vortices: &[VortexDescriptor<f64>]) -> Vec<bool> {
    let mut flags = vec![false; spec.len()];
    let (du, dv) = spec.cell_size();
    for d in vortices {
        let iu = ((d.center.0 - spec.umin) / du).round() as isize;
        let iv = ((d.center.1 - spec.vmin) / dv).round() as isize;
        if (0..spec.nu as isize).contains(&iu) && (0..spec.nv as isize).contains(&iv) {
            flags[iu as usize * spec.nv + iv as usize] = true;
        }
    }
    flags
}

// -------------------------------------------------------------- centers --

#[derive(Serialize)]
struct CenterEntry {
    u: f64,
    v: f64,
    charge: i32,
    residual: f64,
}

impl From<&VortexDescriptor<f64>> for CenterEntry {
    fn from(d: &VortexDescriptor<f64>) -> Self {
        Self {
            u: d.center.0,
            v: d.center.1,
            charge: d.charge,
            residual: d.residual,
        }
    }
}

#[derive(Serialize)]
struct SpaceCenters {
    space: &'static str,
    time: f64,
    closed_form: Vec<CenterEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    paper_approx: Option<Vec<CenterEntry>>,
    numeric: Vec<CenterEntry>,
    /// `numeric - closed_form`, per center, as `(du, dv)`.
    difference: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct CentersReport {
    f0: f64,
    spaces: Vec<SpaceCenters>,
}

pub fn cmd_centers(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let job = cfg.centers.clone().unwrap_or_default();
    ensure_out_dir(cfg)?;
    let f0 = cfg.pulse.f0;
    let t = job.time;
    let mut spaces = Vec::new();
    for s in &job.spaces {
        let (closed, approx): (Vec<VortexDescriptor<f64>>, Option<Vec<_>>) = match s {
            SpaceKey::Momentum => (momentum_centers_closed_form(f0, t)?.to_vec(), None),
            SpaceKey::Position => (
                position_centers(f0, t, PositionCenterMode::ExactBracketRoot)?.to_vec(),
                Some(position_centers(f0, t, PositionCenterMode::PaperApprox)?.to_vec()),
            ),
        };
        let field = build_field(
            cfg,
            *s,
            match s {
                SpaceKey::Momentum => cfg.kind,
                SpaceKey::Position => Kind::Exact,
            },
            t,
            f0,
        )?;
        let opts = RefineOptions::with_cell(0.05);
        let mut numeric = Vec::new();
        let mut difference = Vec::new();
        for c in &closed {
            // coarse seed deliberately off-center
            let seed = (c.center.0 + 0.1, c.center.1 - 0.1);
            let d = refine_zero(&field, seed, &opts)?;
            difference.push([d.center.0 - c.center.0, d.center.1 - c.center.1]);
            numeric.push(d);
        }
        spaces.push(SpaceCenters {
            space: s.tag(),
            time: t,
            closed_form: closed.iter().map(CenterEntry::from).collect(),
            paper_approx: approx.map(|v| v.iter().map(CenterEntry::from).collect()),
            numeric: numeric.iter().map(CenterEntry::from).collect(),
            difference,
        });
    }
    let report = CentersReport { f0, spaces };
    let path = out_path(cfg, "centers.json");
    write_json(&path, &report)?;
    Ok(vec![path])
}

// -------------------------------------------------------------- moments --

#[derive(Serialize)]
struct MomentEntry {
    mean_u: f64,
    mean_v: f64,
    var_u: f64,
    var_v: f64,
    norm: f64,
}

impl From<&MomentReport<f64>> for MomentEntry {
    fn from(r: &MomentReport<f64>) -> Self {
        Self {
            mean_u: r.mean_u,
            mean_v: r.mean_v,
            var_u: r.var_u,
            var_v: r.var_v,
            norm: r.norm,
        }
    }
}

#[derive(Serialize)]
struct MomentsReport {
    f0: f64,
    time: f64,
    momentum_numeric_exact: MomentEntry,
    momentum_closed_form_approx: ClosedFormDispersion,
    /// Per-component ratio numeric-exact / closed-form-approx.
    dispersion_ratio: [f64; 2],
    position_numeric: MomentEntry,
    position_closed_form: MomentEntry,
}

#[derive(Serialize)]
struct ClosedFormDispersion {
    var_kx: f64,
    var_ky: f64,
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let job = cfg.moments.clone().unwrap_or_default();
    ensure_out_dir(cfg)?;
    let f0 = cfg.pulse.f0;
    let t = job.time;
    let mq = cfg.quadrature.momentum_moments_spec(Kind::Exact)?;
    let numeric = momentum_moments_numeric(t, f0, &mq)?;
    let (var_kx, var_ky) = momentum_dispersion_closed_form(f0);
    let pq = cfg.quadrature.position_moments_spec(t)?;
    let pos_numeric = position_moments(t, f0, PositionMomentMode::Numeric, &pq)?;
    let pos_closed = position_moments(t, f0, PositionMomentMode::ClosedForm, &pq)?;
    let report = MomentsReport {
        f0,
        time: t,
        momentum_numeric_exact: MomentEntry::from(&numeric),
        momentum_closed_form_approx: ClosedFormDispersion { var_kx, var_ky },
        dispersion_ratio: [numeric.var_u / var_kx, numeric.var_v / var_ky],
        position_numeric: MomentEntry::from(&pos_numeric),
        position_closed_form: MomentEntry::from(&pos_closed),
    };
    let path = out_path(cfg, "moments.json");
    write_json(&path, &report)?;
    Ok(vec![path])
}

// ---------------------------------------------------------------- trace --

pub fn cmd_trace(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let Some(job) = cfg.trace.clone() else {
        return Err(CliError::Config(
            "no trace block in the config (needs a `times` list)".into(),
        ));
    };
    ensure_out_dir(cfg)?;
    let f0 = cfg.pulse.f0;
    let track = trace_trajectory(&job.times, f0, job.space.to_space())?;
    let mut written = Vec::new();

    let path = out_path(cfg, "trace.csv");
    let mut csv = CsvFile::create(
        &path,
        job.space.tag(),
        job.times[0],
        "trajectory",
        &["t", "u0", "v0", "charge"],
    )?;
    for d in &track {
        csv.row(&[
            fmt_float(d.time),
            fmt_float(d.center.0),
            fmt_float(d.center.1),
            format!("{}", d.charge),
        ])?;
    }
    csv.finish()?;
    written.push(path);

    if job.line_cuts {
        for (i, d) in track.iter().enumerate() {
            written.push(write_line_cut(cfg, &job, d, i, CutAxis::U)?);
            written.push(write_line_cut(cfg, &job, d, i, CutAxis::V)?);
        }
    }
    Ok(written)
}

enum CutAxis {
    U,
    V,
}

/// `b_u(i)` = |psi(u, v0)| along u (and the v analog), normalized to its
/// own maximum in the `b_norm` column.
fn write_line_cut(
    cfg: &RunConfig,
    job: &TraceJob,
    d: &VortexDescriptor<f64>,
    index: usize,
    axis: CutAxis,
) -> Result<PathBuf> {
    let field = build_field(cfg, job.space, cfg.kind, d.time, cfg.pulse.f0)?;
    let n = job.cut_points;
    let (label, center, fixed) = match axis {
        CutAxis::U => ("bu", d.center.0, d.center.1),
        CutAxis::V => ("bv", d.center.1, d.center.0),
    };
    let values: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let c = center - job.cut_half_width
                + 2.0 * job.cut_half_width * i as f64 / (n - 1) as f64;
            let (u, v) = match axis {
                CutAxis::U => (c, fixed),
                CutAxis::V => (fixed, c),
            };
            Ok((c, field.eval(u, v)?.norm()))
        })
        .collect::<Result<_>>()?;
    let peak = values.iter().map(|&(_, b)| b).fold(0.0f64, f64::max).max(1e-300);
    let path = out_path(cfg, &format!("cut_{label}_{index:02}.csv"));
    let mut csv = CsvFile::create(
        &path,
        job.space.tag(),
        d.time,
        &format!("linecut_{label}"),
        &["coord", "b", "b_norm"],
    )?;
    for (c, b) in values {
        csv.row(&[fmt_float(c), fmt_float(b), fmt_float(b / peak)])?;
    }
    csv.finish()?;
    Ok(path)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::io(&format!("write {}", path.display()), e))
}
