//! SVG quiver plots of velocity grids, with singular (vortex-core) nodes
//! marked and optional RK4 streamlines.

use std::io::{BufWriter, Write};
use std::path::Path;

use qvortex_core::{FieldGrid, Payload};

use crate::error::{CliError, Result};

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 20.0;

struct Mapper {
    umin: f64,
    vmax: f64,
    scale: f64,
}

impl Mapper {
    fn to_svg(&self, u: f64, v: f64) -> (f64, f64) {
        (
            MARGIN + (u - self.umin) * self.scale,
            MARGIN + (self.vmax - v) * self.scale,
        )
    }
}

fn coord(x: f64) -> String {
    format!("{x:.2}")
}

/// Writes a quiver plot. Arrow lengths are proportional to `|v|` and capped
/// at 0.9 of a grid cell; singular nodes are drawn as small circles.
/// When `velocity` is given, RK4 streamlines are traced from a deterministic
/// ring of seeds around the grid center.
pub fn write_quiver(
    path: &Path,
    grid: &FieldGrid<f64>,
    velocity: Option<&dyn Fn(f64, f64) -> Option<[f64; 2]>>,
) -> Result<()> {
    let Payload::Vector(vectors) = &grid.payload else {
        return Err(CliError::Config("svg export needs a vector grid".into()));
    };
    let spec = &grid.spec;
    let (du, dv) = spec.cell_size();
    let cell = du.min(dv);
    let extent_u = spec.umax - spec.umin;
    let extent_v = spec.vmax - spec.vmin;
    let scale = (CANVAS - 2.0 * MARGIN) / extent_u.max(extent_v);
    let map = Mapper {
        umin: spec.umin,
        vmax: spec.vmax,
        scale,
    };
    let width = 2.0 * MARGIN + extent_u * scale;
    let height = 2.0 * MARGIN + extent_v * scale;

    let vmax = vectors
        .iter()
        .map(|v| v[0].hypot(v[1]))
        .fold(0.0f64, f64::max);

    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(&format!("create {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io("svg write", e);
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        coord(width),
        coord(height),
        coord(width),
        coord(height)
    )
    .map_err(io)?;
    writeln!(
        w,
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>"
    )
    .map_err(io)?;

    // streamlines under the arrows
    if let Some(vel) = velocity {
        let cu = (spec.umin + spec.umax) / 2.0;
        let cv = (spec.vmin + spec.vmax) / 2.0;
        for ring in 1..=3 {
            let radius = cell * 2.0 * ring as f64;
            for i in 0..8 {
                let theta = std::f64::consts::PI * 2.0 * i as f64 / 8.0;
                let seed = (cu + radius * theta.cos(), cv + radius * theta.sin());
                let pts = trace_streamline(vel, seed, cell * 0.2, 400, spec);
                if pts.len() > 4 {
                    let d: Vec<String> = pts
                        .iter()
                        .enumerate()
                        .map(|(j, &(u, v))| {
                            let (x, y) = map.to_svg(u, v);
                            format!("{}{} {}", if j == 0 { "M" } else { "L" }, coord(x), coord(y))
                        })
                        .collect();
                    writeln!(
                        w,
                        "<path d=\"{}\" fill=\"none\" stroke=\"#9ecae1\" stroke-width=\"0.8\"/>",
                        d.join(" ")
                    )
                    .map_err(io)?;
                }
            }
        }
    }

    for (idx, vector) in vectors.iter().enumerate() {
        let (u, v) = spec.node(idx);
        let (x, y) = map.to_svg(u, v);
        if grid.singular[idx] {
            writeln!(
                w,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#d62728\"/>",
                coord(x),
                coord(y)
            )
            .map_err(io)?;
            continue;
        }
        let [vu, vv] = *vector;
        let mag = vu.hypot(vv);
        if mag == 0.0 || vmax == 0.0 {
            continue;
        }
        let len = 0.9 * cell * (mag / vmax) * scale;
        let (ex, ey) = (x + vu / mag * len, y - vv / mag * len);
        // short two-segment head at the tip
        let ang = (y - ey).atan2(ex - x);
        let head = len * 0.3;
        let h1 = (
            ex - head * (ang - 0.4).cos(),
            ey + head * (ang - 0.4).sin(),
        );
        let h2 = (
            ex - head * (ang + 0.4).cos(),
            ey + head * (ang + 0.4).sin(),
        );
        writeln!(
            w,
            "<path d=\"M{} {} L{} {} M{} {} L{} {} M{} {} L{} {}\" stroke=\"#1f3d7a\" stroke-width=\"1\" fill=\"none\"/>",
            coord(x),
            coord(y),
            coord(ex),
            coord(ey),
            coord(ex),
            coord(ey),
            coord(h1.0),
            coord(h1.1),
            coord(ex),
            coord(ey),
            coord(h2.0),
            coord(h2.1)
        )
        .map_err(io)?;
    }
    writeln!(w, "</svg>").map_err(io)?;
    w.flush().map_err(|e| CliError::io("svg flush", e))
}

/// Fixed-step RK4 trace of the velocity direction field, stopping when the
/// trajectory leaves the grid window or the field is singular.
fn trace_streamline(
    vel: &dyn Fn(f64, f64) -> Option<[f64; 2]>,
    seed: (f64, f64),
    h: f64,
    max_steps: usize,
    spec: &qvortex_core::GridSpec64,
) -> Vec<(f64, f64)> {
    let inside = |u: f64, v: f64| {
        u >= spec.umin && u <= spec.umax && v >= spec.vmin && v <= spec.vmax
    };
    // unit-speed direction field keeps the step size meaningful near the core
    let dir = |u: f64, v: f64| -> Option<[f64; 2]> {
        let [a, b] = vel(u, v)?;
        let m = a.hypot(b);
        if m < 1e-12 || !m.is_finite() {
            None
        } else {
            Some([a / m, b / m])
        }
    };
    let mut pts = vec![seed];
    let (mut u, mut v) = seed;
    for _ in 0..max_steps {
        let Some(k1) = dir(u, v) else { break };
        let Some(k2) = dir(u + 0.5 * h * k1[0], v + 0.5 * h * k1[1]) else { break };
        let Some(k3) = dir(u + 0.5 * h * k2[0], v + 0.5 * h * k2[1]) else { break };
        let Some(k4) = dir(u + h * k3[0], v + h * k3[1]) else { break };
        u += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        v += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        if !inside(u, v) {
            break;
        }
        pts.push((u, v));
    }
    pts
}
