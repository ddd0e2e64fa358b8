//! Binary PPM heatmaps of log-density grids.
//!
//! The color scale is clipped at `peak - 20` natural-log units, matching
//! the dynamic range of the published density maps. No dependencies, no
//! nondeterminism: same grid, same bytes.

use std::io::{BufWriter, Write};
use std::path::Path;

use qvortex_core::{FieldGrid, Payload};

use crate::error::{CliError, Result};

/// Dynamic range of the heatmap in natural-log units.
pub const LOG_CLIP: f64 = 20.0;

// piecewise-linear ramp, dark blue to white
const STOPS: [[f64; 3]; 5] = [
    [0.05, 0.03, 0.25],
    [0.12, 0.30, 0.70],
    [0.10, 0.65, 0.45],
    [0.90, 0.85, 0.25],
    [1.00, 1.00, 1.00],
];

fn colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let mut rgb = [0u8; 3];
    for c in 0..3 {
        let v = STOPS[i][c] * (1.0 - f) + STOPS[i + 1][c] * f;
        rgb[c] = (v * 255.0).round() as u8;
    }
    rgb
}

/// Writes a log-density grid as a P6 PPM image; `v` increases upward.
pub fn write_log_density(path: &Path, grid: &FieldGrid<f64>) -> Result<()> {
    let Payload::Scalar(values) = &grid.payload else {
        return Err(CliError::Config("ppm export needs a scalar grid".into()));
    };
    let spec = &grid.spec;
    let peak = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let floor = peak - LOG_CLIP;
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(&format!("create {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    write!(w, "P6\n{} {}\n255\n", spec.nu, spec.nv).map_err(|e| CliError::io("ppm header", e))?;
    let mut row = Vec::with_capacity(spec.nu * 3);
    for iv in (0..spec.nv).rev() {
        row.clear();
        for iu in 0..spec.nu {
            let val = values[iu * spec.nv + iv];
            let t = if val.is_finite() {
                (val - floor) / LOG_CLIP
            } else {
                0.0
            };
            row.extend_from_slice(&colormap(t));
        }
        w.write_all(&row).map_err(|e| CliError::io("ppm data", e))?;
    }
    w.flush().map_err(|e| CliError::io("ppm flush", e))
}
