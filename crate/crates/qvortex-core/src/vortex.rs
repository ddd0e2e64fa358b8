//! Vortex localization: closed-form centers, plaquette detection of phase
//! singularities on grids, Newton refinement with topological charges, and
//! trajectory tracing over time.
//!
//! Charge sign convention: positive charge means the phase winds by `+2 pi`
//! counterclockwise in standard axes, which is also the counterclockwise
//! circulation sense of the velocity field. With normalization `A = 1` the
//! upper vortex (at `+k0`, respectively `+y0`) carries charge `+1`.

use crate::error::{CoreError, Result};
use crate::field::{
    principal_phase, ComplexField2d, FieldGrid, GridSpec, Payload, Space,
};
use crate::position::packet_width;
use crate::{k0, k0_squared, Real};

/// A located wavefunction zero with its topological charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexDescriptor<R> {
    pub space: Space,
    /// Refined center coordinates `(u, v)` (a.u.).
    pub center: (R, R),
    /// Phase winding; `+1` for counterclockwise circulation.
    pub charge: i32,
    pub time: R,
    /// `|psi|` at the refined center.
    pub residual: R,
}

/// A grid cell whose corner phases wind by `+-2 pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSeed<R> {
    /// Cell indices `(iu, iv)` of the lower corner.
    pub cell: (usize, usize),
    /// Cell center coordinates.
    pub center: (R, R),
    /// Winding sign of the plaquette, `+1` or `-1`.
    pub winding: i32,
}

/// How [`position_centers`] solves the vortex-center condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionCenterMode {
    /// The published approximation `y0 ~ +-k0 tau`.
    PaperApprox,
    /// Exact root of the bracket: `Re = Im = 0` solved in closed form.
    ExactBracketRoot,
}

/// Momentum-space vortex centers of the canonical-pulse wavefunction:
/// `(0, +-sqrt(2 pi - 1))` with charges `+-1`.
///
/// At `F0 = 0` the zero set degenerates into the whole nodal line
/// `cos(phi_k) = 0` and no isolated centers exist.
pub fn momentum_centers_closed_form<R: Real>(f0: R, t: R) -> Result<[VortexDescriptor<R>; 2]> {
    if f0 <= R::zero() {
        return Err(CoreError::DegenerateZeroSet);
    }
    let ky = k0::<R>();
    let make = |sign: R, charge: i32| VortexDescriptor {
        space: Space::Momentum,
        center: (R::zero(), sign * ky),
        charge,
        time: t,
        residual: R::zero(),
    };
    Ok([make(R::one(), 1), make(-R::one(), -1)])
}

/// Coordinate-space vortex centers at time `t` (`t >= 4`).
///
/// `x0 = F0 (6 pi - 4)/(3 pi^3)` in both modes;
/// `ExactBracketRoot` solves the bracket zero exactly:
/// `y0 = +-sqrt(k0^2 tau^2 + (8 pi - 4)/pi^2 - x0^2)`, which is what the
/// published center values correspond to.
pub fn position_centers<R: Real>(
    f0: R,
    t: R,
    mode: PositionCenterMode,
) -> Result<[VortexDescriptor<R>; 2]> {
    if f0 < R::zero() {
        return Err(CoreError::Domain(format!("F0 must be >= 0, got {f0}")));
    }
    if t < R::of(4.0) {
        return Err(CoreError::Domain(format!(
            "position centers need t >= 4, got {t}"
        )));
    }
    let pi = R::PI();
    let tau = t - R::of(2.0);
    let x0 = f0 * (R::of(6.0) * pi - R::of(4.0)) / (R::of(3.0) * pi * pi * pi);
    let y0 = match mode {
        PositionCenterMode::PaperApprox => k0::<R>() * tau,
        PositionCenterMode::ExactBracketRoot => {
            let c = (R::of(8.0) * pi - R::of(4.0)) / (pi * pi);
            (k0_squared::<R>() * tau * tau + c - x0 * x0).sqrt()
        }
    };
    let make = |sign: R, charge: i32| VortexDescriptor {
        space: Space::Position,
        center: (x0, sign * y0),
        charge,
        time: t,
        residual: R::zero(),
    };
    Ok([make(R::one(), 1), make(-R::one(), -1)])
}

/// Wrap a phase difference onto `(-pi, pi]`.
fn wrap_phase<R: Real>(mut d: R) -> R {
    let pi = R::PI();
    let two_pi = pi + pi;
    while d > pi {
        d -= two_pi;
    }
    while d <= -pi {
        d += two_pi;
    }
    d
}

/// Plaquette scan: every grid cell whose four-corner phase winding is
/// `+-2 pi` is returned as a seed with its winding sign.
///
/// Cells whose corners all carry sizable `|psi|` can never wind, so the
/// scan produces no false positives there; cells straddling a nodal line
/// (where corner magnitudes collapse) may, and are weeded out by Newton
/// validation in [`locate_vortices`].
pub fn find_zeros<R: Real>(grid: &FieldGrid<R>) -> Result<Vec<ZeroSeed<R>>> {
    let Payload::Complex(values) = &grid.payload else {
        return Err(CoreError::Domain(
            "find_zeros needs a complex scalar grid".into(),
        ));
    };
    let spec = &grid.spec;
    let phases: Vec<R> = values.iter().map(|&z| principal_phase(z)).collect();
    let mut seeds = Vec::new();
    let pi = R::PI();
    for iu in 0..spec.nu.saturating_sub(1) {
        for iv in 0..spec.nv.saturating_sub(1) {
            let p00 = phases[iu * spec.nv + iv];
            let p10 = phases[(iu + 1) * spec.nv + iv];
            let p11 = phases[(iu + 1) * spec.nv + iv + 1];
            let p01 = phases[iu * spec.nv + iv + 1];
            let w = wrap_phase(p10 - p00)
                + wrap_phase(p11 - p10)
                + wrap_phase(p01 - p11)
                + wrap_phase(p00 - p01);
            if w.abs() > pi {
                let cu = (spec.u_at(iu) + spec.u_at(iu + 1)) / R::of(2.0);
                let cv = (spec.v_at(iv) + spec.v_at(iv + 1)) / R::of(2.0);
                seeds.push(ZeroSeed {
                    cell: (iu, iv),
                    center: (cu, cv),
                    winding: if w > R::zero() { 1 } else { -1 },
                });
            }
        }
    }
    Ok(seeds)
}

/// Options for Newton refinement of a zero.
#[derive(Debug, Clone, Copy)]
pub struct RefineOptions<R> {
    /// Residual bound `|psi|` must reach at the refined center.
    pub residual_tol: R,
    pub max_iterations: usize,
    /// Local grid step: Newton steps are clamped to twice this length
    /// (long steps can escape the convergence basin onto a nodal circle of
    /// the exact form), and the charge loop has radius twice this.
    pub cell: R,
}

impl<R: Real> RefineOptions<R> {
    pub fn with_cell(cell: R) -> Self {
        Self {
            residual_tol: R::of(1e-10),
            max_iterations: 50,
            cell,
        }
    }
}

impl<R: Real> Default for RefineOptions<R> {
    fn default() -> Self {
        Self::with_cell(R::of(0.05))
    }
}

/// Phase winding (integer) around a circle of radius `radius`, sampled at
/// `n` points.
pub fn winding_number<R: Real>(
    field: &impl ComplexField2d<R>,
    center: (R, R),
    radius: R,
    n: usize,
) -> Result<i32> {
    let two_pi = R::PI() + R::PI();
    let mut total = R::zero();
    let mut prev = None;
    let mut first = R::zero();
    for j in 0..n {
        let theta = two_pi * R::of(j as f64) / R::of(n as f64);
        let u = center.0 + radius * theta.cos();
        let v = center.1 + radius * theta.sin();
        let phase = principal_phase(field.eval(u, v)?);
        if let Some(p) = prev {
            total += wrap_phase(phase - p);
        } else {
            first = phase;
        }
        prev = Some(phase);
    }
    total += wrap_phase(first - prev.unwrap());
    let w = total / two_pi;
    Ok(w.round().to_f64().unwrap_or(0.0) as i32)
}

/// 2-D Newton refinement of a wavefunction zero from `seed`, using the
/// analytic Jacobian. The charge comes from a 16-point winding loop of
/// radius two grid steps around the refined center.
pub fn refine_zero<R: Real>(
    field: &impl ComplexField2d<R>,
    seed: (R, R),
    opts: &RefineOptions<R>,
) -> Result<VortexDescriptor<R>> {
    let (mut u, mut v) = seed;
    let step_tol = R::of(1e-13);
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let psi = field.eval(u, v)?;
        let (gu, gv) = field.gradient(u, v)?;
        // [[Re gu, Re gv], [Im gu, Im gv]] delta = -[Re psi, Im psi]
        let det = gu.re * gv.im - gv.re * gu.im;
        if det.abs() < R::of(1e-300) {
            return Err(CoreError::NonConvergence {
                u: u.to_f64().unwrap_or(f64::NAN),
                v: v.to_f64().unwrap_or(f64::NAN),
                residual: psi.norm().to_f64().unwrap_or(f64::NAN),
                iterations: opts.max_iterations,
            });
        }
        let mut du = (-psi.re * gv.im + psi.im * gv.re) / det;
        let mut dv = (-gu.re * psi.im + gu.im * psi.re) / det;
        let step = du.hypot(dv);
        let cap = opts.cell * R::of(2.0);
        if step > cap {
            du *= cap / step;
            dv *= cap / step;
        }
        u += du;
        v += dv;
        if du.hypot(dv) < step_tol * (R::one() + u.hypot(v)) {
            converged = true;
            break;
        }
    }
    let residual = field.eval(u, v)?.norm();
    if !converged || residual > opts.residual_tol {
        return Err(CoreError::NonConvergence {
            u: u.to_f64().unwrap_or(f64::NAN),
            v: v.to_f64().unwrap_or(f64::NAN),
            residual: residual.to_f64().unwrap_or(f64::NAN),
            iterations: opts.max_iterations,
        });
    }
    let charge = winding_number(field, (u, v), opts.cell * R::of(2.0), 16)?;
    if charge == 0 {
        return Err(CoreError::NonIsolatedZero {
            u: u.to_f64().unwrap_or(f64::NAN),
            v: v.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(VortexDescriptor {
        space: field.space(),
        center: (u, v),
        charge,
        time: field.time(),
        residual,
    })
}

/// Full pipeline: sample the field, plaquette-scan for seeds, refine each
/// seed and keep the validated isolated zeros (deduplicated).
///
/// Validation drops seeds whose Newton run fails to settle (phase-jump
/// artifacts on nodal lines), wanders away from its cell, or lands on a
/// zero with no winding.
pub fn locate_vortices<R: Real>(
    field: &impl ComplexField2d<R>,
    spec: &GridSpec<R>,
) -> Result<Vec<VortexDescriptor<R>>> {
    let grid = crate::field::wavefunction_grid(field, spec)?;
    let seeds = find_zeros(&grid)?;
    let (du, dv) = spec.cell_size();
    let cell = du.min(dv);
    let opts = RefineOptions::with_cell(cell);
    let validation_radius = cell * R::of(3.0);
    let mut found: Vec<VortexDescriptor<R>> = Vec::new();
    for seed in seeds {
        let Ok(desc) = refine_zero(field, seed.center, &opts) else {
            continue;
        };
        let dist = (desc.center.0 - seed.center.0).hypot(desc.center.1 - seed.center.1);
        if dist > validation_radius {
            continue;
        }
        let duplicate = found.iter().any(|d| {
            (d.center.0 - desc.center.0).hypot(d.center.1 - desc.center.1) < cell / R::of(2.0)
        });
        if !duplicate {
            found.push(desc);
        }
    }
    Ok(found)
}

/// Per-time refined centers of the upper vortex, linked by nearest-neighbor
/// continuation from the previous center.
///
/// `times` must be ascending and `> 4`. The continuation declares the track
/// lost when a refined center jumps farther than the packet width `a(tau)`.
pub fn trace_trajectory<R: Real>(
    times: &[R],
    f0: R,
    space: Space,
) -> Result<Vec<VortexDescriptor<R>>> {
    if times.is_empty() {
        return Err(CoreError::Domain("empty time list".into()));
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(CoreError::Domain("times must be ascending".into()));
        }
    }
    if times[0] < R::of(4.0) {
        return Err(CoreError::Domain("times must be >= 4".into()));
    }
    let mut out: Vec<VortexDescriptor<R>> = Vec::with_capacity(times.len());
    for &t in times {
        // continuation seed: previous center advanced by the known drift
        // (the coordinate-space vortex moves at +-k0 along y, the
        // momentum-space centers are static), refined locally afterwards
        let (seed, cell) = match (space, out.last()) {
            (Space::Momentum, None) => {
                let c = momentum_centers_closed_form(f0, t)?;
                (c[0].center, R::of(0.02))
            }
            (Space::Position, None) => {
                let c = position_centers(f0, t, PositionCenterMode::ExactBracketRoot)?;
                (c[0].center, R::of(0.02))
            }
            (Space::Momentum, Some(prev)) => (prev.center, R::of(0.02)),
            (Space::Position, Some(prev)) => {
                let dt = t - prev.time;
                let drift = k0::<R>() * dt * prev.center.1.signum();
                ((prev.center.0, prev.center.1 + drift), R::of(0.02))
            }
        };
        let refined = match space {
            Space::Momentum => refine_zero(
                &crate::field::MomentumExactField { t, f0 },
                seed,
                &RefineOptions::with_cell(cell),
            ),
            Space::Position => refine_zero(
                &crate::field::PositionPacketField { t, f0 },
                seed,
                &RefineOptions::with_cell(cell),
            ),
        };
        let scale = match space {
            Space::Position => packet_width(t).a2.sqrt(),
            Space::Momentum => R::one(),
        };
        let desc = match (refined, out.last()) {
            (Ok(d), _) => d,
            // a failed continuation means the seed left the basin: the
            // track is lost, not a generic numerical failure
            (Err(CoreError::NonConvergence { u, v, .. }), Some(prev)) => {
                let jump = (R::of(u) - prev.center.0).hypot(R::of(v) - prev.center.1);
                return Err(CoreError::TrackLoss {
                    t_prev: prev.time.to_f64().unwrap_or(f64::NAN),
                    t: t.to_f64().unwrap_or(f64::NAN),
                    jump: jump.to_f64().unwrap_or(f64::NAN),
                    scale: scale.to_f64().unwrap_or(f64::NAN),
                });
            }
            (Err(e), _) => return Err(e),
        };
        if let Some(prev) = out.last() {
            let jump = (desc.center.0 - prev.center.0).hypot(desc.center.1 - prev.center.1);
            if jump > scale {
                return Err(CoreError::TrackLoss {
                    t_prev: prev.time.to_f64().unwrap_or(f64::NAN),
                    t: t.to_f64().unwrap_or(f64::NAN),
                    jump: jump.to_f64().unwrap_or(f64::NAN),
                    scale: scale.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        out.push(desc);
    }
    Ok(out)
}
