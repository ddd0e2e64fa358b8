//! Sampling of densities, flux, velocity and phase fields on rectangular
//! grids in momentum or coordinate space.
//!
//! Grids are row-major with the second (`v`) coordinate varying fastest:
//! `index = iu * nv + iv`. Node evaluations are independent and run on a
//! parallel map; results are written by index, so they do not depend on the
//! worker count.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::momentum::{
    psi_momentum_exact, psi_momentum_exact_gradient, psi_momentum_generic,
    psi_momentum_near_center, psi_momentum_near_center_gradient,
};
use crate::position::{psi_position, psi_position_gradient, psi_position_log_modulus_phase};
use crate::pulse::{MomentumPoint, PositionPoint, PulseParams};
use crate::quadrature::QuadratureSpec;
use crate::{k0_squared, Amplitude, Real};

/// Which plane a grid or field lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Momentum,
    Position,
}

/// Uniform rectangular grid; endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<R> {
    pub umin: R,
    pub umax: R,
    pub vmin: R,
    pub vmax: R,
    pub nu: usize,
    pub nv: usize,
}

impl<R: Real> GridSpec<R> {
    // negated comparisons so NaN bounds fail validation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(umin: R, umax: R, vmin: R, vmax: R, nu: usize, nv: usize) -> Result<Self> {
        if !(umax > umin) || !(vmax > vmin) {
            return Err(CoreError::Domain("grid bounds must be increasing".into()));
        }
        if nu == 0 || nv == 0 {
            return Err(CoreError::Domain("grid node counts must be positive".into()));
        }
        Ok(Self {
            umin,
            umax,
            vmin,
            vmax,
            nu,
            nv,
        })
    }

    /// Square grid centred on `(cu, cv)` with half-width `h`.
    pub fn centered(cu: R, cv: R, h: R, n: usize) -> Result<Self> {
        Self::new(cu - h, cu + h, cv - h, cv + h, n, n)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u_at(&self, iu: usize) -> R {
        coord(self.umin, self.umax, self.nu, iu)
    }

    pub fn v_at(&self, iv: usize) -> R {
        coord(self.vmin, self.vmax, self.nv, iv)
    }

    pub fn node(&self, idx: usize) -> (R, R) {
        (self.u_at(idx / self.nv), self.v_at(idx % self.nv))
    }

    pub fn cell_size(&self) -> (R, R) {
        let du = if self.nu > 1 {
            (self.umax - self.umin) / R::of((self.nu - 1) as f64)
        } else {
            R::zero()
        };
        let dv = if self.nv > 1 {
            (self.vmax - self.vmin) / R::of((self.nv - 1) as f64)
        } else {
            R::zero()
        };
        (du, dv)
    }
}

fn coord<R: Real>(min: R, max: R, n: usize, i: usize) -> R {
    if n == 1 {
        min
    } else {
        min + (max - min) * R::of(i as f64) / R::of((n - 1) as f64)
    }
}

/// Per-node data of a sampled field.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload<R> {
    Scalar(Vec<R>),
    Complex(Vec<Amplitude<R>>),
    Vector(Vec<[R; 2]>),
}

impl<R> Payload<R> {
    pub fn len(&self) -> usize {
        match self {
            Payload::Scalar(v) => v.len(),
            Payload::Complex(v) => v.len(),
            Payload::Vector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// What a sampled grid holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldQuantity {
    Density,
    LogDensity,
    Phase,
    Flux,
    Velocity,
    Wavefunction,
}

/// A rectangular sampling of a scalar, complex or 2-vector field.
///
/// `singular` marks nodes whose value could not be formed (vortex cores for
/// velocity fields); those entries are not fabricated.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid<R> {
    pub spec: GridSpec<R>,
    pub space: Space,
    pub time: R,
    pub quantity: FieldQuantity,
    pub payload: Payload<R>,
    pub singular: Vec<bool>,
}

impl<R: Real> FieldGrid<R> {
    fn new(
        spec: GridSpec<R>,
        space: Space,
        time: R,
        quantity: FieldQuantity,
        payload: Payload<R>,
        singular: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(payload.len(), spec.len());
        debug_assert_eq!(singular.len(), spec.len());
        Self {
            spec,
            space,
            time,
            quantity,
            payload,
            singular,
        }
    }
}

/// A complex scalar field over one of the two planes, with an analytic
/// gradient where the closed form provides one.
pub trait ComplexField2d<R: Real>: Sync {
    fn space(&self) -> Space;

    fn time(&self) -> R;

    fn eval(&self, u: R, v: R) -> Result<Amplitude<R>>;

    /// `(d psi/du, d psi/dv)`; closed forms are analytic, the quadrature
    /// path falls back to central differences.
    fn gradient(&self, u: R, v: R) -> Result<(Amplitude<R>, Amplitude<R>)>;

    /// `ln |psi|`, overridden where a log path avoids Gaussian underflow.
    fn log_modulus(&self, u: R, v: R) -> Result<R> {
        Ok(self.eval(u, v)?.norm().ln())
    }
}

/// Closed-form momentum wavefunction for the canonical pulse.
#[derive(Debug, Clone, Copy)]
pub struct MomentumExactField<R> {
    pub t: R,
    pub f0: R,
}

impl<R: Real> ComplexField2d<R> for MomentumExactField<R> {
    fn space(&self) -> Space {
        Space::Momentum
    }

    fn time(&self) -> R {
        self.t
    }

    fn eval(&self, u: R, v: R) -> Result<Amplitude<R>> {
        psi_momentum_exact(MomentumPoint::new(u, v), self.t, self.f0)
    }

    fn gradient(&self, u: R, v: R) -> Result<(Amplitude<R>, Amplitude<R>)> {
        psi_momentum_exact_gradient(MomentumPoint::new(u, v), self.t, self.f0)
    }
}

/// Near-center Gaussian approximation in momentum space.
#[derive(Debug, Clone, Copy)]
pub struct MomentumNearCenterField<R> {
    pub t: R,
    pub f0: R,
}

impl<R: Real> ComplexField2d<R> for MomentumNearCenterField<R> {
    fn space(&self) -> Space {
        Space::Momentum
    }

    fn time(&self) -> R {
        self.t
    }

    fn eval(&self, u: R, v: R) -> Result<Amplitude<R>> {
        psi_momentum_near_center(MomentumPoint::new(u, v), self.t, self.f0)
    }

    fn gradient(&self, u: R, v: R) -> Result<(Amplitude<R>, Amplitude<R>)> {
        psi_momentum_near_center_gradient(MomentumPoint::new(u, v), self.t, self.f0)
    }

    fn log_modulus(&self, u: R, v: R) -> Result<R> {
        let s = u * u + v * v;
        let ds = s - k0_squared::<R>();
        let three_pi2 = R::of(3.0) * R::PI() * R::PI();
        let brk = Complex::new(u, self.f0 * ds / three_pi2);
        Ok(-ds / R::PI() + brk.norm().ln())
    }
}

/// Perturbation-theory assembly by time quadrature, any windowed-cosine
/// pulse.
#[derive(Debug, Clone, Copy)]
pub struct MomentumGenericField<R> {
    pub pulse: PulseParams<R>,
    pub t: R,
    pub quad: QuadratureSpec<R>,
}

impl<R: Real> ComplexField2d<R> for MomentumGenericField<R> {
    fn space(&self) -> Space {
        Space::Momentum
    }

    fn time(&self) -> R {
        self.t
    }

    fn eval(&self, u: R, v: R) -> Result<Amplitude<R>> {
        psi_momentum_generic(MomentumPoint::new(u, v), self.t, &self.pulse, &self.quad)
    }

    fn gradient(&self, u: R, v: R) -> Result<(Amplitude<R>, Amplitude<R>)> {
        central_difference_gradient(self, u, v, R::of(1e-5))
    }
}

/// Coordinate-space wave packet.
#[derive(Debug, Clone, Copy)]
pub struct PositionPacketField<R> {
    pub t: R,
    pub f0: R,
}

impl<R: Real> ComplexField2d<R> for PositionPacketField<R> {
    fn space(&self) -> Space {
        Space::Position
    }

    fn time(&self) -> R {
        self.t
    }

    fn eval(&self, u: R, v: R) -> Result<Amplitude<R>> {
        psi_position(PositionPoint::new(u, v), self.t, self.f0)
    }

    fn gradient(&self, u: R, v: R) -> Result<(Amplitude<R>, Amplitude<R>)> {
        psi_position_gradient(PositionPoint::new(u, v), self.t, self.f0)
    }

    fn log_modulus(&self, u: R, v: R) -> Result<R> {
        Ok(psi_position_log_modulus_phase(PositionPoint::new(u, v), self.t, self.f0)?.0)
    }
}

/// Central-difference gradient with step `h`, the cross-validation fallback
/// for the analytic gradients.
pub fn central_difference_gradient<R: Real>(
    field: &(impl ComplexField2d<R> + ?Sized),
    u: R,
    v: R,
    h: R,
) -> Result<(Amplitude<R>, Amplitude<R>)> {
    let two_h = h + h;
    let du = (field.eval(u + h, v)? - field.eval(u - h, v)?) / two_h;
    let dv = (field.eval(u, v + h)? - field.eval(u, v - h)?) / two_h;
    Ok((du, dv))
}

/// Symmetric flux `Im[psi* grad psi]` at a point.
pub fn symmetric_flux<R: Real>(
    field: &impl ComplexField2d<R>,
    u: R,
    v: R,
) -> Result<[R; 2]> {
    let psi = field.eval(u, v)?;
    let (gu, gv) = field.gradient(u, v)?;
    Ok([(psi.conj() * gu).im, (psi.conj() * gv).im])
}

/// Velocity `v = j / rho` at a point.
///
/// `rho_floor` is the absolute density below which the node is reported as
/// singular instead of fabricating a value.
pub fn velocity_at<R: Real>(
    field: &impl ComplexField2d<R>,
    u: R,
    v: R,
    rho_floor: R,
) -> Result<[R; 2]> {
    let psi = field.eval(u, v)?;
    let rho = psi.norm_sqr();
    if rho <= rho_floor || rho == R::zero() {
        return Err(CoreError::SingularNode {
            rho: rho.to_f64().unwrap_or(f64::NAN),
            floor: rho_floor.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (gu, gv) = field.gradient(u, v)?;
    Ok([(psi.conj() * gu).im / rho, (psi.conj() * gv).im / rho])
}

/// Parallel map over the nodes of a grid; output order is the grid order.
pub fn map_grid<R: Real, T: Send>(
    spec: &GridSpec<R>,
    f: impl Fn(R, R) -> T + Sync,
) -> Vec<T> {
    (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let (u, v) = spec.node(idx);
            f(u, v)
        })
        .collect()
}

/// Density and log-density sampled over a grid.
///
/// `ln_rho` is computed through the log-modulus path, so it stays finite
/// far outside the packet where the density itself underflows; only nodes
/// with an exactly vanishing bracket give `-inf` and are flagged singular.
pub struct DensityGrid<R> {
    pub rho: FieldGrid<R>,
    pub ln_rho: FieldGrid<R>,
}

pub fn density_grid<R: Real>(
    field: &impl ComplexField2d<R>,
    spec: &GridSpec<R>,
) -> Result<DensityGrid<R>> {
    let ln_mod = try_map(spec, |u, v| field.log_modulus(u, v))?;
    let two = R::of(2.0);
    let ln_rho: Vec<R> = ln_mod.iter().map(|&m| two * m).collect();
    let rho: Vec<R> = ln_rho.iter().map(|&l| l.exp()).collect();
    let singular: Vec<bool> = ln_rho.iter().map(|l| !l.is_finite()).collect();
    Ok(DensityGrid {
        rho: FieldGrid::new(
            *spec,
            field.space(),
            field.time(),
            FieldQuantity::Density,
            Payload::Scalar(rho),
            singular.clone(),
        ),
        ln_rho: FieldGrid::new(
            *spec,
            field.space(),
            field.time(),
            FieldQuantity::LogDensity,
            Payload::Scalar(ln_rho),
            singular,
        ),
    })
}

/// Complex wavefunction values over a grid.
pub fn wavefunction_grid<R: Real>(
    field: &impl ComplexField2d<R>,
    spec: &GridSpec<R>,
) -> Result<FieldGrid<R>> {
    let values = try_map(spec, |u, v| field.eval(u, v))?;
    let singular = vec![false; values.len()];
    Ok(FieldGrid::new(
        *spec,
        field.space(),
        field.time(),
        FieldQuantity::Wavefunction,
        Payload::Complex(values),
        singular,
    ))
}

/// Principal-value phase in `(-pi, pi]` per node.
pub fn phase_grid<R: Real>(
    field: &impl ComplexField2d<R>,
    spec: &GridSpec<R>,
) -> Result<FieldGrid<R>> {
    let values = try_map(spec, |u, v| Ok(principal_phase(field.eval(u, v)?)))?;
    let singular = vec![false; values.len()];
    Ok(FieldGrid::new(
        *spec,
        field.space(),
        field.time(),
        FieldQuantity::Phase,
        Payload::Scalar(values),
        singular,
    ))
}

/// `arg psi` mapped onto `(-pi, pi]`.
pub fn principal_phase<R: Real>(psi: Amplitude<R>) -> R {
    let a = psi.im.atan2(psi.re);
    if a == -R::PI() {
        R::PI()
    } else {
        a
    }
}

/// Flux vectors over a grid.
pub fn flux_grid<R: Real>(
    field: &impl ComplexField2d<R>,
    spec: &GridSpec<R>,
) -> Result<FieldGrid<R>> {
    let values = try_map(spec, |u, v| symmetric_flux(field, u, v))?;
    let singular = vec![false; values.len()];
    Ok(FieldGrid::new(
        *spec,
        field.space(),
        field.time(),
        FieldQuantity::Flux,
        Payload::Vector(values),
        singular,
    ))
}

/// Velocity vectors over a grid; vortex-core nodes (density at or below
/// `floor_rel` times the grid peak) are flagged singular and zero-filled.
pub fn velocity_grid<R: Real>(
    field: &impl ComplexField2d<R>,
    spec: &GridSpec<R>,
    floor_rel: R,
) -> Result<FieldGrid<R>> {
    let rho = try_map(spec, |u, v| Ok(field.eval(u, v)?.norm_sqr()))?;
    let peak = rho.iter().fold(R::zero(), |a, &b| a.max(b));
    let floor = peak * floor_rel;
    let values: Vec<std::result::Result<[R; 2], bool>> = (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let (u, v) = spec.node(idx);
            match velocity_at(field, u, v, floor) {
                Ok(vel) => Ok(vel),
                Err(CoreError::SingularNode { .. }) => Err(true),
                Err(_) => Err(false),
            }
        })
        .collect();
    let mut vecs = Vec::with_capacity(values.len());
    let mut singular = Vec::with_capacity(values.len());
    for v in values {
        match v {
            Ok(vel) => {
                vecs.push(vel);
                singular.push(false);
            }
            Err(true) => {
                vecs.push([R::zero(), R::zero()]);
                singular.push(true);
            }
            Err(false) => {
                return Err(CoreError::Domain(
                    "velocity grid evaluation failed at a node".into(),
                ))
            }
        }
    }
    Ok(FieldGrid::new(
        *spec,
        field.space(),
        field.time(),
        FieldQuantity::Velocity,
        Payload::Vector(vecs),
        singular,
    ))
}

/// Default relative density floor below which velocity nodes are singular.
pub fn default_velocity_floor_rel<R: Real>() -> R {
    R::of(1e-300)
}

fn try_map<R: Real, T: Send>(
    spec: &GridSpec<R>,
    f: impl Fn(R, R) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let (u, v) = spec.node(idx);
            f(u, v)
        })
        .collect();
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k0;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn grid_nodes_include_endpoints() {
        let g = GridSpec::new(-4.0f64, 4.0, -4.0, 4.0, 5, 3).unwrap();
        assert_eq!(g.u_at(0), -4.0);
        assert_eq!(g.u_at(4), 4.0);
        assert_eq!(g.v_at(0), -4.0);
        assert_eq!(g.v_at(2), 4.0);
        // y (second coordinate) varies fastest
        assert_eq!(g.node(1), (-4.0, 0.0));
        assert!(GridSpec::new(1.0f64, -1.0, 0.0, 1.0, 4, 4).is_err());
    }

    fn random_points(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n)
            .map(|_| (rng.gen_range(lo..hi), rng.gen_range(lo..hi)))
            .collect()
    }

    #[test]
    fn analytic_gradients_match_central_differences() {
        let t = 5.0;
        let f0 = 0.4;
        let exact = MomentumExactField { t, f0 };
        let near = MomentumNearCenterField { t, f0 };
        for (u, v) in random_points(20, -3.5, 3.5, 7) {
            for field in [&exact as &dyn ComplexField2d<f64>, &near] {
                let (gu, gv) = field.gradient(u, v).unwrap();
                let (nu_, nv_) = central_difference_gradient(field, u, v, 1e-5).unwrap();
                let scale = gu.norm().max(gv.norm()).max(1e-12);
                assert!(
                    (gu - nu_).norm() / scale < 1e-6 && (gv - nv_).norm() / scale < 1e-6,
                    "gradient mismatch at ({u},{v}): {gu} vs {nu_}"
                );
            }
        }
        let pos = PositionPacketField { t, f0 };
        let x0 = 0.064;
        let y0 = 7.05;
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let u = x0 + rng.gen_range(-3.0..3.0);
            let v = y0 + rng.gen_range(-3.0..3.0);
            let (gu, gv) = pos.gradient(u, v).unwrap();
            let (nu_, nv_) = central_difference_gradient(&pos, u, v, 1e-5).unwrap();
            let scale = gu.norm().max(gv.norm()).max(1e-12);
            assert!(
                (gu - nu_).norm() / scale < 1e-6 && (gv - nv_).norm() / scale < 1e-6,
                "position gradient mismatch at ({u},{v})"
            );
        }
    }

    #[test]
    fn gradient_is_nonzero_where_psi_vanishes() {
        // simple zero: at the vortex center of the near form the value is 0
        // but the derivative along kx is not
        let near = MomentumNearCenterField { t: 5.0, f0: 0.4 };
        let (gu, _gv) = near.gradient(0.0, k0::<f64>()).unwrap();
        assert!(gu.norm() > 0.1);
        // F0 = 0, on the nodal line of cos(phi_k): psi = 0, d/dkx != 0
        let exact0 = MomentumExactField { t: 5.0, f0: 0.0 };
        assert_eq!(exact0.eval(0.0, 1.5).unwrap().norm(), 0.0);
        let (gu, _) = exact0.gradient(0.0, 1.5).unwrap();
        assert!(gu.norm() > 0.0);
    }

    #[test]
    fn flux_vanishes_at_wavefunction_zero() {
        let near = MomentumNearCenterField { t: 5.0, f0: 0.0 };
        // F0 = 0 makes psi exactly zero on the kx = 0 line
        let j = symmetric_flux(&near, 0.0, 1.5).unwrap();
        assert_eq!(j, [0.0, 0.0]);
    }

    #[test]
    fn flux_keeps_time_dependence() {
        // density is static under free evolution, the flux is not
        let f5 = MomentumExactField::<f64> { t: 5.0, f0: 0.4 };
        let f6 = MomentumExactField::<f64> { t: 6.0, f0: 0.4 };
        let j5 = symmetric_flux(&f5, 1.0, 0.3).unwrap();
        let j6 = symmetric_flux(&f6, 1.0, 0.3).unwrap();
        assert!((j5[0] - j6[0]).abs() > 1e-6 || (j5[1] - j6[1]).abs() > 1e-6);
        let rho5 = f5.eval(1.0, 0.3).unwrap().norm_sqr();
        let rho6 = f6.eval(1.0, 0.3).unwrap().norm_sqr();
        assert_relative_eq!(rho5, rho6, max_relative = 1e-12);
    }

    #[test]
    fn velocity_singular_exactly_at_a_zero() {
        // F0 = 0: the bracket is exactly kx, so rho = 0 on the line kx = 0
        let near = MomentumNearCenterField { t: 5.0, f0: 0.0 };
        let err = velocity_at(&near, 0.0, 1.5, default_velocity_floor_rel());
        assert!(matches!(err, Err(CoreError::SingularNode { .. })));
    }

    #[test]
    fn velocity_mirror_symmetry_on_axis() {
        // v_y vanishes on the y = 0 line in position space
        let pos = PositionPacketField { t: 5.0, f0: 0.4 };
        for x in [-2.0, 0.3, 1.7, 5.0] {
            let v = velocity_at(&pos, x, 0.0, 0.0).unwrap();
            assert_eq!(v[1], 0.0, "v_y != 0 at x = {x}");
        }
    }

    #[test]
    fn opposite_rotation_sense_around_the_two_centers() {
        let pos = PositionPacketField { t: 5.0, f0: 0.4 };
        let x0 = 0.06385612854949717;
        let y0 = 7.048814404874335;
        // tangential velocity at a point right of each center
        let vu = velocity_at(&pos, x0 + 0.05, y0, 0.0).unwrap();
        let vl = velocity_at(&pos, x0 + 0.05, -y0, 0.0).unwrap();
        assert!(vu[1] * vl[1] < 0.0, "same rotation sense: {vu:?} {vl:?}");
    }

    #[test]
    fn density_grid_properties() {
        let field = MomentumExactField { t: 5.0, f0: 0.4 };
        // even node counts keep kx = 0 off the grid, matching the figures
        let spec = GridSpec::new(-4.0f64, 4.0, -4.0, 4.0, 40, 40).unwrap();
        let d = density_grid(&field, &spec).unwrap();
        let Payload::Scalar(rho) = &d.rho.payload else {
            panic!("expected scalar payload")
        };
        assert!(rho.iter().all(|&r| r >= 0.0));
        let Payload::Scalar(ln_rho) = &d.ln_rho.payload else {
            panic!()
        };
        assert!(ln_rho.iter().all(|&l| l.is_finite()));
        // mirror symmetry row by row: v -> -v maps node iv to nv-1-iv.
        // The mirrored node coordinate agrees only to rounding, so the
        // comparison is loose near the nodal circles where ln(rho) is steep.
        for iu in 0..spec.nu {
            for iv in 0..spec.nv {
                let a = rho[iu * spec.nv + iv];
                let b = rho[iu * spec.nv + (spec.nv - 1 - iv)];
                assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn density_zero_at_vortex_node() {
        let field = MomentumNearCenterField { t: 5.0, f0: 0.4 };
        // grid with a node exactly at (0, ~k0)
        let spec = GridSpec::new(-1.0f64, 1.0, k0::<f64>() - 1.0, k0::<f64>() + 1.0, 3, 3).unwrap();
        let d = density_grid(&field, &spec).unwrap();
        let Payload::Scalar(rho) = &d.rho.payload else {
            panic!()
        };
        let center = spec.nv + 1;
        assert!(rho[center] < 1e-30, "rho at vortex node: {}", rho[center]);
    }

    #[test]
    fn phase_values_and_principal_range() {
        // at F0 = 0 on the positive kx axis (where the real prefactor is
        // positive) the phase is k^2 - E_k t modulo 2 pi
        let field = MomentumExactField { t: 5.0, f0: 0.0 };
        let kx = 1.7;
        let phase = principal_phase(field.eval(kx, 0.0).unwrap());
        let expect = {
            let raw: f64 = kx * kx - kx * kx / 2.0 * 5.0;
            let m = raw.rem_euclid(2.0 * PI);
            if m > PI {
                m - 2.0 * PI
            } else {
                m
            }
        };
        assert_relative_eq!(phase, expect, max_relative = 1e-12);
        // phase jumps by pi across the nodal line of cos(phi_k)
        let above = principal_phase(field.eval(1e-6, 1.5).unwrap());
        let below = principal_phase(field.eval(-1e-6, 1.5).unwrap());
        let jump = (above - below).abs();
        assert!((jump - PI).abs() < 1e-3, "jump = {jump}");
        assert_eq!(principal_phase(num_complex::Complex::new(-1.0f64, -0.0)), PI);
    }

    #[test]
    fn velocity_grid_flags_and_determinism() {
        let field = MomentumNearCenterField { t: 5.0, f0: 0.0 };
        let spec = GridSpec::new(-1.0f64, 1.0, 1.0, 2.0, 3, 4).unwrap();
        let g1 = velocity_grid(&field, &spec, default_velocity_floor_rel()).unwrap();
        let g2 = velocity_grid(&field, &spec, default_velocity_floor_rel()).unwrap();
        assert_eq!(g1, g2);
        // the kx = 0 column is a nodal line at F0 = 0 -> singular flags
        for iv in 0..spec.nv {
            assert!(g1.singular[spec.nv + iv]);
        }
    }

    #[test]
    fn generic_field_gradient_fallback() {
        let field = MomentumGenericField {
            pulse: PulseParams::canonical(0.4),
            t: 5.0,
            quad: QuadratureSpec::new(100, 16, 12.0, 1e-10).unwrap(),
        };
        let (gu, gv) = field.gradient(1.3, 0.6).unwrap();
        assert!(gu.is_finite() && gv.is_finite());
        assert!(gu.norm() > 0.0);
    }
}
