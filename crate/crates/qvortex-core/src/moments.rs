//! Norms, mean momenta/coordinates and dispersions by 2-D polar quadrature,
//! plus the closed-form moment formulas of the near-center approximation.
//!
//! Momentum-space integrals carry the measure `d^2k / (2 pi)`; coordinate
//! space uses the plain `d^2r`. All reported moments are ratios of
//! integrals, so they do not depend on the normalization constant.

use crate::error::{CoreError, Result};
use crate::field::{ComplexField2d, Space};
use crate::quadrature::{integrate_polar, QuadratureSpec};
use crate::{k0_squared, Real};

/// How a report was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    NumericExact,
    ClosedFormApprox,
}

/// First and second moments of a density in one of the two planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport<R> {
    pub mean_u: R,
    pub mean_v: R,
    pub var_u: R,
    pub var_v: R,
    /// `int |psi|^2 dmu` with the space's measure, for normalization `1`.
    pub norm: R,
    pub method: MomentMethod,
}

fn raw_moments<R: Real>(
    field: &impl ComplexField2d<R>,
    q: &QuadratureSpec<R>,
) -> Result<[R; 5]> {
    let sums = integrate_polar(q, |r, phi| {
        let u = r * phi.cos();
        let v = r * phi.sin();
        let rho = match field.eval(u, v) {
            Ok(psi) => psi.norm_sqr(),
            Err(_) => R::zero(),
        };
        [rho, u * rho, v * rho, u * u * rho, v * v * rho]
    });
    Ok(sums)
}

fn report_from_sums<R: Real>(sums: [R; 5], measure: R, method: MomentMethod) -> MomentReport<R> {
    let [n, su, sv, suu, svv] = sums;
    let mean_u = su / n;
    let mean_v = sv / n;
    MomentReport {
        mean_u,
        mean_v,
        var_u: suu / n - mean_u * mean_u,
        var_v: svv / n - mean_v * mean_v,
        norm: n * measure,
        method,
    }
}

/// Moments of `|psi|^2` for a momentum- or position-space field, with the
/// cutoff self-consistency check: the result is accepted only if doubling
/// the radial nodes and extending the cutoff by 1.5x moves norm and
/// variances by less than `q.tol` (relative) and the means by less than
/// `q.tol` absolute. The refined values are returned.
pub fn field_moments<R: Real>(
    field: &impl ComplexField2d<R>,
    q: &QuadratureSpec<R>,
) -> Result<MomentReport<R>> {
    let measure = match field.space() {
        Space::Momentum => (R::PI() + R::PI()).recip(),
        Space::Position => R::one(),
    };
    let coarse = report_from_sums(raw_moments(field, q)?, measure, MomentMethod::NumericExact);
    let fine = report_from_sums(
        raw_moments(field, &q.refined())?,
        measure,
        MomentMethod::NumericExact,
    );
    let rel = |a: R, b: R| (a - b).abs() / b.abs().max(R::of(1e-300));
    let worst = rel(coarse.norm, fine.norm)
        .max(rel(coarse.var_u, fine.var_u))
        .max(rel(coarse.var_v, fine.var_v))
        .max((coarse.mean_u - fine.mean_u).abs())
        .max((coarse.mean_v - fine.mean_v).abs());
    if worst > q.tol {
        return Err(CoreError::CutoffNonConvergence {
            rel_change: worst.to_f64().unwrap_or(f64::NAN),
            tol: q.tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(fine)
}

/// Numeric momentum moments of the exact closed-form wavefunction.
///
/// The exact form has a polynomial (not Gaussian) tail, so it needs a wider
/// cutoff and a looser tolerance than the near-center default; see
/// [`default_exact_momentum_quadrature`].
pub fn momentum_moments_numeric<R: Real>(
    t: R,
    f0: R,
    q: &QuadratureSpec<R>,
) -> Result<MomentReport<R>> {
    field_moments(&crate::field::MomentumExactField { t, f0 }, q)
}

/// Numeric momentum moments of the near-center approximation.
pub fn momentum_moments_near_center<R: Real>(
    t: R,
    f0: R,
    q: &QuadratureSpec<R>,
) -> Result<MomentReport<R>> {
    field_moments(&crate::field::MomentumNearCenterField { t, f0 }, q)
}

/// Quadrature spec sized for the exact form's polynomial tail.
pub fn default_exact_momentum_quadrature<R: Real>() -> QuadratureSpec<R> {
    QuadratureSpec {
        n_radial: 3000,
        n_angular: 32,
        r_max: R::of(20.0),
        tol: R::of(1e-6),
    }
}

/// Closed-form dispersions `(var_kx, var_ky)` of the near-center form.
///
/// `var_kx = (pi/4) (27 pi^5 + F0^2 (4 - 8 pi + 6 pi^2)) /
///           (9 pi^5 + 2 F0^2 (2 - 6 pi + 5 pi^2))`,
/// and `var_ky` the same with `9 pi^5` in the numerator. At `F0 = 0` these
/// are exactly `(3 pi/4, pi/4)`.
pub fn momentum_dispersion_closed_form<R: Real>(f0: R) -> (R, R) {
    let pi = R::PI();
    let pi5 = pi * pi * pi * pi * pi;
    let f2 = f0 * f0;
    let num_common = f2 * (R::of(4.0) - R::of(8.0) * pi + R::of(6.0) * pi * pi);
    let den = R::of(9.0) * pi5
        + R::of(2.0) * f2 * (R::of(2.0) - R::of(6.0) * pi + R::of(5.0) * pi * pi);
    let quarter_pi = pi / R::of(4.0);
    (
        quarter_pi * (R::of(27.0) * pi5 + num_common) / den,
        quarter_pi * (R::of(9.0) * pi5 + num_common) / den,
    )
}

/// How [`position_moments`] obtains its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionMomentMode {
    Numeric,
    ClosedForm,
}

/// Coordinate moments at time `t`.
///
/// `ClosedForm` returns the published approximations
/// `<x> ~ -12 k0^2 F0 / (9 pi^5)`, `<y> = 0`,
/// `var_x ~ 3 pi tau^2 / 4`, `var_y ~ pi tau^2 / 4` (norm reported as 1);
/// `Numeric` integrates `|psi|^2` of the coordinate-space packet.
pub fn position_moments<R: Real>(
    t: R,
    f0: R,
    mode: PositionMomentMode,
    q: &QuadratureSpec<R>,
) -> Result<MomentReport<R>> {
    if t < R::of(4.0) {
        return Err(CoreError::Domain(format!(
            "position moments need t >= 4, got {t}"
        )));
    }
    match mode {
        PositionMomentMode::Numeric => {
            field_moments(&crate::field::PositionPacketField { t, f0 }, q)
        }
        PositionMomentMode::ClosedForm => {
            let pi = R::PI();
            let tau = t - R::of(2.0);
            let pi5 = pi * pi * pi * pi * pi;
            Ok(MomentReport {
                mean_u: -R::of(12.0) * k0_squared::<R>() * f0 / (R::of(9.0) * pi5),
                mean_v: R::zero(),
                var_u: R::of(3.0) * pi * tau * tau / R::of(4.0),
                var_v: pi * tau * tau / R::of(4.0),
                norm: R::one(),
                method: MomentMethod::ClosedFormApprox,
            })
        }
    }
}

/// Scale `c` such that `int |c psi|^2 dmu = 1`, with the same cutoff
/// self-consistency rule as the moments.
pub fn normalize<R: Real>(
    field: &impl ComplexField2d<R>,
    q: &QuadratureSpec<R>,
) -> Result<R> {
    let report = field_moments(field, q)?;
    Ok(report.norm.sqrt().recip())
}
