//! Laser pulse model and the shared domain points.
//!
//! Atomic units throughout (`hbar = m_e = e = 1`); no unit conversions
//! anywhere in the crate.

use crate::error::{CoreError, Result};
use crate::Real;

/// Parameters of the ionizing pulse `F(t) = e_x F0 cos(w t - alpha)` gated to
/// the window `0 <= t <= T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams<R> {
    /// Field amplitude (a.u.), `>= 0`.
    pub f0: R,
    /// Carrier frequency (a.u.), `> 0`.
    pub omega: R,
    /// Pulse duration (a.u.), `> 0`.
    pub duration: R,
    /// Initial phase (rad).
    pub alpha: R,
}

impl<R: Real> PulseParams<R> {
    // negated comparisons so NaN parameters fail validation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(f0: R, omega: R, duration: R, alpha: R) -> Result<Self> {
        if !(f0 >= R::zero()) {
            return Err(CoreError::Domain(format!("F0 must be >= 0, got {f0}")));
        }
        if !(omega > R::zero()) {
            return Err(CoreError::Domain(format!("omega must be > 0, got {omega}")));
        }
        if !(duration > R::zero()) {
            return Err(CoreError::Domain(format!("T must be > 0, got {duration}")));
        }
        Ok(Self {
            f0,
            omega,
            duration,
            alpha,
        })
    }

    /// The pulse the closed forms are derived for: `omega = pi`, `T = 4`,
    /// `alpha = 0`, amplitude free.
    pub fn canonical(f0: R) -> Self {
        Self {
            f0,
            omega: R::PI(),
            duration: R::of(4.0),
            alpha: R::zero(),
        }
    }
}

/// x-component of the electric field at time `t`.
///
/// Returns `F0 cos(w t - alpha)` for `0 <= t <= T` and zero outside; both
/// endpoints are included in the support, matching the Heaviside convention
/// `theta(0) = 1` (sudden turn-on).
pub fn laser_field<R: Real>(t: R, p: &PulseParams<R>) -> R {
    if t >= R::zero() && t <= p.duration {
        p.f0 * (p.omega * t - p.alpha).cos()
    } else {
        R::zero()
    }
}

/// Transition frequency from the bound state into the continuum,
/// `w_k1 = (k^2 + 1)/2`.
pub fn transition_frequency<R: Real>(k: R) -> Result<R> {
    if k < R::zero() {
        return Err(CoreError::Domain(format!("k must be >= 0, got {k}")));
    }
    Ok((k * k + R::one()) / R::of(2.0))
}

/// A point of momentum space, Cartesian with derived polar quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPoint<R> {
    pub kx: R,
    pub ky: R,
}

impl<R: Real> MomentumPoint<R> {
    pub fn new(kx: R, ky: R) -> Self {
        Self { kx, ky }
    }

    pub fn from_polar(k: R, phi: R) -> Self {
        Self {
            kx: k * phi.cos(),
            ky: k * phi.sin(),
        }
    }

    /// Modulus `k = sqrt(kx^2 + ky^2)`.
    pub fn k(&self) -> R {
        self.kx.hypot(self.ky)
    }

    /// Polar angle `phi_k = atan2(ky, kx)`.
    pub fn phi(&self) -> R {
        self.ky.atan2(self.kx)
    }

    /// Kinetic energy `E_k = k^2 / 2`.
    pub fn energy(&self) -> R {
        (self.kx * self.kx + self.ky * self.ky) / R::of(2.0)
    }
}

/// A point of coordinate space, Cartesian with derived polar quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionPoint<R> {
    pub x: R,
    pub y: R,
}

impl<R: Real> PositionPoint<R> {
    pub fn new(x: R, y: R) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: R, phi: R) -> Self {
        Self {
            x: r * phi.cos(),
            y: r * phi.sin(),
        }
    }

    pub fn r(&self) -> R {
        self.x.hypot(self.y)
    }

    pub fn phi(&self) -> R {
        self.y.atan2(self.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_complex;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    #[test]
    fn field_vanishes_outside_support() {
        let p = PulseParams::canonical(0.4);
        assert_eq!(laser_field(-1.0, &p), 0.0);
        assert_eq!(laser_field(4.0 + 1e-12, &p), 0.0);
        assert_eq!(laser_field(1e6, &p), 0.0);
    }

    #[test]
    fn field_values_inside_support() {
        let p = PulseParams::canonical(0.4);
        assert_eq!(laser_field(0.0, &p), 0.4);
        // endpoints included, cos(4 pi) = 1
        assert_relative_eq!(laser_field(4.0, &p), 0.4, max_relative = 1e-15);
        // one full period later than t=0
        assert_relative_eq!(laser_field(2.0, &p), 0.4 * (2.0 * std::f64::consts::PI).cos());
    }

    #[test]
    fn field_integral_matches_antiderivative() {
        // int_0^T F0 cos(pi t) dt = F0/pi * sin(pi T)
        let p = PulseParams::canonical(0.4);
        let quad = adaptive_complex(|t| Complex::new(laser_field(t, &p), 0.0), 0.0, 4.0, 1e-14, 60)
            .unwrap();
        let analytic = 0.4 / std::f64::consts::PI * (std::f64::consts::PI * 4.0).sin();
        assert!((quad.re - analytic).abs() < 1e-12);
    }

    #[test]
    fn transition_frequency_values() {
        assert_eq!(transition_frequency(0.0).unwrap(), 0.5);
        assert_eq!(transition_frequency(1.0).unwrap(), 1.0);
        // at k0 the transition is resonant with the pi-frequency carrier
        let w = transition_frequency(crate::k0::<f64>()).unwrap();
        assert_relative_eq!(w, std::f64::consts::PI, max_relative = 1e-15);
        assert!(transition_frequency(-0.1).is_err());
    }

    #[test]
    fn pulse_params_validation() {
        assert!(PulseParams::new(-0.1, 1.0, 1.0, 0.0).is_err());
        assert!(PulseParams::new(0.1, 0.0, 1.0, 0.0).is_err());
        assert!(PulseParams::new(0.1, 1.0, -2.0, 0.0).is_err());
        let p = PulseParams::canonical(0.4f64);
        assert_eq!(p.omega, std::f64::consts::PI);
        assert_eq!(p.duration, 4.0);
        assert_eq!(p.alpha, 0.0);
    }

    #[test]
    fn polar_round_trip() {
        let p = MomentumPoint::new(0.3, -1.7);
        let q = MomentumPoint::from_polar(p.k(), p.phi());
        assert_relative_eq!(p.kx, q.kx, max_relative = 1e-15, epsilon = 1e-15);
        assert_relative_eq!(p.ky, q.ky, max_relative = 1e-15, epsilon = 1e-15);
        assert!(p.energy() >= 0.0);

        let r = PositionPoint::new(-2.0, 0.5);
        let s = PositionPoint::from_polar(r.r(), r.phi());
        assert_relative_eq!(r.x, s.x, max_relative = 1e-15, epsilon = 1e-15);
        assert_relative_eq!(r.y, s.y, max_relative = 1e-15, epsilon = 1e-15);
    }

    #[test]
    fn generic_scalar_smoke_f32() {
        let p = PulseParams::<f32>::canonical(0.4);
        assert!((laser_field(0.0f32, &p) - 0.4).abs() < 1e-6);
        let w = transition_frequency(1.0f32).unwrap();
        assert!((w - 1.0).abs() < 1e-6);
    }
}
