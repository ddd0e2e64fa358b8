//! Momentum-space photoelectron wavefunction.
//!
//! Three evaluation paths are provided:
//!
//! * [`psi_momentum_exact`] — the closed form for the canonical pulse
//!   (`omega = pi`, `T = 4`, `alpha = 0`), valid once the pulse is over.
//! * [`psi_momentum_near_center`] — its Gaussian-times-polynomial
//!   approximation around the vortex radius `k0`.
//! * [`psi_momentum_generic`] — the second-order perturbation-theory
//!   assembly for an arbitrary windowed-cosine pulse, built from the
//!   amplitudes [`amplitude_b1`] and [`amplitude_b2`] by time quadrature.
//!
//! The closed form carries removable 0/0 points on the rings
//! `(k^2+1)^2 = 4 pi^2` and `(k^2+1)^2 = 16 pi^2`: `sin(k^2+1)` vanishes on
//! both. Every term is therefore evaluated through `sin(x)/x`-style factors
//! (`sin(k^2+1) = sin(k^2+1 - 2 pi n)` exactly), which keeps the expression
//! and its analytic gradient finite on the rings without any interpolation.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::pulse::{laser_field, transition_frequency, MomentumPoint, PulseParams};
use crate::quadrature::{adaptive_complex, QuadratureSpec};
use crate::{k0_squared, Amplitude, Real};

/// Which momentum-space evaluation path to use.
///
/// `ExactClosedForm` and `NearCenterApprox` require the canonical pulse;
/// `GenericQuadrature` accepts any [`PulseParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumWavefunctionKind {
    ExactClosedForm,
    NearCenterApprox,
    GenericQuadrature,
}

/// First- and second-order perturbation amplitudes at a given `(k, t)`.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeSet<R> {
    /// First order, angular channel `m = 1`.
    pub b1_m1: Amplitude<R>,
    /// Second order, `m = 0`.
    pub b2_m0: Amplitude<R>,
    /// Second order, `m = 2`.
    pub b2_m2: Amplitude<R>,
}

/// `sin(x)/x`, stable at the origin.
fn sinc<R: Real>(x: R) -> R {
    if x.abs() < R::of(1e-4) {
        let x2 = x * x;
        R::one() - x2 / R::of(6.0) * (R::one() - x2 / R::of(20.0))
    } else {
        x.sin() / x
    }
}

/// d/dx [sin(x)/x] = (x cos x - sin x)/x^2, stable at the origin.
fn sinc_prime<R: Real>(x: R) -> R {
    if x.abs() < R::of(1e-4) {
        let x2 = x * x;
        -x / R::of(3.0) * (R::one() - x2 / R::of(10.0))
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// Radial factor pieces of the closed form at `s = k^2`, all regular.
///
/// `p1` multiplies `kx`, `p2` multiplies `i F0 kx^2`, `p3` multiplies
/// `i F0`; primes are derivatives with respect to `s`.
struct RadialFactors<R> {
    p1: R,
    p2: R,
    p3: R,
    p1_prime: R,
    p2_prime: R,
    p3_prime: R,
}

fn radial_factors<R: Real>(s: R) -> RadialFactors<R> {
    let pi = R::PI();
    let two_pi = pi + pi;
    let four_pi = two_pi + two_pi;
    let u = s + R::one();
    let u2 = u - two_pi; // vanishes on the 4 pi^2 ring (k = k0)
    let u4 = u - four_pi; // vanishes on the 16 pi^2 ring
    let g2 = (u + two_pi).recip();
    let g4 = (u + four_pi).recip();
    let w4 = sinc(u2) * g2; // sin(k^2+1) / ((k^2+1)^2 - 4 pi^2)
    let w16 = sinc(u4) * g4; // sin(k^2+1) / ((k^2+1)^2 - 16 pi^2)
    let w4_prime = sinc_prime(u2) * g2 - sinc(u2) * g2 * g2;
    let w16_prime = sinc_prime(u4) * g4 - sinc(u4) * g4 * g4;
    let d4 = u2 * (u + two_pi);
    let d16 = u4 * (u + four_pi);
    let n7 = R::of(7.0) * u * u - four_pi * pi; // 7(k^2+1)^2 - 4 pi^2
    let n7_prime = R::of(14.0) * u;
    // m = sin(k^2+1) / (D4 D16); take the branch whose denominator is away
    // from its zero
    let (m, m_prime) = if u2.abs() < u4.abs() {
        (
            w4 / d16,
            w4_prime / d16 - w4 * (u + u) / (d16 * d16),
        )
    } else {
        (
            w16 / d4,
            w16_prime / d4 - w16 * (u + u) / (d4 * d4),
        )
    };

    let u_15 = u.powf(R::of(1.5));
    let u_25 = u_15 * u;
    let u_35 = u_25 * u;
    let u_45 = u_35 * u;
    let two = R::of(2.0);

    let p1 = w4 / u_15;
    let p1_prime = w4_prime / u_15 - R::of(1.5) * w4 / u_25;
    let p2 = two * n7 * m / u_35;
    let p2_prime =
        two * (n7_prime * m + n7 * m_prime) / u_35 - R::of(7.0) * n7 * m / u_45;
    let p3 = -two * w16 / u_25;
    let p3_prime = -two * w16_prime / u_25 + R::of(5.0) * w16 / u_35;
    RadialFactors {
        p1,
        p2,
        p3,
        p1_prime,
        p2_prime,
        p3_prime,
    }
}

fn require_after_pulse<R: Real>(t: R) -> Result<()> {
    if t < R::of(4.0) {
        return Err(CoreError::Domain(format!(
            "closed forms hold for the established regime t >= T = 4, got t = {t}"
        )));
    }
    Ok(())
}

/// Closed-form wavefunction for the canonical pulse, normalization `A = 1`.
///
/// Valid for `t >= T = 4` (the established regime; `t = 4` is accepted as
/// the limiting case used by the reference values).
pub fn psi_momentum_exact<R: Real>(
    p: MomentumPoint<R>,
    t: R,
    f0: R,
) -> Result<Amplitude<R>> {
    require_after_pulse(t)?;
    let s = p.kx * p.kx + p.ky * p.ky;
    let f = radial_factors(s);
    let phase = Complex::from_polar(R::one(), s - s / R::of(2.0) * t);
    let bracket = Complex::new(p.kx * f.p1, f0 * (p.kx * p.kx * f.p2 + f.p3));
    Ok(phase * bracket)
}

/// Analytic Cartesian gradient `(d psi/d kx, d psi/d ky)` of the closed form.
pub fn psi_momentum_exact_gradient<R: Real>(
    p: MomentumPoint<R>,
    t: R,
    f0: R,
) -> Result<(Amplitude<R>, Amplitude<R>)> {
    require_after_pulse(t)?;
    let s = p.kx * p.kx + p.ky * p.ky;
    let f = radial_factors(s);
    let phi_prime = R::one() - t / R::of(2.0); // d/ds of (k^2 - E_k t)
    let phase = Complex::from_polar(R::one(), s * phi_prime);
    let bracket = Complex::new(p.kx * f.p1, f0 * (p.kx * p.kx * f.p2 + f.p3));
    // d bracket / ds
    let dbracket_ds = Complex::new(
        p.kx * f.p1_prime,
        f0 * (p.kx * p.kx * f.p2_prime + f.p3_prime),
    );
    // d bracket / d kx at fixed s
    let dbracket_dkx = Complex::new(f.p1, f0 * R::of(2.0) * p.kx * f.p2);
    let i_phi = Complex::new(R::zero(), phi_prime);
    let common = (bracket * i_phi + dbracket_ds) * R::of(2.0);
    let gx = phase * (common * p.kx + dbracket_dkx);
    let gy = phase * (common * p.ky);
    Ok((gx, gy))
}

/// Near-vortex approximation: Gaussian envelope times the second-degree
/// polynomial whose zeros are the vortex centers. Normalization `A = 1`.
pub fn psi_momentum_near_center<R: Real>(
    p: MomentumPoint<R>,
    t: R,
    f0: R,
) -> Result<Amplitude<R>> {
    require_after_pulse(t)?;
    let s = p.kx * p.kx + p.ky * p.ky;
    let ds = s - k0_squared::<R>();
    let envelope = (-ds / R::PI()).exp();
    let phase = Complex::from_polar(envelope, s - s / R::of(2.0) * t);
    let three_pi2 = R::of(3.0) * R::PI() * R::PI();
    let bracket = Complex::new(p.kx, f0 * ds / three_pi2);
    Ok(phase * bracket)
}

/// Analytic Cartesian gradient of the near-center form.
pub fn psi_momentum_near_center_gradient<R: Real>(
    p: MomentumPoint<R>,
    t: R,
    f0: R,
) -> Result<(Amplitude<R>, Amplitude<R>)> {
    require_after_pulse(t)?;
    let s = p.kx * p.kx + p.ky * p.ky;
    let ds = s - k0_squared::<R>();
    let envelope = (-ds / R::PI()).exp();
    let phase = Complex::from_polar(envelope, s - s / R::of(2.0) * t);
    let three_pi2 = R::of(3.0) * R::PI() * R::PI();
    let bracket = Complex::new(p.kx, f0 * ds / three_pi2);
    // d/ds of the log of the envelope-phase factor
    let log_factor = Complex::new(-R::PI().recip(), R::one() - t / R::of(2.0));
    let common = bracket * log_factor * R::of(2.0)
        + Complex::new(R::zero(), R::of(2.0) * f0 / three_pi2);
    let gx = phase * (common * p.kx + Complex::new(R::one(), R::zero()));
    let gy = phase * (common * p.ky);
    Ok((gx, gy))
}

fn require_amplitude_domain<R: Real>(k: R, t: R) -> Result<()> {
    if k < R::zero() {
        return Err(CoreError::Domain(format!("k must be >= 0, got {k}")));
    }
    if t < R::zero() {
        return Err(CoreError::Domain(format!("t must be >= 0, got {t}")));
    }
    Ok(())
}

/// First-order amplitude `b^(1)_{k,1,10}(t)` by adaptive time quadrature.
///
/// `q.tol` is used as the absolute tolerance of the time integral.
pub fn amplitude_b1<R: Real>(
    k: R,
    t: R,
    pulse: &PulseParams<R>,
    q: &QuadratureSpec<R>,
) -> Result<Amplitude<R>> {
    require_amplitude_domain(k, t)?;
    let upper = t.min(pulse.duration);
    if upper <= R::zero() || pulse.f0 == R::zero() {
        return Ok(Complex::new(R::zero(), R::zero()));
    }
    let w = transition_frequency(k)?;
    let integral = adaptive_complex(
        |s| Complex::from_polar(laser_field(s, pulse), w * s),
        R::zero(),
        upper,
        q.tol,
        48,
    )?;
    Ok(b1_prefactor(k) * integral)
}

/// `-3ik/(k^2+1)^{5/2}`.
fn b1_prefactor<R: Real>(k: R) -> Amplitude<R> {
    let u = k * k + R::one();
    Complex::new(R::zero(), -R::of(3.0) * k / u.powf(R::of(2.5)))
}

/// d/dk of the `b1` prefactor: `-3i(1 - 4k^2)/(k^2+1)^{7/2}`.
fn b1_prefactor_prime<R: Real>(k: R) -> Amplitude<R> {
    let u = k * k + R::one();
    Complex::new(
        R::zero(),
        -R::of(3.0) * (R::one() - R::of(4.0) * k * k) / u.powf(R::of(3.5)),
    )
}

/// Second-order amplitudes `(b^(2)_{k,0,10}, b^(2)_{k,2,10})`.
///
/// The operator `(d/dk - i k t' +- 1/k)` is applied to `b1(t')`
/// analytically: the `d/dk` splits into the prefactor derivative plus an
/// `i k t'` factor under the inner integral, so no numeric differencing in
/// `k` is involved.
pub fn amplitude_b2<R: Real>(
    k: R,
    t: R,
    pulse: &PulseParams<R>,
    q: &QuadratureSpec<R>,
) -> Result<(Amplitude<R>, Amplitude<R>)> {
    if k <= R::zero() {
        return Err(CoreError::Domain(format!(
            "b2 needs k > 0 (1/k terms), got {k}"
        )));
    }
    require_amplitude_domain(k, t)?;
    let upper = t.min(pulse.duration);
    let zero = Complex::new(R::zero(), R::zero());
    if upper <= R::zero() || pulse.f0 == R::zero() {
        return Ok((zero, zero));
    }
    let w = transition_frequency(k)?;
    let c = b1_prefactor(k);
    let c_prime = b1_prefactor_prime(k);
    let inner_tol = q.tol / R::of(50.0);

    // (d/dk - i k t' +- 1/k) b1(t') with b1(t') = C J(t'),
    // d b1/dk = C' J + C (ik) K, J = int F e^{iws}, K = int s F e^{iws}
    let operator_applied = |tp: R, sign: R| -> Result<Amplitude<R>> {
        let j = adaptive_complex(
            |s| Complex::from_polar(laser_field(s, pulse), w * s),
            R::zero(),
            tp,
            inner_tol,
            48,
        )?;
        let kk = adaptive_complex(
            |s| Complex::from_polar(laser_field(s, pulse) * s, w * s),
            R::zero(),
            tp,
            inner_tol,
            48,
        )?;
        let ik = Complex::new(R::zero(), k);
        let db1_dk = c_prime * j + c * ik * kk;
        let b1 = c * j;
        Ok(db1_dk - b1 * ik * tp + b1 * (sign / k))
    };

    let m0_integral = adaptive_complex(
        |tp| {
            operator_applied(tp, R::one()).unwrap_or(zero) * laser_field(tp, pulse)
        },
        R::zero(),
        upper,
        q.tol,
        40,
    )?;
    let m2_integral = adaptive_complex(
        |tp| {
            operator_applied(tp, -R::one()).unwrap_or(zero) * laser_field(tp, pulse)
        },
        R::zero(),
        upper,
        q.tol,
        40,
    )?;
    let b2_m0 = Complex::new(R::zero(), -R::one()) * m0_integral;
    let b2_m2 = Complex::new(R::zero(), R::of(0.5)) * m2_integral;
    Ok((b2_m0, b2_m2))
}

/// All perturbation amplitudes at `(k, t)`.
pub fn amplitude_set<R: Real>(
    k: R,
    t: R,
    pulse: &PulseParams<R>,
    q: &QuadratureSpec<R>,
) -> Result<AmplitudeSet<R>> {
    let b1_m1 = amplitude_b1(k, t, pulse, q)?;
    let (b2_m0, b2_m2) = amplitude_b2(k, t, pulse, q)?;
    Ok(AmplitudeSet {
        b1_m1,
        b2_m0,
        b2_m2,
    })
}

/// Generic wavefunction: the m = 1, 0, 2 channels assembled from the
/// quadrature amplitudes. Agrees with [`psi_momentum_exact`] up to one
/// global complex constant for the canonical pulse.
pub fn psi_momentum_generic<R: Real>(
    p: MomentumPoint<R>,
    t: R,
    pulse: &PulseParams<R>,
    q: &QuadratureSpec<R>,
) -> Result<Amplitude<R>> {
    let k = p.k();
    if k <= R::zero() {
        return Err(CoreError::Domain("generic path needs k > 0".into()));
    }
    let amps = amplitude_set(k, t, pulse, q)?;
    let phi = p.phi();
    let e = Complex::from_polar(R::one(), -p.energy() * t);
    let two_over_pi = (R::of(2.0) / R::PI()).sqrt();
    let inv_sqrt_2pi = (R::PI() + R::PI()).sqrt().recip();
    let m1 = Complex::new(R::zero(), -two_over_pi) * amps.b1_m1 * phi.cos();
    let m0 = amps.b2_m0 * inv_sqrt_2pi;
    let m2 = amps.b2_m2 * (-two_over_pi * (phi + phi).cos());
    Ok((m1 + m0 + m2) * e)
}
