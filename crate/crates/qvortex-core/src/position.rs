//! Coordinate-space wave packet obtained from the near-center momentum
//! wavefunction: a spreading Gaussian envelope times a second-degree
//! polynomial that carries the vortex pair.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::pulse::PositionPoint;
use crate::{k0_squared, Amplitude, Real};

/// Packet spreading law: `tau = t - 2` and `a^2(tau) = (4 + pi^2 tau^2)/pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketWidth<R> {
    pub tau: R,
    pub a2: R,
}

/// Width of the packet at time `t`; minimum `4/pi` at `t = 2`.
pub fn packet_width<R: Real>(t: R) -> PacketWidth<R> {
    let pi = R::PI();
    let tau = t - R::of(2.0);
    PacketWidth {
        tau,
        a2: (R::of(4.0) + pi * pi * tau * tau) / pi,
    }
}

/// Polynomial bracket of the packet: real part `P`, imaginary part `Q`,
/// and their Cartesian derivatives. `P = Q = 0` is the vortex-center
/// condition.
struct Bracket<R> {
    p: R,
    q: R,
    dp_dx: R,
    dp_dy: R,
    dq_dx: R,
}

fn bracket<R: Real>(x: R, y: R, tau: R, f0: R) -> Bracket<R> {
    let pi = R::PI();
    let pi2 = pi * pi;
    let pi3 = pi2 * pi;
    let r2 = x * x + y * y;
    let k0sq = k0_squared::<R>();
    let p = f0 * (R::of(4.0) * (pi - R::one()) + pi2 * (r2 - k0sq * tau * tau))
        - R::of(6.0) * pi3 * x;
    let q = pi * tau * (R::of(2.0) * f0 * (R::of(3.0) * pi - R::of(2.0)) - R::of(3.0) * pi3 * x);
    Bracket {
        p,
        q,
        dp_dx: R::of(2.0) * pi2 * f0 * x - R::of(6.0) * pi3,
        dp_dy: R::of(2.0) * pi2 * f0 * y,
        dq_dx: -R::of(3.0) * pi3 * pi * tau,
    }
}

fn require_after_pulse<R: Real>(t: R) -> Result<()> {
    if t < R::of(4.0) {
        return Err(CoreError::Domain(format!(
            "the coordinate-space packet holds for t >= T = 4, got t = {t}"
        )));
    }
    Ok(())
}

/// Coordinate-space wavefunction, normalization constant 1.
pub fn psi_position<R: Real>(p: PositionPoint<R>, t: R, f0: R) -> Result<Amplitude<R>> {
    require_after_pulse(t)?;
    let (ln_mod, phase) = psi_position_log_modulus_phase(p, t, f0)?;
    Ok(Complex::from_polar(ln_mod.exp(), phase))
}

/// `(ln |psi|, arg psi)` computed without forming the Gaussian directly, so
/// log-density maps stay accurate far outside the packet where `|psi|`
/// underflows.
pub fn psi_position_log_modulus_phase<R: Real>(
    p: PositionPoint<R>,
    t: R,
    f0: R,
) -> Result<(R, R)> {
    require_after_pulse(t)?;
    let pw = packet_width(t);
    let r2 = p.x * p.x + p.y * p.y;
    let b = bracket(p.x, p.y, pw.tau, f0);
    let ln_mod = -R::of(1.5) * pw.a2.ln() - r2 / pw.a2
        + R::of(0.5) * (b.p * b.p + b.q * b.q).ln();
    let phase = R::PI() * pw.tau * r2 / (R::of(2.0) * pw.a2) + b.q.atan2(b.p);
    Ok((ln_mod, phase))
}

/// Analytic Cartesian gradient `(d psi/dx, d psi/dy)`.
pub fn psi_position_gradient<R: Real>(
    p: PositionPoint<R>,
    t: R,
    f0: R,
) -> Result<(Amplitude<R>, Amplitude<R>)> {
    require_after_pulse(t)?;
    let pw = packet_width(t);
    let r2 = p.x * p.x + p.y * p.y;
    let b = bracket(p.x, p.y, pw.tau, f0);
    // log-derivative of the Gaussian-phase factor
    let c = Complex::new(-pw.a2.recip(), R::PI() * pw.tau / (R::of(2.0) * pw.a2));
    let prefactor = Complex::from_polar(
        (-r2 / pw.a2).exp() / pw.a2.powf(R::of(1.5)),
        R::PI() * pw.tau * r2 / (R::of(2.0) * pw.a2),
    );
    let brk = Complex::new(b.p, b.q);
    let two = R::of(2.0);
    let gx = prefactor * (c * brk * (two * p.x) + Complex::new(b.dp_dx, b.dq_dx));
    let gy = prefactor * (c * brk * (two * p.y) + Complex::new(b.dp_dy, R::zero()));
    Ok((gx, gy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn packet_width_values() {
        let w = packet_width(2.0f64);
        assert_eq!(w.tau, 0.0);
        assert_relative_eq!(w.a2, 4.0 / PI, max_relative = 1e-15);
        let w = packet_width(5.0f64);
        assert_eq!(w.tau, 3.0);
        assert_relative_eq!(w.a2, 29.547573427043304, max_relative = 1e-13);
    }

    #[test]
    fn spreading_approaches_sum_of_variances() {
        // a^2(tau) vs pi tau^2 within 5% from tau = 3 on
        for tau in [3.0f64, 5.0, 8.0] {
            let a2 = packet_width(tau + 2.0).a2;
            let rel = (a2 - PI * tau * tau).abs() / a2;
            assert!(rel < 0.05, "tau = {tau}: rel = {rel}");
        }
        assert_relative_eq!(
            (packet_width(5.0f64).a2 - 9.0 * PI).abs() / packet_width(5.0f64).a2,
            0.043091171188,
            max_relative = 1e-6
        );
    }

    #[test]
    fn vanishes_at_the_paper_vortex_center() {
        // modulus at the rounded paper center is far below the packet scale
        let v = psi_position(PositionPoint::new(0.064, 7.05), 5.0, 0.4).unwrap();
        let scale = psi_position(PositionPoint::new(1.0, 6.0), 5.0, 0.4)
            .unwrap()
            .norm();
        assert!(v.norm() < 1e-3 * scale, "{} vs scale {}", v.norm(), scale);
    }

    #[test]
    fn regression_anchor() {
        let v = psi_position(PositionPoint::new(1.0, 6.0), 5.0, 0.4).unwrap();
        assert_relative_eq!(v.re, -0.9151997759449146, max_relative = 1e-12);
        assert_relative_eq!(v.im, -1.2064257313967774, max_relative = 1e-12);
    }

    #[test]
    fn rejects_pre_pulse_times() {
        assert!(psi_position(PositionPoint::new(0.0, 0.0), 3.0, 0.4).is_err());
    }

    #[test]
    fn log_path_survives_far_field() {
        // direct evaluation underflows to zero there
        let p = PositionPoint::new(0.0f64, 200.0);
        let (ln_mod, phase) = psi_position_log_modulus_phase(p, 5.0, 0.4).unwrap();
        assert!(ln_mod.is_finite() && ln_mod < -1000.0);
        assert!(phase.is_finite());
        assert_eq!(psi_position(p, 5.0, 0.4).unwrap().norm(), 0.0);
    }

    #[test]
    fn log_path_matches_direct_inside_packet() {
        let p = PositionPoint::new(-1.3f64, 5.2);
        let v = psi_position(p, 5.0, 0.4).unwrap();
        let (ln_mod, phase) = psi_position_log_modulus_phase(p, 5.0, 0.4).unwrap();
        assert_relative_eq!(v.norm().ln(), ln_mod, max_relative = 1e-12);
        let d = (v.arg() - phase).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < 1e-12);
    }

    #[test]
    fn line_cut_dips_at_the_vortex_center() {
        // |psi(x, y0)| over x has a single minimum at x0
        let x0 = 0.4 * (6.0 * PI - 4.0) / (3.0 * PI.powi(3));
        let y0 = (crate::k0_squared::<f64>() * 9.0 + (8.0 * PI - 4.0) / (PI * PI) - x0 * x0).sqrt();
        let n = 400;
        let xs: Vec<f64> = (0..n).map(|i| x0 - 2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let cut: Vec<f64> = xs
            .iter()
            .map(|&x| psi_position(PositionPoint::new(x, y0), 5.0, 0.4).unwrap().norm())
            .collect();
        let argmin = cut
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((xs[argmin] - x0).abs() < 4.0 / (n - 1) as f64);
        let minima = (1..n - 1)
            .filter(|&i| cut[i] < cut[i - 1] && cut[i] < cut[i + 1])
            .count();
        assert_eq!(minima, 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn modulus_symmetric_under_y_reflection(x in -10.0f64..10.0, y in 0.01f64..15.0,
                                                t in 4.0f64..12.0, f0 in 0.0f64..4.0) {
            let up = psi_position(PositionPoint::new(x, y), t, f0).unwrap();
            let down = psi_position(PositionPoint::new(x, -y), t, f0).unwrap();
            prop_assert_eq!(up, down);
        }

        #[test]
        fn width_grows_with_tau(t1 in 2.0f64..20.0, dt in 0.001f64..5.0) {
            let w1 = packet_width(t1);
            let w2 = packet_width(t1 + dt);
            prop_assert!(w2.a2 > w1.a2);
            prop_assert!(w1.a2 >= 4.0 / PI - 1e-15);
        }
    }
}
