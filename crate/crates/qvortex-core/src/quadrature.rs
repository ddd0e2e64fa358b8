//! 1-D and 2-D polar quadrature: Gauss–Legendre radial rules, a uniform
//! angular trapezoid (exact for the trigonometric polynomials appearing
//! here), and an adaptive Gauss–Kronrod rule for complex-valued time
//! integrals.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::Real;

/// Node counts, radial cutoff and target tolerance for 2-D polar integrals.
///
/// A result is only accepted once the values for `(n_radial, r_max)` and
/// `(2 n_radial, 1.5 r_max)` agree within `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<R> {
    pub n_radial: usize,
    pub n_angular: usize,
    /// Radial cutoff (a.u.).
    pub r_max: R,
    /// Target relative error.
    pub tol: R,
}

impl<R: Real> QuadratureSpec<R> {
    // negated comparisons so NaN parameters fail validation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(n_radial: usize, n_angular: usize, r_max: R, tol: R) -> Result<Self> {
        if n_radial == 0 || n_angular == 0 {
            return Err(CoreError::Domain("node counts must be positive".into()));
        }
        if !(r_max > R::zero()) || !(tol > R::zero()) {
            return Err(CoreError::Domain("r_max and tol must be positive".into()));
        }
        Ok(Self {
            n_radial,
            n_angular,
            r_max,
            tol,
        })
    }

    /// Default for momentum-space integrals: the Gaussian decay of the
    /// near-center form makes the tail beyond `k0 + 8` smaller than 1e-14.
    pub fn default_momentum() -> Self {
        Self {
            n_radial: 1500,
            n_angular: 32,
            r_max: crate::k0::<R>() + R::of(8.0),
            tol: R::of(1e-9),
        }
    }

    /// Default for coordinate-space integrals at time `t`: cutoff at six
    /// packet widths.
    pub fn default_position(t: R) -> Self {
        let a2 = crate::position::packet_width(t).a2;
        Self {
            n_radial: 800,
            n_angular: 32,
            r_max: R::of(6.0) * a2.sqrt(),
            tol: R::of(1e-9),
        }
    }

    /// The comparison spec used by the self-consistency acceptance rule.
    pub fn refined(&self) -> Self {
        Self {
            n_radial: 2 * self.n_radial,
            n_angular: self.n_angular,
            r_max: self.r_max * R::of(1.5),
            tol: self.tol,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are found by Newton iteration from the Chebyshev initial guess.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = R::of((i as f64 + 0.75) / (n as f64 + 0.5) * std::f64::consts::PI).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let step = p / dp;
            z -= step;
            if step.abs() < R::of(1e-16) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let w = R::of(2.0) / ((R::one() - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on<R: Real>(a: R, b: R, n: usize) -> (Vec<R>, Vec<R>) {
    let (x, w) = gauss_legendre::<R>(n);
    let half = (b - a) / R::of(2.0);
    let mid = (a + b) / R::of(2.0);
    (
        x.iter().map(|&xi| mid + half * xi).collect(),
        w.iter().map(|&wi| wi * half).collect(),
    )
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    if n == 0 {
        return (R::one(), R::zero());
    }
    let mut p_prev = R::one();
    let mut p = x;
    for k in 2..=n {
        let kf = R::of(k as f64);
        let next = ((R::of(2.0 * k as f64 - 1.0)) * x * p - (kf - R::one()) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let dp = R::of(n as f64) * (x * p - p_prev) / (x * x - R::one());
    (p, dp)
}

/// Uniform angular nodes `phi_j = 2 pi j / n` with the constant trapezoid
/// weight `2 pi / n`; exact for trigonometric polynomials of degree `< n`.
pub fn angular_trapezoid<R: Real>(n: usize) -> (Vec<R>, R) {
    let two_pi = R::PI() + R::PI();
    let w = two_pi / R::of(n as f64);
    ((0..n).map(|j| w * R::of(j as f64)).collect(), w)
}

/// Integrates `N` simultaneous integrands over the polar disk
/// `r <= spec.r_max` with measure `r dr dphi`. Summation order is fixed, so
/// results are bit-reproducible.
pub fn integrate_polar<R: Real, const N: usize>(
    spec: &QuadratureSpec<R>,
    f: impl Fn(R, R) -> [R; N],
) -> [R; N] {
    let (rs, rw) = gauss_legendre_on(R::zero(), spec.r_max, spec.n_radial);
    let (phis, pw) = angular_trapezoid::<R>(spec.n_angular);
    let mut acc = [R::zero(); N];
    for (r, wr) in rs.iter().zip(rw.iter()) {
        let meas_r = *wr * *r;
        let mut row = [R::zero(); N];
        for phi in &phis {
            let vals = f(*r, *phi);
            for (a, v) in row.iter_mut().zip(vals.iter()) {
                *a += *v;
            }
        }
        for (a, v) in acc.iter_mut().zip(row.iter()) {
            *a += meas_r * pw * *v;
        }
    }
    acc
}

// 15-point Kronrod extension of the 7-point Gauss rule (positive half).
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One G7/K15 panel: returns (K15 value, |K15 - G7|).
fn gk15_panel<R: Real>(
    f: &impl Fn(R) -> Complex<R>,
    a: R,
    b: R,
) -> (Complex<R>, R) {
    let half = (b - a) / R::of(2.0);
    let mid = (a + b) / R::of(2.0);
    let mut kronrod = Complex::new(R::zero(), R::zero());
    let mut gauss = Complex::new(R::zero(), R::zero());
    for (i, (&x, &wk)) in KRONROD_NODES.iter().zip(KRONROD_WEIGHTS.iter()).enumerate() {
        let xr = R::of(x);
        let wkr = R::of(wk);
        let (fp, fm) = if x == 0.0 {
            let v = f(mid);
            (v, Complex::new(R::zero(), R::zero()))
        } else {
            (f(mid + half * xr), f(mid - half * xr))
        };
        let pair = fp + fm;
        kronrod += pair * wkr;
        // odd Kronrod indices are the embedded Gauss nodes
        if i % 2 == 1 {
            gauss += pair * R::of(GAUSS_WEIGHTS[i / 2]);
        } else if x == 0.0 {
            // centre belongs to Kronrod only
        }
    }
    let value = kronrod * half;
    let err = (kronrod - gauss).norm() * half.abs();
    (value, err)
}

/// Adaptive Gauss–Kronrod integration of a complex-valued function over
/// `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_complex<R: Real>(
    f: impl Fn(R) -> Complex<R>,
    a: R,
    b: R,
    tol: R,
    max_depth: usize,
) -> Result<Complex<R>> {
    if a == b {
        return Ok(Complex::new(R::zero(), R::zero()));
    }
    let mut total = Complex::new(R::zero(), R::zero());
    let mut achieved = R::zero();
    // explicit stack of (a, b, tol, depth); processed in deterministic order
    let mut stack = vec![(a, b, tol, 0usize)];
    let mut failed = false;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (value, err) = gk15_panel(&f, lo, hi);
        if err <= t || depth >= max_depth {
            total += value;
            achieved += err;
            if err > t {
                failed = true;
            }
        } else {
            let mid = (lo + hi) / R::of(2.0);
            let ht = t / R::of(2.0);
            stack.push((mid, hi, ht, depth + 1));
            stack.push((lo, mid, ht, depth + 1));
        }
    }
    if failed {
        return Err(CoreError::QuadratureNonConvergence {
            requested: tol.to_f64().unwrap_or(f64::NAN),
            achieved: achieved.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        // degree 2n-1 = 9 for n = 5: integrate x^8 over [-1,1] = 2/9
        let (x, w) = gauss_legendre::<f64>(5);
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert_relative_eq!(s, 2.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_on_interval() {
        // int_0^2 x^3 dx = 4
        let (x, w) = gauss_legendre_on(0.0f64, 2.0, 6);
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(3)).sum();
        assert_relative_eq!(s, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn angular_trapezoid_orthogonality() {
        // int_0^2pi cos(phi) cos(n phi) dphi and the sin variant vanish for
        // n = 0, 2, 4 (the harmonics present in the wavefunction)
        let (phis, w) = angular_trapezoid::<f64>(32);
        for n in [0usize, 2, 4] {
            let c: f64 = phis.iter().map(|p| p.cos() * (n as f64 * p).cos()).sum::<f64>() * w;
            let s: f64 = phis.iter().map(|p| p.sin() * (n as f64 * p).cos()).sum::<f64>() * w;
            assert!(c.abs() < 1e-13, "cos orthogonality failed for n={n}: {c}");
            assert!(s.abs() < 1e-13, "sin orthogonality failed for n={n}: {s}");
        }
        // sanity: n = 1 does not vanish
        let c1: f64 = phis.iter().map(|p| p.cos() * p.cos()).sum::<f64>() * w;
        assert_relative_eq!(c1, PI, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_handles_oscillatory_exponential() {
        // int_0^4 e^{i w t} dt = (e^{4iw} - 1)/(iw)
        let w = 17.3;
        let got = adaptive_complex(
            |t: f64| Complex::new(0.0, w * t).exp(),
            0.0,
            4.0,
            1e-12,
            50,
        )
        .unwrap();
        let expect = (Complex::new(0.0, 4.0 * w).exp() - 1.0) / Complex::new(0.0, w);
        assert!((got - expect).norm() < 1e-11);
    }

    #[test]
    fn adaptive_reports_nonconvergence() {
        // 1/sqrt(|x|) near 0 with an absurd tolerance and tiny depth
        let r = adaptive_complex(
            |t: f64| Complex::new(1.0 / t.abs().sqrt().max(1e-300), 0.0),
            0.0,
            1.0,
            1e-30,
            3,
        );
        assert!(matches!(
            r,
            Err(CoreError::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn polar_integrates_gaussian() {
        // int e^{-r^2} d^2r = pi
        let spec = QuadratureSpec::new(200, 16, 10.0f64, 1e-12).unwrap();
        let [v] = integrate_polar(&spec, |r, _| [(-r * r).exp()]);
        assert_relative_eq!(v, PI, max_relative = 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0, 8, 1.0f64, 1e-6).is_err());
        assert!(QuadratureSpec::new(8, 8, -1.0f64, 1e-6).is_err());
        let s = QuadratureSpec::new(8, 8, 1.0f64, 1e-6).unwrap().refined();
        assert_eq!(s.n_radial, 16);
        assert_relative_eq!(s.r_max, 1.5);
    }
}
