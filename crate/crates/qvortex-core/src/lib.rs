//! Analytic photoelectron wave packets of a 2-D hydrogen atom ionized by an
//! ultrashort laser pulse, and the quantum vortices they carry.
//!
//! The library evaluates the photoelectron wavefunction in momentum space
//! (second-order perturbation theory: an exact closed form for the canonical
//! pulse, a near-vortex Gaussian approximation, and a generic time-quadrature
//! assembly), the coordinate-space wave packet obtained from the near-center
//! form, and derived fields: probability density, symmetric flux, velocity
//! fields, phases. On top of those it locates wavefunction zeros, computes
//! topological charges, traces vortex trajectories in time and evaluates
//! momentum/coordinate moments by 2-D polar quadrature.
//!
//! All quantities are in atomic units. Core math is generic over the scalar
//! type through the [`Real`] trait; `f64` aliases are exported at the crate
//! root ([`Pulse64`], [`Grid64`], ...).

pub mod error;
pub mod field;
pub mod moments;
pub mod momentum;
pub mod position;
pub mod pulse;
pub mod quadrature;
pub mod vortex;

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub use error::CoreError;
pub use field::{ComplexField2d, FieldGrid, FieldQuantity, GridSpec, Payload, Space};
pub use moments::{MomentMethod, MomentReport};
pub use momentum::MomentumWavefunctionKind;
pub use pulse::{MomentumPoint, PositionPoint, PulseParams};
pub use quadrature::QuadratureSpec;
pub use vortex::{PositionCenterMode, VortexDescriptor, ZeroSeed};

/// Floating-point scalar the numerics are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for embedding an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

/// Complex amplitude of a wavefunction or perturbation amplitude.
pub type Amplitude<R> = Complex<R>;

/// Squared vortex-ring radius `k0^2 = 2*pi - 1` (a.u.).
pub fn k0_squared<R: Real>() -> R {
    R::PI() + R::PI() - R::one()
}

/// Vortex-ring radius `k0 = sqrt(2*pi - 1)` (a.u.), the momentum-space
/// distance of the two vortex centers from the origin.
pub fn k0<R: Real>() -> R {
    k0_squared::<R>().sqrt()
}

pub type Amp64 = Amplitude<f64>;
pub type Pulse64 = PulseParams<f64>;
pub type Grid64 = FieldGrid<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type Quad64 = QuadratureSpec<f64>;
pub type Vortex64 = VortexDescriptor<f64>;
