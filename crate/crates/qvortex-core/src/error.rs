//! Error type shared by the numeric modules.

use thiserror::Error;

/// Errors reported by wavefunction evaluation, quadrature and vortex search.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: requested {requested:e}, achieved {achieved:e}")]
    QuadratureNonConvergence { requested: f64, achieved: f64 },

    /// The self-consistency check (doubled nodes, extended cutoff) failed.
    #[error("quadrature cutoff not converged: relative change {rel_change:e} exceeds tol {tol:e}")]
    CutoffNonConvergence { rel_change: f64, tol: f64 },

    /// Velocity requested where the density is at or below the floor.
    #[error("singular node: density {rho:e} at or below floor {floor:e}")]
    SingularNode { rho: f64, floor: f64 },

    /// Newton refinement did not converge; carries the last iterate.
    #[error("zero refinement did not converge after {iterations} iterations (last iterate ({u}, {v}), residual {residual:e})")]
    NonConvergence {
        u: f64,
        v: f64,
        residual: f64,
        iterations: usize,
    },

    /// At `F0 = 0` the zero set is a whole nodal line, not isolated vortices.
    #[error("degenerate zero set: at F0 = 0 the zeros form the nodal line cos(phi_k) = 0")]
    DegenerateZeroSet,

    /// Newton landed on a nodal line: the phase carries no winding there.
    #[error("refined point ({u}, {v}) is not an isolated zero (winding 0)")]
    NonIsolatedZero { u: f64, v: f64 },

    /// Trajectory continuation jumped farther than the packet width.
    #[error("vortex track lost between t = {t_prev} and t = {t}: jump {jump:e} exceeds packet scale {scale:e}")]
    TrackLoss {
        t_prev: f64,
        t: f64,
        jump: f64,
        scale: f64,
    },
}

pub type Result<T> = std::result::Result<T, CoreError>;
