//! Numeric substrate: grids, sampled functions, quadrature, interpolation,
//! finite differences, ODE integration, and root localization.

mod fd;
mod grid;
mod interp;
mod ode;
mod quad;
mod roots;

pub use fd::{derivative, DerivativeOrder};
pub use grid::{Grid, SampledFunction};
pub use interp::{invert_monotone, MonotoneCubic, Spline};
pub use ode::{
    integrate_general_ode, integrate_general_ode_anchored, integrate_schrodinger,
    integrate_schrodinger_anchored, NumerovRun,
};
pub use quad::{cumulative_integral, integrate, DEFAULT_TOL};
pub use roots::{find_sign_changes, SignChange};
