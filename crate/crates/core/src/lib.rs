//! Spectral laboratory for the incompressible MHD system written with
//! differential forms on the periodic 3-torus.
//!
//! The velocity `u` is a 1-form constrained to `N(d*)`, the magnetic field `b`
//! a 2-form constrained to `R(d)`. Mild solutions are built by Picard iteration
//! of the Duhamel formulas
//!
//! ```text
//! u(t) = e^{-tS}u₀ + ∫₀ᵗ e^{-(t-s)S} ℙ(-u⌟du - d*b⌟b) ds
//! b(t) = e^{-tM}b₀ + ∫₀ᵗ e^{-(t-s)M} (-d(u⌟b)) ds
//! ```
//!
//! with `S = d*d` (Hodge–Stokes) and `M = dd*` (Hodge–Maxwell).
//!
//! Modules, bottom-up:
//! * [`lambda3`]: fiberwise exterior algebra of ℝ³;
//! * [`spectral`]: periodic grids, FFTs, `d`, `δ`, dealiased products, `L^q` norms;
//! * [`hodge`]: Hodge decomposition, `ℙ`, `ℚ` and the potential operators;
//! * [`propagators`]: heat semigroups, fractional powers, smoothing measurements;
//! * [`mild`]: critical norms, Duhamel bilinear operators, Picard solver;
//! * [`verify`]: presets, reference integrator and the experiment runner.

pub mod error;
pub mod hodge;
pub mod lambda3;
pub mod mild;
pub mod propagators;
pub mod spectral;
pub mod verify;

pub use error::{MhdError, Result};
pub use lambda3::{Grade, GradeMask, Multivector};
pub use spectral::{FormField, Grid, Representation};
