//! Λ-valued fields on the periodic grid and their Fourier calculus.
//!
//! Fourier convention: `f̂(k) = N⁻³ Σ_x f(x) e^{-ik·x}`, so `f(x) = Σ_k f̂(k) e^{ik·x}`
//! and `‖f‖²_{L²} = L³ Σ_k |f̂(k)|²`. Derivative symbols drop the Nyquist
//! component, and nonlinear products use the 2/3 truncation rule.

mod field;
mod grid;
mod random;
pub mod snapshot;

pub use field::{
    fft_forward, fft_inverse, interior_product, pointwise_product, FormField, ProductKind,
    Representation,
};
pub(crate) use field::ik;
pub use grid::Grid;
pub use random::random_bandlimited;
