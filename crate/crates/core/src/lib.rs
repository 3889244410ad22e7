//! Numerical machinery for oscillatory Mellin kernels ("analytic trace
//! functions") and their interaction with modular-form Fourier coefficients.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: complex special functions, numerical differentiation and
//!   the two quadrature engines (a general adaptive rule used as a brute-force
//!   oracle, and an oscillation-aware panel integrator).
//! - [`oscillatory`]: the stationary-phase engine for windowed oscillatory
//!   Mellin transforms `W†(r,s) = ∫ W(x) e(-rx) x^{s-1} dx`, their asymptotic
//!   expansions and decay bounds.
//! - [`tracefn`]: trace-function families given by Mellin data
//!   `M_t(s) = g_t(s) e(f_t(s))`, contour evaluation of the kernels
//!   `K_t(x)`, the quantitative condition verifier, and the Fourier-transform
//!   stability map.
//! - [`modular`]: Hecke eigenvalue tables, Whittaker functions, Maass form
//!   evaluation and additive-twist baselines.
//! - [`sums`]: correlation sums `S(t)`, exponent scans, the exact delta-method
//!   identity and the Voronoi summation check.
//! - [`horocycle`]: twisted horocycle integrals over shrinking height.
//!
//! Phases are stored in cycles throughout: `e(x)` means `exp(2πi x)`.

pub mod error;
pub mod horocycle;
pub mod modular;
pub mod numerics;
pub mod oscillatory;
pub mod sums;
pub mod tracefn;

pub use error::{Error, Result};
pub use num_complex::Complex64;
