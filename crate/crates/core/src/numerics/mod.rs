//! Complex special-function primitives and the two quadrature engines.
//!
//! Conventions used by every caller:
//! - `e(x)` denotes `exp(2πi x)`; phases are stored **in cycles**, never in
//!   radians, so a phase difference of `1.0` is one full oscillation.
//! - Quadrature results carry a value, an error estimate from the embedded
//!   rule, and the number of integrand evaluations.

mod diff;
mod gamma;
mod oscquad;
mod quad;
mod stirling;

pub use diff::{finite_diff, finite_diff_real};
pub use gamma::log_gamma;
pub use oscquad::{integrate_oscillatory, integrate_oscillatory_opts, OscOptions};
pub use quad::{integrate_adaptive, integrate_adaptive_opts, QuadOptions, QuadratureResult};
pub use stirling::{stirling_split, StirlingSplit};

use crate::{Error, Result};
use num_complex::Complex64;

/// `e(x) = exp(2πi x)` with the argument reduced modulo one cycle first,
/// so large phases keep full relative accuracy.
#[inline]
pub fn e(cycles: f64) -> Complex64 {
    let reduced = cycles - cycles.round();
    let theta = std::f64::consts::TAU * reduced;
    Complex64::new(theta.cos(), theta.sin())
}

/// Checks both components are finite, surfacing NaN/∞ as an error instead of
/// letting it propagate.
#[inline]
pub fn ensure_finite(z: Complex64, context: &'static str, at: f64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite { context, at })
    }
}
