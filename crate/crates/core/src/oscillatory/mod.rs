//! Stationary-phase machinery for windowed oscillatory Mellin transforms.
//!
//! The central object is `W†(r,s) = ∫₀^∞ W(x) e(-rx) x^{s-1} dx` for a smooth
//! compactly supported window `W`. [`w_dagger`] evaluates it by quadrature,
//! [`w_dagger_asymptotic`] by the stationary-phase expansion whose
//! non-oscillatory part [`w_check`] collects the terms `p₀..p₅`, and
//! [`w_dagger_decay_bound`] provides the off-resonance truncation bound.

mod stationary;
mod wdagger;

pub use stationary::{stationary_expand, ExpansionResult};
pub use wdagger::{
    calibrate_constants, w_check, w_dagger, w_dagger_asymptotic, w_dagger_decay_bound, Calibration,
    DECAY_C, LEMMA2_C,
};

use crate::{Error, Result};

/// Smooth compactly supported test function with derivatives to order 6.
///
/// The profile is the standard bump `exp(-1/(1-u²))` mapped onto the support
/// interval; all derivatives vanish at the endpoints. Two normalizations are
/// offered: unit mass (`∫V = 1`) and unit peak.
#[derive(Debug, Clone)]
pub struct TestFunction {
    lo: f64,
    hi: f64,
    scale: f64,
}

/// Highest derivative order the evaluators support.
pub const TEST_FUNCTION_MAX_ORDER: usize = 6;

impl TestFunction {
    /// Bump with `∫ V = 1`.
    pub fn normalized_bump(lo: f64, hi: f64) -> TestFunction {
        let mut v = TestFunction::raw(lo, hi);
        let mass = v.mass();
        v.scale = 1.0 / mass;
        v
    }

    /// Bump with peak value 1 at the midpoint.
    pub fn peak_one_bump(lo: f64, hi: f64) -> TestFunction {
        let mut v = TestFunction::raw(lo, hi);
        v.scale = 1.0f64.exp();
        v
    }

    fn raw(lo: f64, hi: f64) -> TestFunction {
        assert!(
            lo < hi && lo.is_finite() && hi.is_finite(),
            "support must be a finite interval"
        );
        TestFunction { lo, hi, scale: 1.0 }
    }

    fn mass(&self) -> f64 {
        // ∫_{-1}^{1} exp(-1/(1-u²)) du, then rescale to the support width.
        let base = crate::numerics::integrate_adaptive(
            |u| num_complex::Complex64::new(bump_profile(u, 0), 0.0),
            -1.0,
            1.0,
            1e-13,
        )
        .expect("bump profile is smooth")
        .value
        .re;
        base * 0.5 * (self.hi - self.lo) * self.scale
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Value at `x`; zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        self.deriv(x, 0).expect("order 0 always available")
    }

    /// `k`-th derivative, `k ≤ 6`.
    pub fn deriv(&self, x: f64, k: usize) -> Result<f64> {
        if k > TEST_FUNCTION_MAX_ORDER {
            return Err(Error::DerivativeOrder {
                requested: k,
                declared: TEST_FUNCTION_MAX_ORDER,
            });
        }
        let m = 2.0 / (self.hi - self.lo);
        let u = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        Ok(self.scale * m.powi(k as i32) * bump_profile(u, k))
    }
}

/// `d^k/du^k exp(-1/(1-u²))` via the complete Bell polynomials in the
/// derivatives of `g(u) = -1/(1-u²)`, which have the partial-fraction form
/// `g^{(k)} = -(k!/2)[(1-u)^{-(k+1)} + (-1)^k (1+u)^{-(k+1)}]`.
fn bump_profile(u: f64, k: usize) -> f64 {
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let f = (-1.0 / (1.0 - u * u)).exp();
    if k == 0 {
        return f;
    }
    let mut g = [0.0f64; 7];
    let mut fact = 1.0;
    let mut pm = 1.0 / (1.0 - u);
    let mut pp = 1.0 / (1.0 + u);
    for (j, slot) in g.iter_mut().enumerate().take(7).skip(1) {
        fact *= j as f64;
        pm /= 1.0 - u;
        pp /= 1.0 + u;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *slot = -(fact / 2.0) * (pm + sign * pp);
    }
    let (g1, g2, g3, g4, g5, g6) = (g[1], g[2], g[3], g[4], g[5], g[6]);
    let bell = match k {
        1 => g1,
        2 => g2 + g1 * g1,
        3 => g3 + 3.0 * g1 * g2 + g1.powi(3),
        4 => g4 + 4.0 * g1 * g3 + 3.0 * g2 * g2 + 6.0 * g1 * g1 * g2 + g1.powi(4),
        5 => {
            g5 + 5.0 * g1 * g4
                + 10.0 * g2 * g3
                + 10.0 * g1 * g1 * g3
                + 15.0 * g1 * g2 * g2
                + 10.0 * g1.powi(3) * g2
                + g1.powi(5)
        }
        6 => {
            g6 + 6.0 * g1 * g5
                + 15.0 * g2 * g4
                + 15.0 * g1 * g1 * g4
                + 10.0 * g3 * g3
                + 60.0 * g1 * g2 * g3
                + 20.0 * g1.powi(3) * g3
                + 15.0 * g2.powi(3)
                + 45.0 * g1 * g1 * g2 * g2
                + 15.0 * g1.powi(4) * g2
                + g1.powi(6)
        }
        _ => unreachable!(),
    };
    f * bell
}

type OrderedEval = dyn Fn(f64, usize) -> f64 + Send + Sync;

/// Amplitude/phase pair `(w, h)` with declared derivative orders, the input
/// to [`stationary_expand`]. The phase `h` is in radians here, matching the
/// integrand `w(t) e^{i h(t)}`.
pub struct PhasePair {
    w: Box<OrderedEval>,
    h: Box<OrderedEval>,
    support: (f64, f64),
    w_orders: usize,
    h_orders: usize,
}

impl PhasePair {
    pub fn new(
        w: Box<OrderedEval>,
        h: Box<OrderedEval>,
        support: (f64, f64),
        w_orders: usize,
        h_orders: usize,
    ) -> Result<PhasePair> {
        if !(support.0 < support.1) || !support.0.is_finite() || !support.1.is_finite() {
            return Err(Error::Domain(format!(
                "support must be a finite positive-length interval, got {support:?}"
            )));
        }
        Ok(PhasePair {
            w,
            h,
            support,
            w_orders,
            h_orders,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn amplitude(&self, x: f64) -> f64 {
        (self.w)(x, 0)
    }

    pub fn amplitude_deriv(&self, x: f64, j: usize) -> Result<f64> {
        if j > self.w_orders {
            return Err(Error::DerivativeOrder {
                requested: j,
                declared: self.w_orders,
            });
        }
        Ok((self.w)(x, j))
    }

    pub fn phase(&self, x: f64) -> f64 {
        (self.h)(x, 0)
    }

    pub fn phase_deriv(&self, x: f64, j: usize) -> Result<f64> {
        if j > self.h_orders {
            return Err(Error::DerivativeOrder {
                requested: j,
                declared: self.h_orders,
            });
        }
        Ok((self.h)(x, j))
    }
}
