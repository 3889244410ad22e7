//! Trace-function families defined by Mellin data `M_t(s) = g_t(s) e(f_t(s))`
//! on a vertical strip, their contour evaluation `K_t(x) = (1/2πi)∫ M_t(s)
//! x^{-s} ds`, and the quantitative verifier for the defining conditions.
//!
//! A family carries its amplitude `g` (complex, slowly varying), its phase
//! `f` in cycles with ν-derivatives to order 4, localization constants
//! `c₁ < c₂` (the ν-window `c₁t ≤ |ν| ≤ c₂t` where the phase can be
//! stationary against `x ∈ [t, 2t]`), and the singular lines of the
//! phase split.

mod eval;
mod families;
mod fourier;
mod verify;

pub use eval::{
    bessel_j_imag_order, bessel_reference, eval_trace, eval_trace_with_plan, mellin_transform,
};
pub use families::{
    conjugate_family, make_bessel_family, make_exponential_family, make_highrank_family,
    scale_family, transform_family,
};
pub use fourier::{fourier_transform_trace, tilde_trace};
pub use verify::{verify_conditions, ConditionReport, ConditionRow, ConditionThresholds};

use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

type AmpFn = dyn Fn(f64, f64, f64) -> Complex64 + Send + Sync;
type PhaseFn = dyn Fn(f64, f64, f64, usize) -> f64 + Send + Sync;
type SingularFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// Mellin data defining one family `K_t`.
///
/// `g(σ, ν, t)` is the complex amplitude and `f(σ, ν, t, j)` the j-th
/// ν-derivative of the real phase in cycles, so that
/// `M_t(σ+iν) = g·e(f)`. The retained spectral support lies on one side of
/// ν = 0 (`side = ±1`).
#[derive(Clone)]
pub struct TraceFamilySpec {
    pub label: String,
    /// Analyticity strip `a < Re s < b`.
    pub strip: (f64, f64),
    /// Default contour abscissa.
    pub sigma_default: f64,
    /// Localization constants: stationary phase against `x ∈ [t,2t]` only
    /// occurs for `c₁ t ≤ |ν| ≤ c₂ t`.
    pub c1: f64,
    pub c2: f64,
    /// Which sign of ν carries the retained window.
    pub side: f64,
    /// Lower bracket `|ν|/t` for phase-derivative bisections, strictly above
    /// any singular line on the retained side.
    pub phase_bracket_lo: f64,
    /// Half-width (in units of t) of the degradation band around each
    /// singular line, inside which the amplitude/phase split loses its
    /// derivative scaling and the verifier grid is deflated.
    pub singular_halfwidth: f64,
    g: Arc<AmpFn>,
    f: Arc<PhaseFn>,
    singular: Arc<SingularFn>,
}

impl TraceFamilySpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        strip: (f64, f64),
        sigma_default: f64,
        c1: f64,
        c2: f64,
        side: f64,
        phase_bracket_lo: f64,
        g: Arc<AmpFn>,
        f: Arc<PhaseFn>,
        singular: Arc<SingularFn>,
    ) -> Result<Self> {
        if !(strip.0 < strip.1) || !(strip.1 > 0.0) {
            return Err(Error::Domain(format!(
                "strip must satisfy a < b, b > 0; got {strip:?}"
            )));
        }
        if !(c1 > 0.0 && c2 > c1) {
            return Err(Error::Domain(format!(
                "localization constants need 0 < c1 < c2, got ({c1}, {c2})"
            )));
        }
        if !(sigma_default > strip.0 && sigma_default < strip.1) {
            return Err(Error::Domain(format!(
                "σ default {sigma_default} outside strip {strip:?}"
            )));
        }
        Ok(TraceFamilySpec {
            label: label.into(),
            strip,
            sigma_default,
            c1,
            c2,
            side: side.signum(),
            phase_bracket_lo,
            singular_halfwidth: 0.15,
            g,
            f,
            singular,
        })
    }

    /// Complex amplitude `g_t(σ + iν)`.
    pub fn amplitude(&self, sigma: f64, nu: f64, t: f64) -> Complex64 {
        (self.g)(sigma, nu, t)
    }

    /// Phase `f_t(σ + iν)` in cycles (`order` = 0) or its ν-derivatives.
    pub fn phase(&self, sigma: f64, nu: f64, t: f64, order: usize) -> f64 {
        (self.f)(sigma, nu, t, order)
    }

    /// ν-locations where the phase split is singular at this `t`.
    pub fn singular_nu(&self, t: f64) -> Vec<f64> {
        (self.singular)(t)
    }

    /// Swaps the amplitude evaluator in place (used by scaling and
    /// conjugation experiments).
    pub fn replace_amplitude(&mut self, g: Arc<AmpFn>) {
        self.g = g;
    }

    /// Swaps the phase evaluator in place.
    pub fn replace_phase(&mut self, f: Arc<PhaseFn>) {
        self.f = f;
    }

    /// Signed ν of the stationary point of `f(ν) - ν log(x)/2π` on the
    /// retained side, by bisection of the closed-form `f'`.
    pub fn stationary_nu(&self, t: f64, x: f64) -> Result<f64> {
        let target = x.ln() / std::f64::consts::TAU;
        let flo = self.phase_bracket_lo * t;
        let fhi = (4.0 * self.c2 + 30.0) * t;
        let fp = |mag: f64| self.phase(self.sigma_default, self.side * mag, t, 1) - target;
        let (mut lo, mut hi) = (flo, fhi);
        let (vlo, vhi) = (fp(lo), fp(hi));
        if !vlo.is_finite() || !vhi.is_finite() || vlo * vhi > 0.0 {
            return Err(Error::NoStationaryPoint);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (hi - lo) <= 1e-13 * mid {
                break;
            }
            let v = fp(mid);
            if v == 0.0 {
                return Ok(self.side * mid);
            }
            if v * vlo < 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(self.side * 0.5 * (lo + hi))
    }

    /// Phase of `K_t(x)` in cycles (the stationary value of
    /// `f(ν) - ν log(x)/2π`); used as a paneling hint by outer integrals.
    pub fn kernel_phase(&self, t: f64, x: f64) -> Result<f64> {
        let nu = self.stationary_nu(t, x)?;
        Ok(self.phase(self.sigma_default, nu, t, 0) - nu * x.ln() / std::f64::consts::TAU)
    }
}

/// One retained ν-interval with smooth tapers of the given widths.
#[derive(Debug, Clone, Copy)]
pub struct PlanWindow {
    pub lo: f64,
    pub hi: f64,
    pub taper_lo: f64,
    pub taper_hi: f64,
}

impl PlanWindow {
    /// C∞ window: 1 on the core, smoothstep tapers at both ends.
    pub fn weight(&self, nu: f64) -> f64 {
        if nu <= self.lo || nu >= self.hi {
            return 0.0;
        }
        let up = smoothstep((nu - self.lo) / self.taper_lo);
        let down = smoothstep((self.hi - nu) / self.taper_hi);
        up * down
    }
}

fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// Contour plan: abscissa and retained ν-windows for evaluating `K_t(x)`
/// over a range of x.
#[derive(Debug, Clone)]
pub struct ContourPlan {
    pub sigma: f64,
    pub windows: Vec<PlanWindow>,
}

/// Phase-slope threshold (radians) beyond which the integrand is treated as
/// non-resonant, and taper length in oscillation cycles.
const PLAN_DELTA: f64 = 0.05;
const PLAN_TAPER_CYCLES: f64 = 45.0;
/// Relative amplitude floor for window truncation.
const PLAN_AMP_FLOOR: f64 = 1e-12;
/// Exponent of the central window `[-t^ε, t^ε]`.
pub const CENTRAL_EPS: f64 = 0.1;

impl ContourPlan {
    /// Builds the retained windows for `x ∈ [x_lo, x_hi]`:
    /// the stationary region of `f(ν) - ν log x / 2π` extended on the far
    /// side until the phase slope clears `PLAN_DELTA` radians plus
    /// `PLAN_TAPER_CYCLES` of taper, truncated on the near side where the
    /// amplitude falls below `PLAN_AMP_FLOOR` of its peak, plus the central
    /// window `[-t^ε, t^ε]`.
    pub fn build(
        spec: &TraceFamilySpec,
        t: f64,
        x_lo: f64,
        x_hi: f64,
        sigma: f64,
    ) -> Result<ContourPlan> {
        assert!(x_lo <= x_hi && x_lo > 0.0);
        let side = spec.side;
        let nu_star_far = spec.stationary_nu(t, x_hi)?.abs();
        let nu_star_near = spec.stationary_nu(t, x_lo)?.abs();

        // Far (large |ν|) edge: phase slope against log(x_hi).
        let target_far = x_hi.ln();
        let slope = |mag: f64| -> f64 {
            std::f64::consts::TAU * spec.phase(sigma, side * mag, t, 1) - target_far
        };
        let mut lo = nu_star_far;
        let mut hi = (4.0 * spec.c2 + 30.0) * t;
        if slope(hi) < PLAN_DELTA {
            return Err(Error::Domain(format!(
                "phase slope never clears the plan threshold for {}",
                spec.label
            )));
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if (hi - lo) <= 1e-10 * mid {
                break;
            }
            if slope(mid) >= PLAN_DELTA {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let slope_core = 0.5 * (lo + hi);

        // The window core must also cover everything the amplitude keeps
        // alive beyond the slope point (a compactly supported amplitude may
        // extend past it, and the taper must not bite into it).
        let far_limit = (4.0 * spec.c2 + 30.0) * t;
        let peak_far = spec.amplitude(sigma, side * nu_star_far, t).norm();
        let mut far_amp = nu_star_far;
        let mut far_amp_dead = false;
        let steps = 400;
        for i in 0..=steps {
            let mag = nu_star_far * (far_limit / nu_star_far).powf(i as f64 / steps as f64);
            far_amp = mag;
            if spec.amplitude(sigma, side * mag, t).norm() < peak_far * PLAN_AMP_FLOOR {
                far_amp_dead = true;
                break;
            }
        }
        let far_core = slope_core.max(if far_amp_dead { far_amp } else { 0.0 });
        // Taper: if the amplitude already died, a short taper in the dead
        // zone suffices; otherwise extend until the residual phase has
        // accumulated PLAN_TAPER_CYCLES.
        let far_taper = if far_amp_dead && far_amp >= slope_core {
            (0.02 * far_core).max(8.0)
        } else {
            let phi = |mag: f64| -> f64 {
                spec.phase(sigma, side * mag, t, 0)
                    - side * mag * target_far / std::f64::consts::TAU
            };
            let phi0 = phi(far_core);
            let mut lo = far_core;
            let mut hi = far_limit + PLAN_TAPER_CYCLES * std::f64::consts::TAU / PLAN_DELTA;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= 1e-8 * mid {
                    break;
                }
                if (phi(mid) - phi0).abs() >= PLAN_TAPER_CYCLES {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi) - far_core
        };
        let far_edge = far_core + far_taper;

        // Near (small |ν|) edge: amplitude floor scan from the stationary
        // region toward zero.
        let peak = spec.amplitude(sigma, side * nu_star_near, t).norm();
        let floor = peak * PLAN_AMP_FLOOR;
        let scan_n = 400;
        let mut near_core = nu_star_near;
        let mut reached_floor = false;
        for i in 0..=scan_n {
            let mag = nu_star_near * (1.0 - i as f64 / scan_n as f64);
            let a = spec.amplitude(sigma, side * mag, t).norm();
            near_core = mag;
            if a < floor {
                reached_floor = true;
                break;
            }
        }
        let near_taper = (0.05 * (far_core - near_core)).max(4.0);

        let mut windows = Vec::new();
        let central = t.powf(CENTRAL_EPS).max(1.5);
        if reached_floor && near_core - near_taper > central {
            // separate main window and central window
            let (w_lo, w_hi) = if side < 0.0 {
                (-far_edge, -(near_core - near_taper))
            } else {
                (near_core - near_taper, far_edge)
            };
            windows.push(PlanWindow {
                lo: w_lo,
                hi: w_hi,
                taper_lo: if side < 0.0 { far_taper } else { near_taper },
                taper_hi: if side < 0.0 { near_taper } else { far_taper },
            });
            windows.push(PlanWindow {
                lo: -central,
                hi: central,
                taper_lo: 0.3 * central,
                taper_hi: 0.3 * central,
            });
        } else {
            // merged window spanning the central region
            let pos_edge = ContourPlan::positive_amp_edge(spec, t, sigma, central);
            let (w_lo, w_hi) = if side < 0.0 {
                (-far_edge, pos_edge)
            } else {
                (-pos_edge, far_edge)
            };
            windows.push(PlanWindow {
                lo: w_lo,
                hi: w_hi,
                taper_lo: if side < 0.0 { far_taper } else { 2.0 },
                taper_hi: if side < 0.0 { 2.0 } else { far_taper },
            });
        }
        Ok(ContourPlan { sigma, windows })
    }

    /// Where the amplitude dies on the opposite side of ν = 0.
    fn positive_amp_edge(spec: &TraceFamilySpec, t: f64, sigma: f64, central: f64) -> f64 {
        let side = -spec.side; // opposite side
        let peak = spec
            .amplitude(sigma, spec.side * spec.c1 * t, t)
            .norm()
            .max(1e-300);
        let mut edge = central;
        for i in 0..200 {
            let mag = central + (i as f64) * 2.0;
            let a = spec.amplitude(sigma, side * mag, t).norm();
            edge = mag + 2.0;
            if a < peak * PLAN_AMP_FLOOR {
                break;
            }
        }
        edge
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep(-0.3), 0.0);
        assert_eq!(smoothstep(1.4), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        assert!(smoothstep(0.2) > 0.0 && smoothstep(0.2) < 0.5);
    }

    #[test]
    fn window_weight_tapers() {
        let w = PlanWindow {
            lo: -10.0,
            hi: 10.0,
            taper_lo: 2.0,
            taper_hi: 2.0,
        };
        assert_eq!(w.weight(-10.0), 0.0);
        assert_eq!(w.weight(10.0), 0.0);
        assert_eq!(w.weight(0.0), 1.0);
        assert!(w.weight(-9.0) > 0.0 && w.weight(-9.0) < 1.0);
    }
}
