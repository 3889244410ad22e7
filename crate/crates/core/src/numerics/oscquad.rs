use super::quad::{adaptive_core, QuadratureResult};
use crate::numerics::e;
use crate::{Error, Result};
use num_complex::Complex64;

/// Options for the oscillation-aware integrator.
#[derive(Debug, Clone, Copy)]
pub struct OscOptions {
    /// Integrand-evaluation budget.
    pub budget: usize,
    /// Hard cap on panel width (the default places no cap). Used when the
    /// amplitude hides oscillation the phase function cannot see.
    pub max_panel_width: f64,
    /// Maximum phase variation per panel, in cycles.
    pub max_cycles_per_panel: f64,
}

impl Default for OscOptions {
    fn default() -> Self {
        OscOptions {
            budget: 2_000_000,
            max_panel_width: f64::INFINITY,
            max_cycles_per_panel: 0.5,
        }
    }
}

/// Integrates `amplitude(x) · e(phase(x))` over `[a, b]`, `phase` in cycles.
///
/// The interval is first split into panels on which the phase varies by at
/// most half a cycle (checked at endpoints and midpoint to catch aliasing),
/// then each panel is handled by the embedded Gauss–Kronrod rule with
/// adaptive refinement on the estimated error.
pub fn integrate_oscillatory<A, P>(
    amplitude: A,
    phase: P,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    integrate_oscillatory_opts(amplitude, phase, a, b, tol, OscOptions::default())
}

pub fn integrate_oscillatory_opts<A, P>(
    amplitude: A,
    phase: P,
    a: f64,
    b: f64,
    tol: f64,
    opts: OscOptions,
) -> Result<QuadratureResult>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive: {tol}")));
    }
    let phase_checked = |x: f64| -> Result<f64> {
        let p = phase(x);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::UnresolvablePhase { at: x })
        }
    };

    // Recursive bisection until each panel carries at most half a cycle.
    let min_width = (b - a) * 2.0f64.powi(-42);
    let mut breakpoints = Vec::with_capacity(64);
    breakpoints.push(a);
    let mut stack = vec![(a, phase_checked(a)?, b, phase_checked(b)?)];
    let max_panels = opts.budget / 15;
    while let Some((lo, plo, hi, phi)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let pmid = phase_checked(mid)?;
        let spread = (phi - plo)
            .abs()
            .max((pmid - plo).abs() + (phi - pmid).abs());
        let aliasing = (pmid - 0.5 * (plo + phi)).abs();
        let needs_split = spread > opts.max_cycles_per_panel
            || aliasing > 0.25 * opts.max_cycles_per_panel
            || (hi - lo) > opts.max_panel_width;
        if needs_split && (hi - lo) > min_width {
            if breakpoints.len() + stack.len() > max_panels {
                return Err(Error::UnresolvablePhase { at: mid });
            }
            // push right first so the left half is processed next: panels
            // come out ordered left to right
            stack.push((mid, pmid, hi, phi));
            stack.push((lo, plo, mid, pmid));
        } else if needs_split {
            return Err(Error::UnresolvablePhase { at: mid });
        } else {
            breakpoints.push(hi);
        }
    }

    let f = |x: f64| -> Result<Complex64> {
        let amp = amplitude(x);
        if !(amp.re.is_finite() && amp.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "oscillatory amplitude",
                at: x,
            });
        }
        Ok(amp * e(phase_checked(x)?))
    };
    adaptive_core(&f, &breakpoints, tol, opts.budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;

    #[test]
    fn constant_amplitude_zero_phase() {
        let r =
            integrate_oscillatory(|_| Complex64::new(1.0, 0.0), |_| 0.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integer_periods_vanish() {
        // amplitude 1, phase(ν) = ν over [0, 10]: ten full cycles.
        let r =
            integrate_oscillatory(|_| Complex64::new(1.0, 0.0), |x| x, 0.0, 10.0, 1e-12).unwrap();
        assert!(r.value.norm() < 1e-11, "{}", r.value.norm());
    }

    #[test]
    fn chirp_agrees_with_adaptive_oracle() {
        // smooth bump amplitude, phase ν²/100 on [50, 100]
        let amp = |x: f64| {
            let u = (x - 75.0) / 25.0;
            if u.abs() >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((-1.0 / (1.0 - u * u)).exp(), 0.0)
            }
        };
        let phase = |x: f64| x * x / 100.0;
        let osc = integrate_oscillatory(amp, phase, 50.0, 100.0, 1e-10).unwrap();
        let ada = integrate_adaptive(|x| amp(x) * e(phase(x)), 50.0, 100.0, 1e-10).unwrap();
        assert!(
            (osc.value - ada.value).norm() < 1e-8,
            "osc {} vs ada {}",
            osc.value,
            ada.value
        );
    }

    #[test]
    fn cross_engine_agreement_randomized() {
        // 20 randomized smooth oscillatory integrands, phase variation ≤ 200
        // cycles; engines agree within 10·(tol₁+tol₂).
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let freq = 20.0 + 180.0 * next();
            let c1 = next();
            let c2 = 2.0 * next() - 1.0;
            let amp = move |x: f64| Complex64::new((c1 + x).cos(), c2 * x);
            let phase = move |x: f64| freq * (x + 0.3 * (x * std::f64::consts::PI).sin());
            let tol = 1e-9;
            let o = integrate_oscillatory(amp, phase, 0.0, 1.0, tol).unwrap();
            let a = integrate_adaptive(move |x| amp(x) * e(phase(x)), 0.0, 1.0, tol).unwrap();
            assert!(
                (o.value - a.value).norm() <= 10.0 * (tol + tol) + 1e-12,
                "freq {freq}: diff {}",
                (o.value - a.value).norm()
            );
        }
    }

    #[test]
    fn nonfinite_phase_is_diagnosed() {
        let r = integrate_oscillatory(
            |_| Complex64::new(1.0, 0.0),
            |x| (x - 0.5).ln() * 1e18,
            0.0,
            1.0,
            1e-8,
        );
        assert!(r.is_err());
    }
}
