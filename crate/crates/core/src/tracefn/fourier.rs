use super::{eval_trace_with_plan, ContourPlan, TraceFamilySpec};
use crate::numerics::{integrate_oscillatory_opts, OscOptions};
use crate::oscillatory::TestFunction;
use crate::Result;
use num_complex::Complex64;

const TAU: f64 = std::f64::consts::TAU;

/// Fourier transform of the windowed kernel:
/// `K̂_t(x) = t^{1/2} ∫₁² K_t(tu) V(u) e(-xu) du`,
/// with `V` the normalized bump on `[1, 2]`, evaluated through the contour
/// kernel under the oscillatory panel integrator. The kernel's own phase
/// (its stationary value) is folded into the panel phase so the integrator
/// sees a slowly varying amplitude.
pub fn fourier_transform_trace(spec: &TraceFamilySpec, t: f64, x: f64) -> Result<Complex64> {
    let v = TestFunction::normalized_bump(1.0, 2.0);
    let plan = ContourPlan::build(spec, t, t, 2.0 * t, spec.sigma_default)?;
    let spec2 = spec.clone();
    let plan2 = plan.clone();
    let amp = move |u: f64| -> Complex64 {
        let vu = v.eval(u);
        if vu == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = match eval_trace_with_plan(&spec2, &plan2, t, t * u, 1e-9) {
            Ok(k) => k,
            Err(_) => return Complex64::new(f64::NAN, 0.0),
        };
        let kappa = spec2.kernel_phase(t, t * u).unwrap_or(0.0);
        k * crate::numerics::e(-kappa) * vu
    };
    let spec3 = spec.clone();
    let phase = move |u: f64| -> f64 {
        let kappa = spec3.kernel_phase(t, t * u).unwrap_or(0.0);
        kappa - x * u
    };
    let r = integrate_oscillatory_opts(
        amp,
        phase,
        1.0,
        2.0,
        1e-10,
        OscOptions {
            budget: 400_000,
            ..OscOptions::default()
        },
    )?;
    Ok(t.sqrt() * r.value)
}

/// Main-term model of the Fourier transform: the contour evaluation of the
/// transformed Mellin data at abscissa `1-σ`,
///
/// `K̃_t(x) = (1/2π) ∫ g̃_x(ν) e(f̃(ν)) x^{-iν} dν`,
///
/// where `g̃_x(ν) = t^{1/2-σ} √(2π) e(-1/8) ν^{-1/2} (ν/2πx)^{1-σ}
/// V(ν/2πx) g(σ,-ν,t)` and `f̃(ν) = f(σ,-ν,t) + (ν/2π) log(tν/2πe)`.
pub fn tilde_trace(spec: &TraceFamilySpec, t: f64, x: f64) -> Result<Complex64> {
    let v = TestFunction::normalized_bump(1.0, 2.0);
    let sigma = spec.sigma_default;
    let log_x_cycles = x.ln() / TAU;
    let amp = |nu: f64| -> Complex64 {
        if nu <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let vv = v.eval(nu / (TAU * x));
        if vv == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let rot = Complex64::new(
            std::f64::consts::FRAC_1_SQRT_2,
            -std::f64::consts::FRAC_1_SQRT_2,
        );
        t.powf(0.5 - sigma)
            * TAU.sqrt()
            * rot
            * nu.powf(-0.5)
            * (nu / (TAU * x)).powf(1.0 - sigma)
            * vv
            * spec.amplitude(sigma, -nu, t)
    };
    let phase = |nu: f64| -> f64 {
        if nu <= 0.0 {
            return 0.0;
        }
        let base = spec.phase(sigma, -nu, t, 0);
        let extra = nu * (t * nu / (TAU * std::f64::consts::E)).ln() / TAU;
        (if base.is_finite() { base } else { 0.0 }) + extra - nu * log_x_cycles
    };
    // support of the V-factor: ν ∈ [2πx, 4πx]
    let r = integrate_oscillatory_opts(
        amp,
        phase,
        TAU * x * 0.999,
        2.0 * TAU * x * 1.001,
        1e-11,
        OscOptions::default(),
    )?;
    Ok(r.value / TAU)
}
