use super::PhasePair;
use crate::{Error, Result};
use num_complex::Complex64;

/// Output of [`stationary_expand`].
///
/// `value_at_order(k)` assembles `leading_factor · Σ_{n≤k} p_n`. When the
/// phase derivative has no zero in the support, `stationary_point` is `None`
/// and `terms` is empty.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub stationary_point: Option<f64>,
    /// Expansion terms `p₀ .. p_A`.
    pub terms: Vec<Complex64>,
    /// `e^{i h(t₀)} / √(h″(t₀))`.
    pub leading_factor: Complex64,
    /// Size of the last included term, a proxy for the truncation error.
    pub error_model: f64,
}

impl ExpansionResult {
    pub fn value(&self) -> Complex64 {
        self.value_at_order(self.terms.len().saturating_sub(1))
    }

    pub fn value_at_order(&self, order: usize) -> Complex64 {
        let sum: Complex64 = self.terms.iter().take(order + 1).sum();
        self.leading_factor * sum
    }

    pub fn has_stationary_point(&self) -> bool {
        self.stationary_point.is_some()
    }
}

const SQRT_TAU: f64 = 2.506_628_274_631_000_5; // √(2π)

fn e_eighth() -> Complex64 {
    // e(1/8) = e^{iπ/4}
    Complex64::new(
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    )
}

/// Locates the unique zero of `h'` in the support by sign scan plus
/// bisection to relative accuracy 1e-13.
fn locate_stationary_point(pp: &PhasePair) -> Result<Option<f64>> {
    let (a, b) = pp.support();
    const SCAN: usize = 512;
    let mut prev_x = a;
    let mut prev = pp.phase_deriv(prev_x, 1)?;
    let mut bracket: Option<(f64, f64)> = None;
    for i in 1..=SCAN {
        let x = a + (b - a) * (i as f64) / (SCAN as f64);
        let cur = pp.phase_deriv(x, 1)?;
        if prev == 0.0 {
            // grid point is an exact zero
            if bracket.is_some() {
                return Err(Error::AmbiguousStationaryPoint);
            }
            bracket = Some((prev_x, prev_x));
        } else if prev * cur < 0.0 {
            if bracket.is_some() {
                return Err(Error::AmbiguousStationaryPoint);
            }
            bracket = Some((prev_x, x));
        }
        prev_x = x;
        prev = cur;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(None);
    };
    if lo == hi {
        return Ok(Some(lo));
    }
    let f_lo = pp.phase_deriv(lo, 1)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-13 * mid.abs().max(1e-300) {
            break;
        }
        let f_mid = pp.phase_deriv(mid, 1)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Stationary-phase expansion of `∫ w(t) e^{i h(t)} dt`.
///
/// Requires `h″` of one sign on the support and a unique zero of `h′`.
/// The first three terms use the closed forms
///
/// - `p₀ = √(2π) e(1/8) w(t₀)`
/// - `p₁ = √(2π) e(1/8) (i/(2h″)) w″(t₀)`
/// - `p₂ = -√(2π) e(1/8) / (8 h″²) (w⁽⁴⁾ + 4i w′ h⁽³⁾ + i w h⁽⁴⁾)(t₀)`
///
/// and `p₃..p₅` are obtained from `p_n = √(2π) e(1/8) (i/(2h″))ⁿ G^{(2n)}/n!`
/// with `G(t) = w(t) e^{iH(t)}`, `H(t) = h(t) - h(t₀) - h″(t₀)(t-t₀)²/2`,
/// differentiated numerically at `t₀`.
pub fn stationary_expand(pp: &PhasePair, order: usize) -> Result<ExpansionResult> {
    if order > 5 {
        return Err(Error::Domain(format!(
            "expansion order ≤ 5 supported, got {order}"
        )));
    }
    let Some(t0) = locate_stationary_point(pp)? else {
        return Ok(ExpansionResult {
            stationary_point: None,
            terms: Vec::new(),
            leading_factor: Complex64::new(0.0, 0.0),
            error_model: 0.0,
        });
    };
    let h2 = pp.phase_deriv(t0, 2)?;
    if h2 == 0.0 || !h2.is_finite() {
        return Err(Error::Domain(format!(
            "vanishing second derivative at the stationary point t₀ = {t0}"
        )));
    }
    let front = SQRT_TAU * e_eighth();
    let iq = Complex64::new(0.0, 1.0) / (2.0 * h2);

    let mut terms = Vec::with_capacity(order + 1);
    terms.push(front * pp.amplitude(t0));
    if order >= 1 {
        terms.push(front * iq * pp.amplitude_deriv(t0, 2)?);
    }
    if order >= 2 {
        let w4 = pp.amplitude_deriv(t0, 4)?;
        let w1 = pp.amplitude_deriv(t0, 1)?;
        let w0 = pp.amplitude(t0);
        let h3 = pp.phase_deriv(t0, 3)?;
        let h4 = pp.phase_deriv(t0, 4)?;
        let g4 = Complex64::new(w4, 4.0 * w1 * h3 + w0 * h4);
        terms.push(-front / (8.0 * h2 * h2) * g4);
    }
    if order >= 3 {
        let step_scale = g_step_scale(pp, t0)?;
        let mut factorial = 2.0;
        let mut iq_pow = iq * iq;
        for n in 3..=order {
            factorial *= n as f64;
            iq_pow *= iq;
            let g2n = g_even_derivative(pp, t0, h2, n, step_scale)?;
            terms.push(front / factorial * iq_pow * g2n);
        }
    }
    let error_model = terms.last().map(|t| t.norm()).unwrap_or(0.0);
    let leading_factor = Complex64::from_polar(1.0, pp.phase(t0)) / Complex64::new(h2, 0.0).sqrt();
    Ok(ExpansionResult {
        stationary_point: Some(t0),
        terms,
        leading_factor,
        error_model,
    })
}

/// Characteristic scale on which the cubic part of the phase reaches one
/// radian; bounds the finite-difference step for the `G`-derivatives.
fn g_step_scale(pp: &PhasePair, t0: f64) -> Result<f64> {
    let (a, b) = pp.support();
    let h3 = if pp.phase_deriv(t0, 3).is_ok() {
        pp.phase_deriv(t0, 3)?
    } else {
        // fall back to differentiating h″
        crate::numerics::finite_diff_real(
            &|x| (pp.phase_deriv(x, 2)).unwrap_or(f64::NAN),
            t0,
            1,
            (b - a).min(1.0),
        )?
    };
    let rho = if h3.abs() > 1e-12 {
        (6.0 / h3.abs()).powf(1.0 / 3.0)
    } else {
        f64::INFINITY
    };
    Ok(rho.min(b - a).min(1.0))
}

/// Central difference of even order `2n`, accuracy O(step²), applied to
/// `G(t) = w(t) e^{iH(t)}`. Outside the support `w ≡ 0`, so stencil points
/// there contribute nothing and the phase is never queried.
fn g_even_derivative(
    pp: &PhasePair,
    t0: f64,
    h2: f64,
    n: usize,
    step_scale: f64,
) -> Result<Complex64> {
    let m = 2 * n;
    let step = step_scale * f64::EPSILON.powf(1.0 / (m as f64 + 2.0));
    let h_t0 = pp.phase(t0);
    let g = |t: f64| -> Result<Complex64> {
        let w = pp.amplitude(t);
        if w == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let hh = pp.phase(t) - h_t0 - 0.5 * h2 * (t - t0) * (t - t0);
        if !hh.is_finite() || !w.is_finite() {
            return Err(Error::NonFinite {
                context: "stationary G evaluation",
                at: t,
            });
        }
        Ok(Complex64::from_polar(w, hh))
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut binom = 1.0f64; // C(m, 0)
    for k in 0..=m {
        let offset = (n as f64 - k as f64) * step;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * g(t0 + offset)?;
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    Ok(acc / step.powi(m as i32))
}
