use crate::modular::CoefficientTable;
use crate::oscillatory::TestFunction;
use crate::tracefn::{bessel_reference, eval_trace_with_plan, ContourPlan, TraceFamilySpec};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// One row of an exponent or decay scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRecord {
    pub parameter: f64,
    pub value: Complex64,
    pub trivial_bound: f64,
    pub saving_exponent_local: f64,
}

/// Which kernel evaluator feeds the correlation sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationBackend {
    /// Contour evaluation of the family's Mellin data.
    Contour,
    /// Loop-integral reference for the normalized J-Bessel kernel
    /// (cross-check; only meaningful for that family).
    SchlafliOracle,
}

/// `S(t) = Σ_n ρ(n) K_t(n) V(n/t)` by direct summation over the support of
/// the window. Kernel values are evaluated in parallel and reduced in index
/// order, so results are identical for any worker count.
pub fn correlation_sum(
    table: &CoefficientTable,
    spec: &TraceFamilySpec,
    t: f64,
    window: &TestFunction,
    backend: CorrelationBackend,
) -> Result<ScanRecord> {
    let (lo, hi) = window.support();
    let n_lo = (t * lo).floor().max(1.0) as u64;
    let n_hi = (t * hi).ceil() as u64;
    if n_hi > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_hi,
            available: table.n_max(),
        });
    }
    let plan = match backend {
        CorrelationBackend::Contour => Some(ContourPlan::build(
            spec,
            t,
            (t * lo).max(1.0),
            t * hi,
            spec.sigma_default,
        )?),
        CorrelationBackend::SchlafliOracle => None,
    };
    let terms: Vec<Result<Complex64>> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let x = n as f64;
            let w = window.eval(x / t);
            if w == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let k = match backend {
                CorrelationBackend::Contour => {
                    eval_trace_with_plan(spec, plan.as_ref().unwrap(), t, x, 1e-8)?
                }
                CorrelationBackend::SchlafliOracle => bessel_reference(t, x)?,
            };
            Ok(table.rho(n as i64) * k * w)
        })
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    for term in terms {
        value += term?;
    }
    Ok(ScanRecord {
        parameter: t,
        value,
        trivial_bound: t,
        saving_exponent_local: if value.norm() > 0.0 {
            value.norm().ln() / t.ln()
        } else {
            f64::NEG_INFINITY
        },
    })
}

/// Windowed variant `Z(N) = Σ_n ρ(n) K_t(n) V(n/N)` for `N ≤ t`, with the
/// power-saving comparator `t^{1/2+ε} N^{3/8}` (ε = 0.05) recorded.
#[derive(Debug, Clone, Copy)]
pub struct WindowedRecord {
    pub record: ScanRecord,
    pub t: f64,
    pub comparator: f64,
    /// Set when `N < t^{4/5}`: the windowed bound no longer beats trivial.
    pub below_saving_threshold: bool,
}

pub fn windowed_sum(
    table: &CoefficientTable,
    spec: &TraceFamilySpec,
    t: f64,
    n_scale: f64,
    window: &TestFunction,
) -> Result<WindowedRecord> {
    if n_scale > t {
        return Err(Error::Domain(format!(
            "windowed sum needs N ≤ t, got N = {n_scale}, t = {t}"
        )));
    }
    let (lo, hi) = window.support();
    let n_lo = (n_scale * lo).floor().max(1.0) as u64;
    let n_hi = (n_scale * hi).ceil() as u64;
    if n_hi > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_hi,
            available: table.n_max(),
        });
    }
    let plan = ContourPlan::build(
        spec,
        t,
        (n_scale * lo).max(1.0),
        n_scale * hi,
        spec.sigma_default,
    )?;
    let terms: Vec<Result<Complex64>> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let x = n as f64;
            let w = window.eval(x / n_scale);
            if w == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(table.rho(n as i64) * eval_trace_with_plan(spec, &plan, t, x, 1e-8)? * w)
        })
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    for term in terms {
        value += term?;
    }
    let record = ScanRecord {
        parameter: n_scale,
        value,
        trivial_bound: n_scale,
        saving_exponent_local: if value.norm() > 0.0 {
            value.norm().ln() / n_scale.ln()
        } else {
            f64::NEG_INFINITY
        },
    };
    Ok(WindowedRecord {
        record,
        t,
        comparator: t.powf(0.55) * n_scale.powf(0.375),
        below_saving_threshold: n_scale < t.powf(0.8),
    })
}
