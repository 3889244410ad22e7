//! Twisted horocycle integrals
//! `(1/(β-α)) ∫_α^β f(x+iy) K_{1/y}(x/y) V(x) dx` over shrinking height y.
//!
//! The default route expands the Maass form and integrates mode by mode
//! against the kernel on one shared panel grid (each kernel value is used by
//! every mode); the direct route integrates the product under the
//! oscillation-aware engine and serves as the dual-method oracle.

use crate::modular::{maass_value, CoefficientTable, WhittakerEvaluator, WhittakerMethod};
use crate::numerics::{e, integrate_oscillatory_opts, OscOptions};
use crate::oscillatory::TestFunction;
use crate::sums::ScanRecord;
use crate::tracefn::{eval_trace_with_plan, ContourPlan, TraceFamilySpec};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorocycleMethod {
    DirectXQuadrature,
    FourierSide,
}

/// One evaluation of the twisted integral.
#[derive(Debug, Clone, Copy)]
pub struct HorocycleRun {
    pub y: f64,
    pub alpha: f64,
    pub beta: f64,
    pub value: Complex64,
    pub n_cut: u64,
    pub method: HorocycleMethod,
}

#[derive(Debug, Clone, Copy)]
pub struct HorocycleOptions {
    /// Kernel-evaluation tolerance.
    pub k_tol: f64,
    /// Maximum phase variation per shared panel, in cycles.
    pub panel_cycles: f64,
    /// Override for the mode cutoff (default ceil(10/y)).
    pub n_cut: Option<u64>,
}

impl Default for HorocycleOptions {
    fn default() -> Self {
        HorocycleOptions {
            k_tol: 1e-10,
            panel_cycles: 0.5,
            n_cut: None,
        }
    }
}

/// Gauss–Kronrod shared grid over `[α, β]`: panels sized so the kernel phase
/// varies by at most `panel_cycles` and the fastest retained mode by at most
/// `panel_cycles` per panel.
fn shared_grid(
    spec: &TraceFamilySpec,
    t: f64,
    alpha: f64,
    beta: f64,
    n_max: u64,
    panel_cycles: f64,
) -> Result<Vec<(f64, f64)>> {
    let max_width = (panel_cycles / n_max as f64).min((beta - alpha) / 8.0);
    let kappa = |x: f64| spec.kernel_phase(t, t * x).unwrap_or(0.0);
    let mut cuts = vec![alpha];
    let mut stack = vec![(alpha, kappa(alpha), beta, kappa(beta))];
    while let Some((lo, klo, hi, khi)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let kmid = kappa(mid);
        let spread = (khi - klo)
            .abs()
            .max((kmid - klo).abs() + (khi - kmid).abs());
        if (spread > panel_cycles || (hi - lo) > max_width) && (hi - lo) > 1e-9 {
            stack.push((mid, kmid, hi, khi));
            stack.push((lo, klo, mid, kmid));
        } else {
            cuts.push(hi);
        }
    }
    // G7K15 nodes on each panel
    const XGK: [f64; 15] = [
        -0.991_455_371_120_812_6,
        -0.949_107_912_342_758_5,
        -0.864_864_423_359_769_1,
        -0.741_531_185_599_394_5,
        -0.586_087_235_467_691_1,
        -0.405_845_151_377_397_2,
        -0.207_784_955_007_898_5,
        0.0,
        0.207_784_955_007_898_5,
        0.405_845_151_377_397_2,
        0.586_087_235_467_691_1,
        0.741_531_185_599_394_5,
        0.864_864_423_359_769_1,
        0.949_107_912_342_758_5,
        0.991_455_371_120_812_6,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_42,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    let mut nodes = Vec::with_capacity((cuts.len() - 1) * 15);
    for w in cuts.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[0] + w[1]);
        for (i, &u) in XGK.iter().enumerate() {
            let weight = WGK[7 - (i as i64 - 7).unsigned_abs() as usize] * half;
            nodes.push((mid + half * u, weight));
        }
    }
    Ok(nodes)
}

/// `(1/(β-α)) ∫_α^β f(x+iy) K_{1/y}(x/y) V(x) dx`.
pub fn twisted_integral(
    table: &CoefficientTable,
    spec: &TraceFamilySpec,
    y: f64,
    alpha: f64,
    beta: f64,
    window: &TestFunction,
    method: HorocycleMethod,
    opts: HorocycleOptions,
) -> Result<HorocycleRun> {
    if !(y > 0.0 && y <= 0.125) {
        return Err(Error::Domain(format!("need 0 < y ≤ 1/8, got {y}")));
    }
    if !(1.0 <= alpha && alpha < beta && beta <= 2.0) {
        return Err(Error::Domain(format!(
            "need [α,β] ⊆ [1,2], got [{alpha}, {beta}]"
        )));
    }
    let t = 1.0 / y;
    let n_cut = opts.n_cut.unwrap_or((10.0 / y).ceil() as u64);
    if n_cut > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_cut,
            available: table.n_max(),
        });
    }
    let t_f = table.spectral_parameter()?;

    let value = match method {
        HorocycleMethod::FourierSide => {
            // mode weights n^{-1/2} W_{it}(4πny)
            let ev = WhittakerEvaluator::new(t_f, WhittakerMethod::Auto);
            let weights: Vec<Result<f64>> = (1..=n_cut)
                .into_par_iter()
                .map(|n| {
                    Ok(ev.eval(4.0 * std::f64::consts::PI * n as f64 * y)?.value
                        / (n as f64).sqrt())
                })
                .collect();
            let mut w_mode = Vec::with_capacity(n_cut as usize);
            for w in weights {
                w_mode.push(w?);
            }

            let grid = shared_grid(spec, t, alpha, beta, n_cut, opts.panel_cycles)?;
            let plan = ContourPlan::build(spec, t, t * alpha, t * beta, spec.sigma_default)?;
            let kv: Vec<Result<Complex64>> = grid
                .par_iter()
                .map(|&(x, w)| {
                    Ok(eval_trace_with_plan(spec, &plan, t, t * x, opts.k_tol)?
                        * window.eval(x)
                        * w)
                })
                .collect();
            let mut kernel_at_node = Vec::with_capacity(grid.len());
            for k in kv {
                kernel_at_node.push(k?);
            }

            // A_{±n} accumulated with one complex rotation per node
            let mut acc_pos = vec![Complex64::new(0.0, 0.0); n_cut as usize];
            let mut acc_neg = vec![Complex64::new(0.0, 0.0); n_cut as usize];
            for (&(x, _), &kvj) in grid.iter().zip(&kernel_at_node) {
                let z = e(x);
                let mut zn = Complex64::new(1.0, 0.0);
                for n in 0..n_cut as usize {
                    zn *= z;
                    acc_pos[n] += kvj * zn;
                    acc_neg[n] += kvj * zn.conj();
                }
            }
            let mut total = Complex64::new(0.0, 0.0);
            for n in 1..=n_cut as usize {
                total += w_mode[n - 1]
                    * (table.rho(n as i64) * acc_pos[n - 1]
                        + table.rho(-(n as i64)) * acc_neg[n - 1]);
            }
            total / (beta - alpha)
        }
        HorocycleMethod::DirectXQuadrature => {
            let plan = ContourPlan::build(spec, t, t * alpha, t * beta, spec.sigma_default)?;
            let spec2 = spec.clone();
            let amp = |x: f64| -> Complex64 {
                let f = match maass_value(table, x, y, n_cut) {
                    Ok(v) => v.value,
                    Err(_) => return Complex64::new(f64::NAN, 0.0),
                };
                let k = match eval_trace_with_plan(&spec2, &plan, t, t * x, opts.k_tol) {
                    Ok(v) => v,
                    Err(_) => return Complex64::new(f64::NAN, 0.0),
                };
                let kappa = spec2.kernel_phase(t, t * x).unwrap_or(0.0);
                f * k * e(-kappa) * window.eval(x)
            };
            let spec3 = spec.clone();
            let phase = move |x: f64| spec3.kernel_phase(t, t * x).unwrap_or(0.0);
            let r = integrate_oscillatory_opts(
                amp,
                phase,
                alpha,
                beta,
                1e-13,
                OscOptions {
                    budget: 4_000_000,
                    max_panel_width: 0.2 / n_cut as f64,
                    ..OscOptions::default()
                },
            )?;
            r.value / (beta - alpha)
        }
    };
    Ok(HorocycleRun {
        y,
        alpha,
        beta,
        value,
        n_cut,
        method,
    })
}

/// Decay scan over a dyadic y-grid with the log-log fit of |value| vs y.
pub fn decay_scan(
    table: &CoefficientTable,
    spec: &TraceFamilySpec,
    y_grid: &[f64],
    alpha: f64,
    beta: f64,
    window: &TestFunction,
    opts: HorocycleOptions,
) -> Result<(Vec<HorocycleRun>, crate::sums::ExponentFit)> {
    let mut runs = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        runs.push(twisted_integral(
            table,
            spec,
            y,
            alpha,
            beta,
            window,
            HorocycleMethod::FourierSide,
            opts,
        )?);
    }
    let records: Vec<ScanRecord> = runs
        .iter()
        .map(|r| ScanRecord {
            parameter: r.y,
            value: r.value,
            trivial_bound: r.y.powf(0.125) / (beta - alpha),
            saving_exponent_local: 0.0,
        })
        .collect();
    let fit = crate::sums::exponent_scan(&records)?;
    Ok((runs, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{synthetic_maass_table, Parity};
    use crate::tracefn::{conjugate_family, make_bessel_family};

    fn setup() -> (CoefficientTable, TraceFamilySpec, TestFunction) {
        (
            synthetic_maass_table(29, 400, 9.5337, Parity::Even),
            make_bessel_family(),
            TestFunction::peak_one_bump(0.5, 2.5),
        )
    }

    #[test]
    fn methods_agree() {
        let (table, fam, v) = setup();
        let y = 1.0 / 32.0;
        let a = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default(),
        )
        .unwrap();
        let b = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::DirectXQuadrature,
            HorocycleOptions::default(),
        )
        .unwrap();
        assert!(
            (a.value - b.value).norm() <= 1e-3 * a.value.norm(),
            "fourier {} vs direct {}, rel {}",
            a.value,
            b.value,
            (a.value - b.value).norm() / a.value.norm()
        );
    }

    #[test]
    fn mode_truncation_tail_negligible() {
        let (table, fam, v) = setup();
        let y = 1.0 / 16.0;
        let base = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions {
                n_cut: Some(160),
                ..Default::default()
            },
        )
        .unwrap();
        let short = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions {
                n_cut: Some(200),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (base.value - short.value).norm() <= 1e-6 * base.value.norm(),
            "tail {} of {}",
            (base.value - short.value).norm(),
            base.value.norm()
        );
    }

    #[test]
    fn refinement_invariance() {
        let (table, fam, v) = setup();
        let y = 1.0 / 16.0;
        let coarse = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default(),
        )
        .unwrap();
        let fine = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions {
                panel_cycles: 0.125,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (coarse.value - fine.value).norm() <= 1e-9 * coarse.value.norm(),
            "coarse {} vs fine {}",
            coarse.value,
            fine.value
        );
    }

    #[test]
    fn conjugation_symmetry() {
        let (table, fam, v) = setup();
        let conj = conjugate_family(&fam);
        let y = 1.0 / 32.0;
        let a = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default(),
        )
        .unwrap();
        let b = twisted_integral(
            &table,
            &conj,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default(),
        )
        .unwrap();
        assert!(
            (a.value.conj() - b.value).norm() <= 1e-8 * a.value.norm(),
            "{} vs {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn linear_in_the_table() {
        let (table, fam, v) = setup();
        let mut scaled = table.clone();
        scaled.rho1 *= 3.0;
        let y = 1.0 / 16.0;
        let a = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default(),
        )
        .unwrap();
        let b = twisted_integral(
            &scaled,
            &fam,
            y,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default(),
        )
        .unwrap();
        assert!(
            (b.value - 3.0 * a.value).norm() <= 1e-12 * a.value.norm().max(1e-300),
            "{} vs 3×{}",
            b.value,
            a.value
        );
    }

    #[test]
    fn shrinking_window_stays_bounded() {
        // β-α = y^{0.1}: the normalized value stays within 10× of the
        // full-window value
        let (table, fam, v) = setup();
        let y = 1.0f64 / 32.0;
        let full = twisted_integral(
            &table, &fam, y, 1.0, 2.0, &v,
            HorocycleMethod::FourierSide, HorocycleOptions::default(),
        )
        .unwrap();
        let w = y.powf(0.1);
        let (a, b) = (1.5 - w / 2.0, 1.5 + w / 2.0);
        let short = twisted_integral(
            &table, &fam, y, a, b, &v,
            HorocycleMethod::FourierSide, HorocycleOptions::default(),
        )
        .unwrap();
        assert!(
            short.value.norm() <= 10.0 * full.value.norm(),
            "shrunk {} vs full {}",
            short.value.norm(),
            full.value.norm()
        );
    }

    #[test]
    fn domain_checks() {
        let (table, fam, v) = setup();
        assert!(twisted_integral(
            &table,
            &fam,
            0.3,
            1.0,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default()
        )
        .is_err());
        assert!(twisted_integral(
            &table,
            &fam,
            0.05,
            0.5,
            2.0,
            &v,
            HorocycleMethod::FourierSide,
            HorocycleOptions::default()
        )
        .is_err());
    }
}
