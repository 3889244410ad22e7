use crate::modular::{k_bessel_imag, CoefficientTable, FormKind};
use crate::numerics::{e, integrate_adaptive, log_gamma};
use crate::oscillatory::TestFunction;
use crate::tracefn::bessel_j_imag_order;
use crate::{Error, Result};
use num_complex::Complex64;

const TAU: f64 = std::f64::consts::TAU;

/// Kernel pair selector for the dual sum.
#[derive(Debug, Clone, Copy)]
pub enum VoronoiKernelChoice {
    /// `J_g(x) = -π/sin(πit_g)·(J_{2it_g} - J_{-2it_g})(x)`,
    /// `K_g(x) = 4 cos(πit_g) K_{2it_g}(x)`.
    Maass { t_g: f64 },
    /// Weight-k degeneration: `J_g(x) = 2π i^k J_{k-1}(x)`, `K_g ≡ 0`
    /// (the minus-side coefficients vanish for holomorphic forms, and the
    /// cos factor vanishes at the half-integer spectral point).
    Holomorphic { weight: u32 },
}

impl VoronoiKernelChoice {
    pub fn for_table(table: &CoefficientTable) -> Result<Self> {
        match table.kind {
            FormKind::Maass { t_f } => Ok(VoronoiKernelChoice::Maass { t_g: t_f }),
            FormKind::Holomorphic { weight } => {
                if weight % 4 != 0 {
                    return Err(Error::Domain(format!(
                        "only weights divisible by 4 carry a real i^k factor, got {weight}"
                    )));
                }
                Ok(VoronoiKernelChoice::Holomorphic { weight })
            }
        }
    }
}

/// Integer-order `J_m(x) = (1/π)∫₀^π cos(x sinθ - mθ) dθ`.
fn bessel_j_integer(m: u32, x: f64) -> Result<f64> {
    let mf = m as f64;
    Ok(integrate_adaptive(
        move |th| Complex64::new((x * th.sin() - mf * th).cos(), 0.0),
        0.0,
        std::f64::consts::PI,
        1e-12,
    )?
    .value
    .re / std::f64::consts::PI)
}

/// The Voronoi kernel pair `(J_g, K_g)` at argument `x`. Both kernels are
/// real; the imaginary residue of the complex assembly is checked against
/// 1e-10 of scale and dropped.
pub fn voronoi_kernels(choice: VoronoiKernelChoice, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "kernel argument must be positive: {x}"
        )));
    }
    match choice {
        VoronoiKernelChoice::Holomorphic { weight } => {
            let j = TAU * bessel_j_integer(weight - 1, x)?;
            Ok((j, 0.0))
        }
        VoronoiKernelChoice::Maass { t_g } => {
            if !(t_g > 0.0) {
                return Err(Error::Domain(format!("need t_g > 0, got {t_g}")));
            }
            let tp = 2.0 * t_g;
            // J_{2it} e^{-πt'/2}-scaled by the loop contour; J_{-2it} is its
            // conjugate at real argument
            let scaled = bessel_j_imag_order(tp, x)?;
            let scale = (std::f64::consts::FRAC_PI_2 * tp).exp();
            let j_plus = scaled * scale;
            let j_minus = j_plus.conj();
            // sin(πit_g) = i sinh(πt_g)
            let sin_pi_it = Complex64::new(0.0, (std::f64::consts::PI * t_g).sinh());
            let j_kernel = -std::f64::consts::PI / sin_pi_it * (j_plus - j_minus);
            if j_kernel.im.abs() > 1e-10 * j_kernel.re.abs().max(1e-8) {
                return Err(Error::NonFinite {
                    context: "voronoi J kernel not real",
                    at: x,
                });
            }
            let k = 4.0 * (std::f64::consts::PI * tp / 2.0).cosh() * k_bessel_imag(tp, x)?;
            Ok((j_kernel.re, k))
        }
    }
}

/// Mellin–Barnes route to the same kernels:
/// `J_g(x) = ∫_{(σ')} (x/2)^{-s} γ₋(s) ds`,
/// `K_g(x) = ∫_{(σ')} (x/2)^{-s} γ₊(s) ds`, with
/// `γ₋ = -π/(4πi sin(πit_g)) [Γ(s/2+it_g)/Γ(1-s/2+it_g) - (t_g → -t_g)]`
/// and `γ₊ = 4cos(πit_g)/(8πi) Γ(s/2+it_g)Γ(s/2-it_g)`.
/// Independent of the loop-contour route; used as its oracle.
pub fn voronoi_kernels_mellin(t_g: f64, x: f64, sigma_p: f64) -> Result<(f64, f64)> {
    if !(sigma_p > 0.0 && sigma_p < 1.0) {
        return Err(Error::Domain(format!(
            "Mellin abscissa must lie in (0,1): {sigma_p}"
        )));
    }
    let half_log = (x / 2.0).ln();
    let sinh_pi = (std::f64::consts::PI * t_g).sinh();
    let cosh_pi = (std::f64::consts::PI * t_g).cosh();
    // smooth truncation window over |τ| ∈ [T, 3T]
    let t_cut = 2.0 * (2.0 * t_g) + 60.0;
    let window = move |tau: f64| -> f64 {
        let a = tau.abs();
        if a <= t_cut {
            1.0
        } else if a >= 3.0 * t_cut {
            0.0
        } else {
            let u = (a - t_cut) / (2.0 * t_cut);
            let p = (-1.0 / (1.0 - u)).exp();
            let q = (-1.0 / u).exp();
            p / (p + q)
        }
    };
    let gamma_ratio = move |s_half: Complex64, sign: f64| -> Result<Complex64> {
        let a = log_gamma(s_half + Complex64::new(0.0, sign * t_g))?;
        let b = log_gamma(Complex64::new(1.0, 0.0) - s_half + Complex64::new(0.0, sign * t_g))?;
        Ok((a - b).exp())
    };
    let j_int = integrate_adaptive(
        |tau: f64| {
            let w = window(tau);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s = Complex64::new(sigma_p, tau);
            let s_half = s / 2.0;
            let r1 = match gamma_ratio(s_half, 1.0) {
                Ok(v) => v,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            let r2 = match gamma_ratio(s_half, -1.0) {
                Ok(v) => v,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            let xfac = (-(s * half_log)).exp();
            // measure i·dτ against γ₋ = (r1 - r2)/(4 sinh(πt_g))
            Complex64::new(0.0, 1.0) * w * xfac * (r1 - r2) / (4.0 * sinh_pi)
        },
        -3.0 * t_cut,
        3.0 * t_cut,
        1e-11,
    )?
    .value;
    let k_int = integrate_adaptive(
        |tau: f64| {
            let s = Complex64::new(sigma_p, tau);
            let s_half = s / 2.0;
            let a = match log_gamma(s_half + Complex64::new(0.0, t_g)) {
                Ok(v) => v,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            let b = match log_gamma(s_half - Complex64::new(0.0, t_g)) {
                Ok(v) => v,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            let xfac = (-(s * half_log)).exp();
            // measure i·dτ against γ₊ = cosh(πt_g) Γ Γ/(2πi)
            xfac * (a + b).exp() * (cosh_pi / TAU)
        },
        -t_cut,
        t_cut,
        1e-11,
    )?
    .value;
    Ok((j_int.re, k_int.re))
}

/// Result of one Voronoi summation check.
#[derive(Debug, Clone, Copy)]
pub struct VoronoiReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// Number of dual terms retained per sign.
    pub rhs_truncation: usize,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct VoronoiOptions {
    /// Hard cap on dual terms per sign (0 = automatic truncation only).
    pub max_dual_terms: usize,
    /// Tail tolerance relative to the running dual-sum scale.
    pub tail_tol: f64,
}

impl Default for VoronoiOptions {
    fn default() -> Self {
        VoronoiOptions {
            max_dual_terms: 120,
            tail_tol: 1e-6,
        }
    }
}

/// Checks the summation identity
///
/// `Σ_n ρ(n) e(an/c) F(n) = (1/c) Σ_± Σ_{n≥1} ρ(∓n) e(±n ā/c) V^±(n/c²)`
///
/// with `V^-(y) = ∫F(x) J_g(4π√(xy)) dx` and `V^+(y) = ∫F(x) K_g(4π√(xy)) dx`.
/// The K-side is truncated where the kernel argument enters its exponential
/// dead zone; the J-side where the oscillatory inner integral falls below
/// the tail tolerance.
pub fn voronoi_check(
    table: &CoefficientTable,
    a: i64,
    c: i64,
    f_window: &TestFunction,
    kernels: VoronoiKernelChoice,
    opts: VoronoiOptions,
) -> Result<VoronoiReport> {
    if !(1..=3).contains(&c) {
        return Err(Error::Domain(format!(
            "modulus c must be in 1..=3, got {c}"
        )));
    }
    if super::gcd_i(a, c) != 1 && !(a == 0 && c == 1) {
        return Err(Error::Domain(format!("need gcd(a,c) = 1, got ({a}, {c})")));
    }
    let (supp_lo, supp_hi) = f_window.support();
    if supp_hi.ceil() as u64 > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: supp_hi.ceil() as u64,
            available: table.n_max(),
        });
    }

    // direct side
    let mut lhs = Complex64::new(0.0, 0.0);
    for n in (supp_lo.floor().max(1.0) as u64)..=(supp_hi.ceil() as u64) {
        let w = f_window.eval(n as f64);
        if w != 0.0 {
            lhs += table.rho(n as i64) * w * e(a as f64 * n as f64 / c as f64);
        }
    }

    // dual side
    let a_inv = super::mod_inverse(a.rem_euclid(c), c);
    let cf = c as f64;
    // K-side dead zone: scan |K_g| until it falls below 1e-14 of its peak
    let k_dead = match kernels {
        VoronoiKernelChoice::Holomorphic { .. } => 0.0,
        VoronoiKernelChoice::Maass { .. } => {
            let mut peak = 0.0f64;
            let mut z = 1.0f64;
            loop {
                let (_, k) = voronoi_kernels(kernels, z)?;
                peak = peak.max(k.abs());
                if k.abs() < 1e-14 * peak || z > 400.0 {
                    break 2.0 * z;
                }
                z += 2.0;
            }
        }
    };

    let mut rhs = Complex64::new(0.0, 0.0);
    let mut used = 0usize;
    let mut j_scale = 0.0f64;
    let max_terms = if opts.max_dual_terms == 0 {
        200
    } else {
        opts.max_dual_terms
    };
    let mut tail_est = f64::INFINITY;
    for n in 1..=max_terms as u64 {
        let y = n as f64 / (cf * cf);
        // J-side (sign -, paired with ρ(+n))
        let vj = dual_transform(f_window, y, kernels, false)?;
        // K-side (sign +, paired with ρ(-n)); kernel dies exponentially
        let kernel_arg_min = 2.0 * TAU * (supp_lo * y).sqrt();
        let vk = if matches!(kernels, VoronoiKernelChoice::Holomorphic { .. })
            || kernel_arg_min >= k_dead
        {
            Complex64::new(0.0, 0.0)
        } else {
            dual_transform(f_window, y, kernels, true)?
        };
        rhs += (table.rho(n as i64) * e(-(n as f64) * a_inv as f64 / cf) * vj
            + table.rho(-(n as i64)) * e(n as f64 * a_inv as f64 / cf) * vk)
            / cf;
        used = n as usize;
        j_scale = j_scale.max(vj.norm());
        // the inner integral decays superalgebraically once the kernel
        // oscillates many times across the window; stop when negligible
        tail_est = vj.norm() + vk.norm();
        if tail_est < opts.tail_tol * j_scale.max(1e-30) && n >= 4 {
            break;
        }
    }
    if tail_est.is_finite()
        && opts.tail_tol.is_finite()
        && tail_est >= opts.tail_tol * j_scale.max(1e-30)
        && used == max_terms
    {
        return Err(Error::TruncationTail {
            tail: tail_est,
            tol: opts.tail_tol * j_scale.max(1e-30),
        });
    }

    let rel_error = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-30);
    Ok(VoronoiReport {
        lhs,
        rhs,
        rhs_truncation: used,
        rel_error,
    })
}

/// Inner dual transform `∫ F(x)·kernel(4π√(xy)) dx`.
fn dual_transform(
    f_window: &TestFunction,
    y: f64,
    kernels: VoronoiKernelChoice,
    k_side: bool,
) -> Result<Complex64> {
    let (lo, hi) = f_window.support();
    let r = integrate_adaptive(
        |x: f64| {
            let w = f_window.eval(x);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let arg = 2.0 * TAU * (x * y).sqrt();
            match voronoi_kernels(kernels, arg) {
                Ok((j, k)) => Complex64::new(w * if k_side { k } else { j }, 0.0),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        },
        lo,
        hi,
        1e-9,
    )?;
    Ok(r.value)
}
