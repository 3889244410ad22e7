//! Correlation sums of coefficient tables against trace kernels, exponent
//! scans, the exact delta-method identity, and the Voronoi summation check.

mod correlation;
mod voronoi;

pub use correlation::{correlation_sum, windowed_sum, CorrelationBackend, ScanRecord};
pub use voronoi::{
    voronoi_check, voronoi_kernels, voronoi_kernels_mellin, VoronoiKernelChoice, VoronoiOptions,
    VoronoiReport,
};

use crate::numerics::e;
use crate::{Error, Result};

/// Exact delta-method identity:
///
/// `δ(n) = 2 Re Σ_{1≤q≤Q < a ≤ q+Q, (a,q)=1} (1/aq) e(n ā/q) I(n, aq)`
///
/// with the x-integral in closed form: `I = 1` for `n = 0` and
/// `I = (1 - e(-n/(aq))) aq/(2πi n)` otherwise. The identity is exact for
/// every real `Q ≥ 1`, because for each `q` the admissible `a` run over a
/// complete coprime residue system.
pub fn delta_identity(n: i64, q_max: f64) -> Result<f64> {
    if !(q_max >= 1.0) {
        return Err(Error::Domain(format!("need Q ≥ 1, got {q_max}")));
    }
    let q_floor = q_max.floor() as i64;
    let mut total = num_complex::Complex64::new(0.0, 0.0);
    for q in 1..=q_floor {
        let a_lo = q_max.floor() as i64 + 1;
        let a_hi = (q as f64 + q_max).floor() as i64;
        for a in a_lo..=a_hi {
            if gcd_i(a, q) != 1 {
                continue;
            }
            let aq = (a * q) as f64;
            let inv = mod_inverse(a.rem_euclid(q), q);
            let character = e(n as f64 * inv as f64 / q as f64);
            let x_integral = if n == 0 {
                num_complex::Complex64::new(1.0, 0.0)
            } else {
                let w = e(-(n as f64) / aq);
                (num_complex::Complex64::new(1.0, 0.0) - w) * aq
                    / num_complex::Complex64::new(0.0, std::f64::consts::TAU * n as f64)
            };
            total += character * x_integral / aq;
        }
    }
    Ok(2.0 * total.re)
}

pub(crate) fn gcd_i(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Multiplicative inverse of `a` mod `q` (q ≥ 1, gcd(a,q)=1); returns 0 for
/// q = 1.
pub(crate) fn mod_inverse(a: i64, q: i64) -> i64 {
    if q == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a.rem_euclid(q), q);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(q)
}

/// Ordinary least squares of `log |value|` against `log parameter`.
///
/// Records with zero value are excluded (reported in `excluded`); the 95%
/// interval uses the normal approximation on the slope standard error.
#[derive(Debug, Clone)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub slope_ci95: f64,
    pub excluded: usize,
}

pub fn exponent_scan(records: &[ScanRecord]) -> Result<ExponentFit> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut excluded = 0;
    for r in records {
        if r.value.norm() > 0.0 && r.parameter > 0.0 {
            pts.push((r.parameter.ln(), r.value.norm().ln()));
        } else {
            excluded += 1;
        }
    }
    if pts.len() < 3 {
        return Err(Error::Domain(format!(
            "exponent fit needs at least 3 usable records, got {}",
            pts.len()
        )));
    }
    let mut params: Vec<f64> = pts.iter().map(|p| p.0).collect();
    params.sort_by(f64::total_cmp);
    params.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if params.len() < 2 {
        return Err(Error::Domain("parameters must be distinct".into()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residuals: Vec<f64> = pts
        .iter()
        .map(|p| p.1 - (intercept + slope * p.0))
        .collect();
    let s2: f64 = residuals.iter().map(|r| r * r).sum::<f64>() / (n - 2.0).max(1.0);
    let slope_se = (s2 * n / denom).sqrt();
    Ok(ExponentFit {
        slope,
        intercept,
        residuals,
        slope_ci95: 1.96 * slope_se,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn delta_at_zero_is_one() {
        assert!((delta_identity(0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        for &q in &[2.0, 5.0, 10.0] {
            let d = delta_identity(0, q).unwrap();
            assert!((d - 1.0).abs() < 1e-12, "Q={q}: {d}");
        }
    }

    #[test]
    fn delta_vanishes_off_zero() {
        for n in 1..=10i64 {
            for &s in &[1i64, -1] {
                let d = delta_identity(s * n, 5.0).unwrap();
                assert!(d.abs() < 1e-12, "n={}: {d}", s * n);
            }
        }
    }

    #[test]
    fn delta_full_case_grid() {
        // 55 cases: |n| ≤ 10 against Q ∈ {1,2,3,5,10}
        for &q in &[1.0, 2.0, 3.0, 5.0, 10.0] {
            for n in -10..=10i64 {
                let expected = if n == 0 { 1.0 } else { 0.0 };
                let d = delta_identity(n, q).unwrap();
                assert!((d - expected).abs() <= 1e-12, "n={n}, Q={q}: {d}");
            }
        }
    }

    #[test]
    fn delta_real_q() {
        // the identity holds for non-integer Q as well
        for &q in &[1.5, 2.75, 7.3] {
            assert!((delta_identity(0, q).unwrap() - 1.0).abs() < 1e-12);
            assert!(delta_identity(3, q).unwrap().abs() < 1e-12);
        }
    }

    fn mk(parameter: f64, value: f64) -> ScanRecord {
        ScanRecord {
            parameter,
            value: Complex64::new(value, 0.0),
            trivial_bound: parameter,
            saving_exponent_local: 0.0,
        }
    }

    #[test]
    fn exponent_fit_exact_powers() {
        let recs: Vec<ScanRecord> = [64.0, 128.0, 256.0, 512.0]
            .iter()
            .map(|&p| mk(p, p))
            .collect();
        let fit = exponent_scan(&recs).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        let recs: Vec<ScanRecord> = [64.0, 128.0, 256.0, 512.0]
            .iter()
            .map(|&p: &f64| mk(p, p.powf(0.875)))
            .collect();
        let fit = exponent_scan(&recs).unwrap();
        assert!((fit.slope - 0.875).abs() < 1e-12);
        assert!(fit.slope_ci95 < 1e-10);
    }

    #[test]
    fn exponent_fit_excludes_zeros() {
        let mut recs: Vec<ScanRecord> = [64.0, 128.0, 256.0, 512.0]
            .iter()
            .map(|&p| mk(p, p))
            .collect();
        recs.push(mk(1024.0, 0.0));
        let fit = exponent_scan(&recs).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_fit_needs_three_points() {
        let recs = vec![mk(2.0, 1.0), mk(4.0, 2.0)];
        assert!(exponent_scan(&recs).is_err());
    }
}
