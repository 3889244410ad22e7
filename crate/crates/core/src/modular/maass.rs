use super::{CoefficientTable, Parity, WhittakerEvaluator, WhittakerMethod};
use crate::numerics::e;
use crate::{Error, Result};
use num_complex::Complex64;

/// Truncated Fourier expansion value of the Maass form at `x + iy`.
#[derive(Debug, Clone, Copy)]
pub struct MaassValue {
    pub value: Complex64,
    /// Estimated size of the dropped tail `|n| > n_cut`.
    pub tail_bound: f64,
    /// Set when `n_cut < 10/y`, the scale the Whittaker decay needs.
    pub truncated: bool,
}

/// `f(x+iy) = Σ_{n≠0} ρ(n)|n|^{-1/2} W_{it}(4π|n|y) e(nx)`, truncated at
/// `|n| ≤ n_cut`, with the ± pair folded through the parity.
pub fn maass_value(table: &CoefficientTable, x: f64, y: f64, n_cut: u64) -> Result<MaassValue> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("need y > 0, got {y}")));
    }
    if n_cut > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_cut,
            available: table.n_max(),
        });
    }
    let t_f = table.spectral_parameter()?;
    let ev = WhittakerEvaluator::new(t_f, WhittakerMethod::Auto);
    let mut value = Complex64::new(0.0, 0.0);
    let mut lambda_max: f64 = 0.0;
    let mut last_w = 0.0;
    for n in 1..=n_cut {
        let w = ev.eval(4.0 * std::f64::consts::PI * n as f64 * y)?.value;
        last_w = w;
        let rho = table.rho(n as i64);
        lambda_max = lambda_max.max(table.lambda(n).abs());
        let pair = match table.parity {
            Parity::Even => 2.0 * Complex64::new((std::f64::consts::TAU * n as f64 * x).cos(), 0.0),
            Parity::Odd => 2.0 * Complex64::new(0.0, (std::f64::consts::TAU * n as f64 * x).sin()),
        };
        value += rho / (n as f64).sqrt() * w * pair;
    }
    // geometric tail from the e^{-2πny} envelope of the Whittaker factor
    let q = (-std::f64::consts::TAU * y).exp();
    let tail_bound = if q < 1.0 {
        2.0 * table.rho1 * lambda_max.max(1.0) * last_w.abs() * q
            / (1.0 - q)
            / (n_cut as f64).sqrt()
            + 1e-300
    } else {
        f64::INFINITY
    };
    Ok(MaassValue {
        value,
        tail_bound,
        truncated: (n_cut as f64) < 10.0 / y,
    })
}

/// One additive-twist record `Σ_{n≤x} ρ(n) e(αn)`.
#[derive(Debug, Clone, Copy)]
pub struct TwistRecord {
    pub alpha: f64,
    pub x_cut: f64,
    pub sum_value: Complex64,
}

/// Direct summation of the additive twist, the square-root-cancellation
/// baseline.
pub fn additive_twist_sum(table: &CoefficientTable, alpha: f64, x_cut: f64) -> Result<TwistRecord> {
    let n_end = x_cut.floor() as u64;
    if n_end > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_end,
            available: table.n_max(),
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=n_end {
        sum += table.rho(n as i64) * e(alpha * n as f64);
    }
    Ok(TwistRecord {
        alpha,
        x_cut,
        sum_value: sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{synthetic_maass_table, FormKind};

    fn even_table() -> CoefficientTable {
        synthetic_maass_table(17, 4000, 9.5337, Parity::Even)
    }

    #[test]
    fn odd_parity_vanishes_at_x_zero() {
        let t = synthetic_maass_table(17, 400, 9.5337, Parity::Odd);
        let v = maass_value(&t, 0.0, 0.3, 60).unwrap();
        assert_eq!(v.value.norm(), 0.0);
    }

    #[test]
    fn cusp_decay_high_in_the_cusp() {
        let t = even_table();
        let v = maass_value(&t, 0.37, 5.0, 40).unwrap();
        assert!(v.value.norm() < 1e-10, "{}", v.value.norm());
    }

    #[test]
    fn periodicity_in_x() {
        let t = even_table();
        let a = maass_value(&t, 0.21, 0.05, 900).unwrap().value;
        let b = maass_value(&t, 1.21, 0.05, 900).unwrap().value;
        assert!((a - b).norm() < 1e-12 * a.norm().max(1e-6), "{a} vs {b}");
    }

    #[test]
    fn truncation_within_tail_bound() {
        let t = even_table();
        let y = 0.08f64;
        let base = (10.0 / y).ceil() as u64;
        let v1 = maass_value(&t, 0.3, y, base).unwrap();
        let v2 = maass_value(&t, 0.3, y, 2 * base).unwrap();
        assert!(!v1.truncated);
        assert!(
            (v1.value - v2.value).norm() <= v1.tail_bound,
            "change {} vs bound {}",
            (v1.value - v2.value).norm(),
            v1.tail_bound
        );
    }

    #[test]
    fn constant_mock_twist_at_zero() {
        let mut lambda = vec![1.0; 100];
        lambda[0] = 1.0;
        let t = CoefficientTable::from_lambda(
            FormKind::Maass { t_f: 1.0 },
            Parity::Even,
            "mock",
            lambda,
        )
        .unwrap();
        let r = additive_twist_sum(&t, 0.0, 57.3).unwrap();
        assert!((r.sum_value.re - t.rho1 * 57.0).abs() < 1e-12);
        assert_eq!(r.sum_value.im, 0.0);
    }

    #[test]
    fn twist_conjugation() {
        let t = even_table();
        let a = additive_twist_sum(&t, 0.31, 2000.0).unwrap().sum_value;
        let b = additive_twist_sum(&t, -0.31, 2000.0).unwrap().sum_value;
        assert!((a - b.conj()).norm() < 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn square_root_cancellation_of_twists() {
        let t = even_table();
        let mut seed = 0xfeedfaceu64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for &x_cut in &[1000.0f64, 4000.0] {
            for _ in 0..20 {
                let alpha = next();
                let r = additive_twist_sum(&t, alpha, x_cut).unwrap();
                let bound = 10.0 * x_cut.powf(0.6);
                assert!(
                    r.sum_value.norm() <= bound,
                    "α={alpha}, x={x_cut}: {} vs {bound}",
                    r.sum_value.norm()
                );
            }
        }
    }
}
