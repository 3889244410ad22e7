use crate::{Error, Result};
use num_complex::Complex64;

/// Central-difference derivative of order 1..=4 with O(step²) truncation.
///
/// The step is `scale · ε^{1/(order+2)}`, balancing truncation against
/// rounding; pass `scale = max(1, |x|)` unless the integrand has a known
/// shorter variation scale.
pub fn finite_diff(
    f: &dyn Fn(f64) -> Complex64,
    x: f64,
    order: usize,
    scale: f64,
) -> Result<Complex64> {
    if !(1..=4).contains(&order) {
        return Err(Error::Domain(format!(
            "finite_diff supports orders 1..=4, got {order}"
        )));
    }
    if !(scale > 0.0) {
        return Err(Error::Domain(format!(
            "finite_diff needs scale > 0, got {scale}"
        )));
    }
    let h = scale * f64::EPSILON.powf(1.0 / (order as f64 + 2.0));
    let at = |k: f64| -> Result<Complex64> {
        let v = f(x + k * h);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: "finite_diff stencil",
                at: x + k * h,
            })
        }
    };
    let value = match order {
        1 => (at(1.0)? - at(-1.0)?) / (2.0 * h),
        2 => (at(1.0)? - 2.0 * at(0.0)? + at(-1.0)?) / (h * h),
        3 => (at(2.0)? - 2.0 * at(1.0)? + 2.0 * at(-1.0)? - at(-2.0)?) / (2.0 * h * h * h),
        4 => {
            (at(2.0)? - 4.0 * at(1.0)? + 6.0 * at(0.0)? - 4.0 * at(-1.0)? + at(-2.0)?)
                / (h * h * h * h)
        }
        _ => unreachable!(),
    };
    Ok(value)
}

/// Real-valued convenience wrapper around [`finite_diff`].
pub fn finite_diff_real(f: &dyn Fn(f64) -> f64, x: f64, order: usize, scale: f64) -> Result<f64> {
    finite_diff(&|x| Complex64::new(f(x), 0.0), x, order, scale).map(|v| v.re)
}
