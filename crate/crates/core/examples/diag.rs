use anatrace::horocycle::*;
use anatrace::modular::{synthetic_maass_table, Parity};
use anatrace::oscillatory::TestFunction;
use anatrace::tracefn::make_bessel_family;
use std::time::Instant;

fn main() {
    let table = synthetic_maass_table(2, 6000, 9.5337, Parity::Even);
    let fam = make_bessel_family();
    let window = TestFunction::peak_one_bump(0.5, 2.5);
    let opts = HorocycleOptions::default();
    for &y in &[1.0 / 64.0f64, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0] {
        let t0 = Instant::now();
        let r = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &window,
            HorocycleMethod::FourierSide,
            opts,
        )
        .unwrap();
        println!(
            "1/{:4.0}: |I| = {:.4e}  ({:.1} s)",
            1.0 / y,
            r.value.norm(),
            t0.elapsed().as_secs_f64()
        );
    }
    for &y in &[1.0 / 64.0f64, 1.0 / 128.0] {
        let t0 = Instant::now();
        let d = twisted_integral(
            &table,
            &fam,
            y,
            1.0,
            2.0,
            &window,
            HorocycleMethod::DirectXQuadrature,
            opts,
        )
        .unwrap();
        println!(
            "direct 1/{:4.0}: |I| = {:.4e}  ({:.1} s)",
            1.0 / y,
            d.value.norm(),
            t0.elapsed().as_secs_f64()
        );
    }
}
