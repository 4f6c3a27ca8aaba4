//! The focused pump in Fourier space and inside the slab: transverse and
//! longitudinal field strengths, and the decay of the on-axis field in GaAs.

use num_complex::Complex64;
use thinfilm_spdc::analysis::decay_length;
use thinfilm_spdc::optics::{LayerStack, Role, TransverseWaveVector};
use thinfilm_spdc::pump::{interface_field, pump_field_at, PumpSpec};

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    let stack = LayerStack::gaas_on_silica(2.0 * lp);
    let substrate = stack.medium3.pump;
    for width in [6.6e5, 2.0e7] {
        let spec = PumpSpec::new(lp, width)?;
        let (mut ex, mut ez) = (0.0f64, 0.0f64);
        let n = 201;
        let span = 3.0 * width;
        for i in 0..n {
            for j in 0..n {
                let kx = -span + 2.0 * span * i as f64 / (n - 1) as f64;
                let ky = -span + 2.0 * span * j as f64 / (n - 1) as f64;
                let f = interface_field(TransverseWaveVector::new(kx, ky), &spec, substrate);
                ex = ex.max(f.field[0].norm_sqr());
                ez = ez.max(f.field[2].norm_sqr());
            }
        }
        println!("w = {width:.1e} 1/m: max|Ez|^2 / max|Ex|^2 = {:.3e}", ez / ex);
    }

    let spec = PumpSpec::new(lp, 6.6e5)?;
    let layers = stack.at(Role::Pump);
    let a = stack.thickness;
    for k in 0..=8 {
        let depth = 0.25 * lp * k as f64;
        let e = pump_field_at(TransverseWaveVector::ZERO, &spec, &layers, -a + depth)?;
        println!("depth {:4.2} lp: |Ex| = {:.4e}", depth / lp, e[0].norm());
    }
    let alpha = decay_length(Complex64::new(17.63, 3.83), lp)?;
    println!("field decay length 1/Im(k2p) = {:.3} lp", alpha / lp);
    Ok(())
}
