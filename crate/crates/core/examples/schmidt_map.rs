//! Schmidt number and rate over the idler hemisphere for r = 1.5 on a coarse
//! grid; prints where each one peaks.

use std::f64::consts::FRAC_PI_4;

use thinfilm_spdc::analysis::Axis;
use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::spdc::{Chi2Tensor, JointSetting};
use thinfilm_spdc::tomography::schmidt_map;

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    for thickness in [0.01 * lp, lp] {
        let setting = JointSetting::with_ratio(
            PumpSpec::new(lp, 6.6e5)?,
            LayerStack::gaas_on_silica(thickness),
            Chi2Tensor::zinc_blende(1.0),
            1.5,
            DetectionMedium::Medium1,
            (FRAC_PI_4, 0.0),
            (FRAC_PI_4, std::f64::consts::PI),
        )?;
        let map = schmidt_map(
            &setting,
            Axis::degrees("theta_i", 1.0, 89.0, 45)?,
            Axis::degrees("phi_i", 90.0, 270.0, 37)?,
        )?;
        let deg = |(t, p): (f64, f64)| (t.to_degrees().round(), p.to_degrees().round());
        println!(
            "a = {:.2} lp: max K at {:?}, max rate at {:?} (deg)",
            thickness / lp,
            deg(map.argmax_schmidt),
            deg(map.argmax_rate)
        );
    }
    Ok(())
}
