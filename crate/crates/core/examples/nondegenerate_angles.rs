//! Where the idler goes when the signal is fixed at 45 degrees and the
//! photons have different colours: closed-form momentum matching next to the
//! maximum of a rate scan.

use std::f64::consts::{FRAC_PI_4, PI};

use thinfilm_spdc::analysis::{idler_angle, idler_scan, Axis};
use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::spdc::{Chi2Tensor, JointSetting};

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    let axis = Axis::degrees("theta_i", 5.0, 85.0, 321)?;
    for ratio in [0.8, 1.0, 1.2, 1.5] {
        let base = JointSetting::with_ratio(
            PumpSpec::new(lp, 6.6e5)?,
            LayerStack::gaas_on_silica(0.01 * lp),
            Chi2Tensor::zinc_blende(1.0),
            ratio,
            DetectionMedium::Medium1,
            (FRAC_PI_4, 0.0),
            (FRAC_PI_4, PI),
        )?;
        let closed = idler_angle(ratio, FRAC_PI_4, 1.0, 1.0)?.to_degrees();
        let grid = idler_scan(&base, FRAC_PI_4, 0.0, axis.clone())?;
        let (at, _) = grid.argmax();
        println!(
            "r = {ratio:.1}: momentum matching {closed:6.2} deg, rate maximum {:6.2} deg",
            at[0].to_degrees()
        );
    }
    Ok(())
}
